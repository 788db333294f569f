#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "mmconc/core.hpp"

namespace mmconc {

/// Real-valued function on the points of a finite space.
class RealFunction {
 public:
  RealFunction() = default;
  explicit RealFunction(std::vector<double> values);
  static RealFunction constant(std::size_t n, double c) {
    return RealFunction(std::vector<double>(n, c));
  }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](Index i) const noexcept { return values_[i]; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::span<const double> span() const noexcept { return values_; }

  double sup_norm() const noexcept;
  double min() const noexcept;
  double max() const noexcept;
  RealFunction shifted(double c) const;
  RealFunction composed(const PointMap& p) const;

  friend bool operator==(const RealFunction&, const RealFunction&) = default;

 private:
  std::vector<double> values_;
};

inline constexpr double kLipTol = 1e-9;
inline constexpr double kInfiniteLip = std::numeric_limits<double>::infinity();

/// max |f_i - f_j| / d_ij over pairs with d_ij > 0. Pairs at pseudo-distance
/// zero with differing values give +infinity.
double lip_constant(const RealFunction& f, const FiniteMetricSpace& x);

/// Lipschitz constant of f restricted to the listed points.
double lip_constant_on(const RealFunction& f, const FiniteMetricSpace& x,
                       std::span<const Index> subset);

/// |f_i - f_j| <= l d_ij + tol for every pair.
bool is_lipschitz(const RealFunction& f, const FiniteMetricSpace& x, double l,
                  double tol = kLipTol);

double sup_distance(const RealFunction& f, const RealFunction& g);

/// f_k(x) = min_y f(y) + k d(x, y). k-Lipschitz, below f, equal to f when f
/// is already k-Lipschitz.
RealFunction inf_convolution(const RealFunction& f, const FiniteMetricSpace& x, double k);

/// Sup-norm projection onto Lip_l: midpoint of the McShane and Whitney
/// envelopes. Attains the minimal distance max_{x,y} (f_x - f_y - l d)^+ / 2.
RealFunction mcshane_nearest(const RealFunction& f, const FiniteMetricSpace& x, double l);

/// Exact sup-norm distance from f to Lip_l(X, d).
double distance_to_lipschitz(const RealFunction& f, const FiniteMetricSpace& x, double l);

/// (f ^ c) v (-c).
RealFunction truncate(const RealFunction& f, double c);

/// k-Lipschitz extension of values given on `subset`, clamped to [-c, c].
/// The output agrees with `values_on_subset` on the subset exactly.
RealFunction extend(std::span<const Index> subset, std::span<const double> values_on_subset,
                    const FiniteMetricSpace& x, double k, double c);

struct LipschitzApproximation {
  double ell = 0.0;
  double k = 0.0;      // inf-convolution slope (s + eps) / delta
  double s = 0.0;      // sup norm of the family after shifting it to be non-negative
  double shift = 0.0;  // constant added to make the family non-negative
  std::vector<RealFunction> approximants;
};

/// Uniform Lipschitz approximation of a bounded uniformly equicontinuous
/// family. `delta` must witness |f(x) - f(y)| <= eps whenever d(x, y) < delta
/// for every member (checked; BadWitness otherwise). Every approximant lies in
/// Lip_ell^ell and within eps of its source in sup norm.
LipschitzApproximation lipschitz_approximate(std::span<const RealFunction> family,
                                  const FiniteMetricSpace& x, double eps, double delta);

/// Largest delta that witnesses eps-equicontinuity of the family on X: the
/// smallest distance between points whose values differ by more than eps
/// in some member (infinity if there is none).
double equicontinuity_witness(std::span<const RealFunction> family, const FiniteMetricSpace& x,
                              double eps);

/// Deterministic family of 1-Lipschitz functions: every single-source
/// distance function, distance-to-set functions for sampled subsets, and
/// McShane projections of random vectors. Returns max(budget, n) functions
/// (one zero function on a singleton space).
std::vector<RealFunction> lip1_candidates(const FiniteMetricSpace& x, std::size_t budget,
                                          std::uint64_t seed);

}  // namespace mmconc
