#pragma once

#include <span>

#include "mmconc/core.hpp"
#include "mmconc/lipschitz.hpp"
#include "mmconc/transport.hpp"

namespace mmconc {

/// Mass transportation (bounded-Lipschitz) distance: the supremum of
/// |int f dmu - int f dnu| over 1-Lipschitz f with |f| <= 1. Value in [0, 2].
double d_mt(const Measure& mu, const Measure& nu, const FiniteMetricSpace& x);

/// Same LP, returning the optimal f as well.
BoundedLipschitzSolution d_mt_solution(const Measure& mu, const Measure& nu,
                                       const FiniteMetricSpace& x);

/// Prokhorov distance with open enlargements B_d(B, eps) = {y : d(B, y) < eps}.
///
/// For a fixed set of admissible pairs {d <= t}, the worst-case defect
/// max_B mu(B) - nu(N(B)) equals 1 - maxflow on the bipartite coupling graph.
/// The graph only changes at distance values, so the infimum is found exactly
/// by bisection over the sorted critical distances.
double d_prokhorov(const Measure& mu, const Measure& nu, const FiniteMetricSpace& x);

struct ProkhorovOracleResult {
  double value = 0.0;
  /// inf{eps : mu(B) <= nu(B_eps) + eps for all B}
  double mu_over_nu = 0.0;
  /// inf{eps : nu(B) <= mu(B_eps) + eps for all B}
  double nu_over_mu = 0.0;
};

inline constexpr std::size_t kProkhorovOracleMaxPoints = 20;

/// Literal evaluation of the definition over all 2^n subsets, both ways
/// round. Throws TooLarge above kProkhorovOracleMaxPoints and SolverFailure
/// if the two formulations disagree by more than 1e-9.
ProkhorovOracleResult d_prokhorov_oracle(const Measure& mu, const Measure& nu,
                                         const FiniteMetricSpace& x);

/// Ky Fan distance me_mu(f, g) = inf{eps > 0 : mu(|f - g| > eps) <= eps}.
double ky_fan(const RealFunction& f, const RealFunction& g, const Measure& mu);

/// sup over the family of |int f dmu - int f dnu|; every member must be
/// 1-Lipschitz with |f| <= 1 (BadFamily otherwise). Lower-bounds d_mt.
double invariance_equivalence_check(const Measure& mu, const Measure& nu,
                                    const FiniteMetricSpace& x,
                                    std::span<const RealFunction> family);

/// int f dmu - int f dnu.
double integral_gap(const RealFunction& f, const Measure& mu, const Measure& nu);

}  // namespace mmconc
