#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mmconc/error.hpp"

namespace mmconc {

using Index = std::size_t;
/// Sorted, duplicate-free list of point indices.
using IndexSet = std::vector<Index>;

inline constexpr double kTriangleTol = 1e-9;
inline constexpr double kMassTol = 1e-12;

/// Finite (pseudo-)metric space stored as a dense row-major distance matrix.
///
/// Construction validates symmetry, the zero diagonal, and the triangle
/// inequality (absolute tolerance kTriangleTol). Spaces above
/// kFullTriangleCheckLimit points are checked on a deterministic sample of
/// triples, since the full check is cubic.
class FiniteMetricSpace {
 public:
  static constexpr std::size_t kFullTriangleCheckLimit = 512;

  FiniteMetricSpace() = default;
  FiniteMetricSpace(std::vector<std::string> labels, std::vector<double> dist_row_major,
                    bool is_pseudo = false);
  FiniteMetricSpace(std::vector<std::string> labels,
                    const std::vector<std::vector<double>>& dist, bool is_pseudo = false);

  /// Labels "0", "1", ... for callers that do not care about naming.
  static FiniteMetricSpace unlabeled(std::vector<double> dist_row_major, std::size_t n,
                                     bool is_pseudo = false);

  std::size_t size() const noexcept { return labels_.size(); }
  double operator()(Index i, Index j) const noexcept { return dist_[i * size() + j]; }
  std::span<const double> row(Index i) const noexcept {
    return {dist_.data() + i * size(), size()};
  }
  const std::vector<double>& matrix() const noexcept { return dist_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  bool is_pseudo() const noexcept { return is_pseudo_; }

  double diameter() const noexcept;
  double diameter(std::span<const Index> subset) const noexcept;

  /// d restricted to `subset`, labels carried over.
  FiniteMetricSpace restricted(std::span<const Index> subset) const;

  /// Entrywise d <= other (+tol).
  bool dominated_by(const FiniteMetricSpace& other, double tol = 0.0) const;

  friend bool operator==(const FiniteMetricSpace&, const FiniteMetricSpace&) = default;

 private:
  void validate() const;

  std::vector<std::string> labels_;
  std::vector<double> dist_;
  bool is_pseudo_ = false;
};

/// Probability vector. Weights are validated, never silently renormalized.
class Measure {
 public:
  Measure() = default;
  explicit Measure(std::vector<double> weights);

  /// Scales non-negative raw weights to total mass one.
  static Measure normalized(std::vector<double> raw);
  static Measure uniform(std::size_t n);
  static Measure point_mass(std::size_t n, Index at);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](Index i) const noexcept { return weights_[i]; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  double mass_of(std::span<const Index> subset) const noexcept;
  double min_positive_weight() const noexcept;

  friend bool operator==(const Measure&, const Measure&) = default;

 private:
  std::vector<double> weights_;
};

class MmSpace {
 public:
  MmSpace(FiniteMetricSpace space, Measure measure);

  const FiniteMetricSpace& space() const noexcept { return space_; }
  const Measure& measure() const noexcept { return measure_; }
  std::size_t size() const noexcept { return space_.size(); }
  bool fully_supported() const noexcept;

 private:
  FiniteMetricSpace space_;
  Measure measure_;
};

/// A map between finite point sets, given by its image table.
class PointMap {
 public:
  PointMap(std::size_t target_size, std::vector<Index> image);

  static PointMap identity(std::size_t n);
  static PointMap constant(std::size_t source_size, std::size_t target_size, Index value);

  std::size_t source_size() const noexcept { return image_.size(); }
  std::size_t target_size() const noexcept { return target_size_; }
  Index operator()(Index i) const noexcept { return image_[i]; }
  const std::vector<Index>& image() const noexcept { return image_; }

 private:
  std::size_t target_size_;
  std::vector<Index> image_;
};

IndexSet support(const Measure& mu);
inline IndexSet support(const MmSpace& m) { return support(m.measure()); }

/// Sub-mm-space on B. Requires mu(B) = 1 (within kMassTol).
MmSpace restrict(const MmSpace& m, std::span<const Index> subset);

Measure pushforward(const Measure& mu, const PointMap& p);

/// Sorted, de-duplicated copy; throws BadPoint on an index >= n.
IndexSet make_index_set(std::vector<Index> indices, std::size_t n);

}  // namespace mmconc
