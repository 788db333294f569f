#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mmconc/core.hpp"

namespace mmconc {

/// Finite group given by its Cayley table. Products follow the convention
/// x·y = "apply x, then y" for permutation groups, so Hamming-type metrics
/// on Sym(n) are right-invariant.
class FiniteGroup {
 public:
  /// Largest order accepted; Sym(7) fits.
  static constexpr std::size_t kMaxOrder = 5100;
  static constexpr std::size_t kFullAssociativityLimit = 200;

  FiniteGroup() = default;
  /// Validates closure, associativity (sampled above kFullAssociativityLimit),
  /// and derives the identity and inverse tables. Throws NotAGroup.
  FiniteGroup(const std::vector<std::vector<Index>>& mul, std::vector<std::string> labels = {});

  /// Z_n, element k is the residue k.
  static FiniteGroup cyclic(std::size_t n);
  /// (Z_2)^n under xor, element k is the bit vector of k (bit i = coordinate i).
  static FiniteGroup hypercube(std::size_t n);
  /// Sym(n), elements are the permutations in lexicographic order (0 is the
  /// identity); labels are one-line notation.
  static FiniteGroup sym(std::size_t n);

  std::size_t order() const noexcept { return labels_.size(); }
  Index mul(Index a, Index b) const noexcept { return mul_[a * order() + b]; }
  Index identity() const noexcept { return identity_; }
  Index inverse(Index a) const noexcept { return inv_[a]; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Throws BadElement for an index outside the group.
  void check_element(Index g) const;

  friend bool operator==(const FiniteGroup&, const FiniteGroup&) = default;

 private:
  std::vector<std::uint32_t> mul_;
  std::vector<std::uint32_t> inv_;
  std::vector<std::string> labels_;
  Index identity_ = 0;
};

/// Permutation with lexicographic rank `rank` in Sym(n).
std::vector<std::size_t> sym_permutation(std::size_t n, Index rank);
/// Lexicographic rank of a permutation of {0, ..., n-1}.
Index sym_rank(std::span<const std::size_t> perm);

/// A metric on the elements of a group with d(xg, yg) = d(x, y). The check is
/// exhaustive up to kFullCheckLimit elements and sampled above. Pseudo-metrics
/// are accepted (d_{G,X} is one). Throws NotInvariant.
class RightInvariantMetric {
 public:
  static constexpr std::size_t kFullCheckLimit = 720;

  RightInvariantMetric(const FiniteGroup& group, FiniteMetricSpace base);

  const FiniteMetricSpace& base() const noexcept { return base_; }

 private:
  FiniteMetricSpace base_;
};

/// Ring distance on Z_n: unit edges, or scaled to diameter 1.
FiniteMetricSpace cyclic_geodesic_space(std::size_t n, bool normalized);
/// Hamming distance on {0,1}^n divided by n.
FiniteMetricSpace hypercube_hamming_space(std::size_t n);
/// Sum of weights[i] over positions where two permutations of Sym(n) differ.
/// Uniform weights 1/n give the normalized Hamming metric.
FiniteMetricSpace sym_weighted_space(std::size_t n, std::span<const double> weights);
FiniteMetricSpace sym_hamming_space(std::size_t n);

/// (lambda_g)_* mu: result[g·x] = mu[x].
Measure left_translate_measure(const Measure& mu, Index g, const FiniteGroup& group);
/// (rho_g)_* mu: result[x·g] = mu[x].
Measure right_translate_measure(const Measure& mu, Index g, const FiniteGroup& group);

/// d_MT((lambda_g)_* mu, mu) over d.
double invariance_defect(const Measure& mu, Index g, const FiniteGroup& group,
                         const RightInvariantMetric& d);
/// invariance_defect at every element, in element order.
std::vector<double> invariance_defects(const Measure& mu, const FiniteGroup& group,
                                       const RightInvariantMetric& d, std::size_t threads = 1);

/// A map between groups, verified multiplicative (exhaustively up to
/// kFullCheckLimit source elements, sampled above). Throws NotHomomorphism.
class GroupHomomorphism {
 public:
  static constexpr std::size_t kFullCheckLimit = 720;

  GroupHomomorphism(const FiniteGroup& source, const FiniteGroup& target, std::vector<Index> image);

  std::size_t source_order() const noexcept { return image_.size(); }
  std::size_t target_order() const noexcept { return target_order_; }
  Index operator()(Index g) const noexcept { return image_[g]; }
  const std::vector<Index>& image() const noexcept { return image_; }

 private:
  std::size_t target_order_;
  std::vector<Index> image_;
};

/// Parity of permutations, Sym(n) -> Z_2.
GroupHomomorphism sign_homomorphism(const FiniteGroup& sym_n, std::size_t n,
                                    const FiniteGroup& z2);
/// Everything to the identity.
GroupHomomorphism trivial_homomorphism(const FiniteGroup& source, const FiniteGroup& target);

Measure pushforward_hom(const Measure& mu, const GroupHomomorphism& phi);

/// d(phi(a), phi(b)) on the source group; a right-invariant pseudo-metric
/// whenever d is right-invariant on the target.
RightInvariantMetric pull_back(const GroupHomomorphism& phi, const FiniteGroup& source,
                               const RightInvariantMetric& d);

/// Union over i of S_i · S_i^{-1}, S_i = support(mus[i]).
IndexSet support_product_density(std::span<const Measure> mus, const FiniteGroup& group);

}  // namespace mmconc
