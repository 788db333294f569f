#include "mmconc/groups.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "mmconc/measure_metrics.hpp"
#include "mmconc/parallel.hpp"
#include "mmconc/rng.hpp"

namespace mmconc {

namespace {

constexpr std::size_t kSampledChecks = 200000;
constexpr std::uint64_t kCheckSeed = 0x5eed;

std::vector<std::string> default_labels(std::size_t n) {
  std::vector<std::string> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::to_string(i);
  return out;
}

std::size_t factorial(std::size_t n) {
  std::size_t f = 1;
  for (std::size_t k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

FiniteGroup::FiniteGroup(const std::vector<std::vector<Index>>& mul,
                         std::vector<std::string> labels) {
  const std::size_t n = mul.size();
  if (n == 0) throw Error(ErrorKind::NotAGroup, "a group needs at least one element");
  if (n > kMaxOrder) {
    throw Error(ErrorKind::TooLarge, "group order " + std::to_string(n) + " exceeds " +
                                         std::to_string(kMaxOrder));
  }
  if (labels.empty()) labels = default_labels(n);
  if (labels.size() != n) throw Error(ErrorKind::DimensionMismatch, "one label per element is required");
  mul_.resize(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    if (mul[a].size() != n) throw Error(ErrorKind::NotAGroup, "multiplication table is not square");
    for (std::size_t b = 0; b < n; ++b) {
      if (mul[a][b] >= n) throw Error(ErrorKind::NotAGroup, "product outside the group");
      mul_[a * n + b] = static_cast<std::uint32_t>(mul[a][b]);
    }
  }
  labels_ = std::move(labels);

  bool found = false;
  for (Index e = 0; e < n && !found; ++e) {
    bool ok = true;
    for (Index x = 0; x < n && ok; ++x) ok = this->mul(e, x) == x && this->mul(x, e) == x;
    if (ok) {
      identity_ = e;
      found = true;
    }
  }
  if (!found) throw Error(ErrorKind::NotAGroup, "no identity element");

  inv_.assign(n, 0);
  for (Index a = 0; a < n; ++a) {
    Index b = 0;
    while (b < n && this->mul(a, b) != identity_) ++b;
    if (b == n || this->mul(b, a) != identity_) {
      throw Error(ErrorKind::NotAGroup, "element " + labels_[a] + " has no inverse");
    }
    inv_[a] = static_cast<std::uint32_t>(b);
  }

  auto associative = [&](Index a, Index b, Index c) {
    return this->mul(this->mul(a, b), c) == this->mul(a, this->mul(b, c));
  };
  if (n <= kFullAssociativityLimit) {
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b)
        for (Index c = 0; c < n; ++c)
          if (!associative(a, b, c)) throw Error(ErrorKind::NotAGroup, "multiplication is not associative");
  } else {
    Rng rng(kCheckSeed);
    for (std::size_t t = 0; t < kSampledChecks; ++t) {
      if (!associative(rng.below(n), rng.below(n), rng.below(n))) {
        throw Error(ErrorKind::NotAGroup, "multiplication is not associative");
      }
    }
  }
}

FiniteGroup FiniteGroup::cyclic(std::size_t n) {
  std::vector<std::vector<Index>> mul(n, std::vector<Index>(n));
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) mul[a][b] = (a + b) % n;
  return FiniteGroup(mul);
}

FiniteGroup FiniteGroup::hypercube(std::size_t n) {
  if (n > 12) throw Error(ErrorKind::TooLarge, "hypercube group dimension is limited to 12");
  const std::size_t order = std::size_t{1} << n;
  std::vector<std::vector<Index>> mul(order, std::vector<Index>(order));
  std::vector<std::string> labels(order);
  for (Index a = 0; a < order; ++a) {
    for (Index b = 0; b < order; ++b) mul[a][b] = a ^ b;
    labels[a].resize(n);
    for (std::size_t i = 0; i < n; ++i) labels[a][i] = (a >> i) & 1 ? '1' : '0';
  }
  return FiniteGroup(mul, std::move(labels));
}

std::vector<std::size_t> sym_permutation(std::size_t n, Index rank) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::vector<std::size_t> perm;
  perm.reserve(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t block = factorial(n - 1 - pos);
    const std::size_t k = rank / block;
    rank %= block;
    perm.push_back(pool[k]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return perm;
}

Index sym_rank(std::span<const std::size_t> perm) {
  const std::size_t n = perm.size();
  Index rank = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t smaller = 0;
    for (std::size_t j = i + 1; j < n; ++j) smaller += perm[j] < perm[i];
    rank += smaller * factorial(n - 1 - i);
  }
  return rank;
}

FiniteGroup FiniteGroup::sym(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "Sym(0) is not supported");
  const std::size_t order = factorial(n);
  if (n > 7 || order > kMaxOrder) throw Error(ErrorKind::TooLarge, "Sym(n) is limited to n <= 7");
  std::vector<std::vector<std::size_t>> perms(order);
  std::vector<std::string> labels(order);
  for (Index r = 0; r < order; ++r) {
    perms[r] = sym_permutation(n, r);
    for (std::size_t v : perms[r]) labels[r] += static_cast<char>('0' + v);
  }
  std::vector<std::vector<Index>> mul(order, std::vector<Index>(order));
  std::vector<std::size_t> product(n);
  for (Index a = 0; a < order; ++a) {
    for (Index b = 0; b < order; ++b) {
      // (a·b)(i) = b(a(i))
      for (std::size_t i = 0; i < n; ++i) product[i] = perms[b][perms[a][i]];
      mul[a][b] = sym_rank(product);
    }
  }
  return FiniteGroup(mul, std::move(labels));
}

void FiniteGroup::check_element(Index g) const {
  if (g >= order()) {
    throw Error(ErrorKind::BadElement, "element " + std::to_string(g) + " is not in a group of order " +
                                           std::to_string(order()));
  }
}

RightInvariantMetric::RightInvariantMetric(const FiniteGroup& group, FiniteMetricSpace base)
    : base_(std::move(base)) {
  const std::size_t n = group.order();
  if (base_.size() != n) throw Error(ErrorKind::DimensionMismatch, "metric and group differ in size");
  auto invariant = [&](Index x, Index y, Index g) {
    return base_(group.mul(x, g), group.mul(y, g)) == base_(x, y);
  };
  if (n <= kFullCheckLimit) {
    for (Index x = 0; x < n; ++x)
      for (Index y = x + 1; y < n; ++y)
        for (Index g = 0; g < n; ++g)
          if (!invariant(x, y, g)) {
            throw Error(ErrorKind::NotInvariant, "d(" + group.labels()[x] + "·g, " +
                                                     group.labels()[y] + "·g) differs for g = " +
                                                     group.labels()[g]);
          }
  } else {
    Rng rng(kCheckSeed);
    for (std::size_t t = 0; t < kSampledChecks; ++t) {
      if (!invariant(rng.below(n), rng.below(n), rng.below(n))) {
        throw Error(ErrorKind::NotInvariant, "metric is not right-invariant");
      }
    }
  }
}

FiniteMetricSpace cyclic_geodesic_space(std::size_t n, bool normalized) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "Z_0 is not a group");
  const double scale = normalized && n > 1 ? static_cast<double>(n / 2) : 1.0;
  std::vector<double> dist(n * n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      const std::size_t diff = a > b ? a - b : b - a;
      dist[a * n + b] = static_cast<double>(std::min(diff, n - diff)) / scale;
    }
  }
  return FiniteMetricSpace(default_labels(n), std::move(dist));
}

FiniteMetricSpace hypercube_hamming_space(std::size_t n) {
  if (n == 0 || n > 12) throw Error(ErrorKind::InvalidArgument, "hypercube dimension must be in 1..12");
  const std::size_t order = std::size_t{1} << n;
  std::vector<double> dist(order * order);
  std::vector<std::string> labels(order);
  for (Index a = 0; a < order; ++a) {
    for (Index b = 0; b < order; ++b) {
      dist[a * order + b] = static_cast<double>(std::popcount(a ^ b)) / static_cast<double>(n);
    }
    labels[a].resize(n);
    for (std::size_t i = 0; i < n; ++i) labels[a][i] = (a >> i) & 1 ? '1' : '0';
  }
  return FiniteMetricSpace(std::move(labels), std::move(dist));
}

FiniteMetricSpace sym_weighted_space(std::size_t n, std::span<const double> weights) {
  if (weights.size() != n) throw Error(ErrorKind::DimensionMismatch, "one weight per position is required");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorKind::InvalidArgument, "weights must be positive");
  }
  const std::size_t order = factorial(n);
  if (n == 0 || n > 7) throw Error(ErrorKind::TooLarge, "Sym(n) is limited to n <= 7");
  std::vector<std::vector<std::size_t>> perms(order);
  std::vector<std::string> labels(order);
  for (Index r = 0; r < order; ++r) {
    perms[r] = sym_permutation(n, r);
    for (std::size_t v : perms[r]) labels[r] += static_cast<char>('0' + v);
  }
  std::vector<double> dist(order * order, 0.0);
  for (Index a = 0; a < order; ++a) {
    for (Index b = 0; b < order; ++b) {
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (perms[a][i] != perms[b][i]) d += weights[i];
      dist[a * order + b] = d;
    }
  }
  return FiniteMetricSpace(std::move(labels), std::move(dist));
}

FiniteMetricSpace sym_hamming_space(std::size_t n) {
  return sym_weighted_space(n, std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

namespace {

Measure translate(const Measure& mu, Index g, const FiniteGroup& group, bool left) {
  group.check_element(g);
  if (mu.size() != group.order()) throw Error(ErrorKind::DimensionMismatch, "measure and group differ in size");
  std::vector<double> out(mu.size(), 0.0);
  for (Index x = 0; x < mu.size(); ++x) out[left ? group.mul(g, x) : group.mul(x, g)] = mu[x];
  return Measure(std::move(out));
}

}  // namespace

Measure left_translate_measure(const Measure& mu, Index g, const FiniteGroup& group) {
  return translate(mu, g, group, true);
}

Measure right_translate_measure(const Measure& mu, Index g, const FiniteGroup& group) {
  return translate(mu, g, group, false);
}

double invariance_defect(const Measure& mu, Index g, const FiniteGroup& group,
                         const RightInvariantMetric& d) {
  return d_mt(left_translate_measure(mu, g, group), mu, d.base());
}

std::vector<double> invariance_defects(const Measure& mu, const FiniteGroup& group,
                                       const RightInvariantMetric& d, std::size_t threads) {
  std::vector<double> out(group.order(), 0.0);
  parallel_for(group.order(), threads,
               [&](std::size_t g) { out[g] = invariance_defect(mu, g, group, d); });
  return out;
}

GroupHomomorphism::GroupHomomorphism(const FiniteGroup& source, const FiniteGroup& target,
                                     std::vector<Index> image)
    : target_order_(target.order()), image_(std::move(image)) {
  const std::size_t n = source.order();
  if (image_.size() != n) throw Error(ErrorKind::NotHomomorphism, "one image per source element is required");
  for (Index v : image_) {
    if (v >= target_order_) throw Error(ErrorKind::NotHomomorphism, "image outside the target group");
  }
  auto multiplicative = [&](Index a, Index b) {
    return image_[source.mul(a, b)] == target.mul(image_[a], image_[b]);
  };
  if (n <= kFullCheckLimit) {
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b)
        if (!multiplicative(a, b)) {
          throw Error(ErrorKind::NotHomomorphism, "phi(" + source.labels()[a] + "·" +
                                                      source.labels()[b] + ") != phi(a)·phi(b)");
        }
  } else {
    Rng rng(kCheckSeed);
    for (std::size_t t = 0; t < kSampledChecks; ++t) {
      if (!multiplicative(rng.below(n), rng.below(n))) {
        throw Error(ErrorKind::NotHomomorphism, "map is not multiplicative");
      }
    }
  }
}

GroupHomomorphism sign_homomorphism(const FiniteGroup& sym_n, std::size_t n, const FiniteGroup& z2) {
  if (sym_n.order() != factorial(n) || z2.order() != 2) {
    throw Error(ErrorKind::DimensionMismatch, "sign map needs Sym(n) and Z_2");
  }
  std::vector<Index> image(sym_n.order());
  const Index odd = z2.identity() == 0 ? 1 : 0;
  for (Index r = 0; r < sym_n.order(); ++r) {
    const auto perm = sym_permutation(n, r);
    std::size_t inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) inversions += perm[i] > perm[j];
    image[r] = inversions % 2 == 0 ? z2.identity() : odd;
  }
  return GroupHomomorphism(sym_n, z2, std::move(image));
}

GroupHomomorphism trivial_homomorphism(const FiniteGroup& source, const FiniteGroup& target) {
  return GroupHomomorphism(source, target, std::vector<Index>(source.order(), target.identity()));
}

Measure pushforward_hom(const Measure& mu, const GroupHomomorphism& phi) {
  if (mu.size() != phi.source_order()) {
    throw Error(ErrorKind::DimensionMismatch, "measure and homomorphism source differ in size");
  }
  return pushforward(mu, PointMap(phi.target_order(), phi.image()));
}

RightInvariantMetric pull_back(const GroupHomomorphism& phi, const FiniteGroup& source,
                               const RightInvariantMetric& d) {
  const std::size_t n = source.order();
  std::vector<double> dist(n * n);
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) dist[a * n + b] = d.base()(phi(a), phi(b));
  return RightInvariantMetric(source, FiniteMetricSpace(source.labels(), std::move(dist), true));
}

IndexSet support_product_density(std::span<const Measure> mus, const FiniteGroup& group) {
  std::vector<bool> hit(group.order(), false);
  for (const Measure& mu : mus) {
    if (mu.size() != group.order()) throw Error(ErrorKind::DimensionMismatch, "measure and group differ in size");
    const IndexSet s = support(mu);
    for (Index a : s)
      for (Index b : s) hit[group.mul(a, group.inverse(b))] = true;
  }
  IndexSet out;
  for (Index g = 0; g < group.order(); ++g)
    if (hit[g]) out.push_back(g);
  return out;
}

}  // namespace mmconc
