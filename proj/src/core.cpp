#include "mmconc/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mmconc/rng.hpp"

namespace mmconc {

namespace {

std::string describe_pair(const char* what, Index i, Index j) {
  return std::string(what) + " at (" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

}  // namespace

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::string> labels,
                                     std::vector<double> dist_row_major, bool is_pseudo)
    : labels_(std::move(labels)), dist_(std::move(dist_row_major)), is_pseudo_(is_pseudo) {
  validate();
}

FiniteMetricSpace::FiniteMetricSpace(std::vector<std::string> labels,
                                     const std::vector<std::vector<double>>& dist,
                                     bool is_pseudo)
    : labels_(std::move(labels)), is_pseudo_(is_pseudo) {
  const std::size_t n = labels_.size();
  if (dist.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "distance matrix has " +
                                                  std::to_string(dist.size()) + " rows, expected " +
                                                  std::to_string(n));
  }
  dist_.reserve(n * n);
  for (const auto& row : dist) {
    if (row.size() != n) {
      throw Error(ErrorKind::DimensionMismatch, "distance matrix is not square");
    }
    dist_.insert(dist_.end(), row.begin(), row.end());
  }
  validate();
}

FiniteMetricSpace FiniteMetricSpace::unlabeled(std::vector<double> dist_row_major, std::size_t n,
                                               bool is_pseudo) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return FiniteMetricSpace(std::move(labels), std::move(dist_row_major), is_pseudo);
}

void FiniteMetricSpace::validate() const {
  const std::size_t n = size();
  if (dist_.size() != n * n) {
    throw Error(ErrorKind::DimensionMismatch,
                "distance matrix has " + std::to_string(dist_.size()) + " entries, expected " +
                    std::to_string(n * n));
  }
  for (Index i = 0; i < n; ++i) {
    if ((*this)(i, i) != 0.0) throw Error(ErrorKind::NotAMetric, describe_pair("nonzero diagonal", i, i));
    for (Index j = 0; j < n; ++j) {
      const double d = (*this)(i, j);
      if (!std::isfinite(d) || d < 0.0) {
        throw Error(ErrorKind::NotAMetric, describe_pair("negative or non-finite distance", i, j));
      }
      if (d != (*this)(j, i)) throw Error(ErrorKind::NotAMetric, describe_pair("asymmetric", i, j));
      if (!is_pseudo_ && i != j && d == 0.0) {
        throw Error(ErrorKind::NotAMetric, describe_pair("zero off-diagonal distance", i, j));
      }
    }
  }
  auto check = [&](Index i, Index j, Index k) {
    if ((*this)(i, k) > (*this)(i, j) + (*this)(j, k) + kTriangleTol) {
      throw Error(ErrorKind::NotAMetric, "triangle inequality fails for (" + std::to_string(i) +
                                             ", " + std::to_string(j) + ", " + std::to_string(k) +
                                             ")");
    }
  };
  if (n <= kFullTriangleCheckLimit) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        for (Index k = i + 1; k < n; ++k) check(i, j, k);
  } else {
    Rng rng(0x6d6d636f6e63ULL ^ n);
    const std::size_t samples = 4'000'000;
    for (std::size_t s = 0; s < samples; ++s) check(rng.below(n), rng.below(n), rng.below(n));
  }
}

double FiniteMetricSpace::diameter() const noexcept {
  double best = 0.0;
  for (double d : dist_) best = std::max(best, d);
  return best;
}

double FiniteMetricSpace::diameter(std::span<const Index> subset) const noexcept {
  double best = 0.0;
  for (Index a : subset)
    for (Index b : subset) best = std::max(best, (*this)(a, b));
  return best;
}

FiniteMetricSpace FiniteMetricSpace::restricted(std::span<const Index> subset) const {
  std::vector<std::string> labels;
  std::vector<double> dist;
  labels.reserve(subset.size());
  dist.reserve(subset.size() * subset.size());
  for (Index a : subset) {
    if (a >= size()) throw Error(ErrorKind::BadPoint, "index " + std::to_string(a) + " out of range");
    labels.push_back(labels_[a]);
    for (Index b : subset) dist.push_back((*this)(a, b));
  }
  return FiniteMetricSpace(std::move(labels), std::move(dist), is_pseudo_);
}

bool FiniteMetricSpace::dominated_by(const FiniteMetricSpace& other, double tol) const {
  if (other.size() != size()) return false;
  for (std::size_t k = 0; k < dist_.size(); ++k) {
    if (dist_[k] > other.dist_[k] + tol) return false;
  }
  return true;
}

Measure::Measure(std::vector<double> weights) : weights_(std::move(weights)) {
  double total = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double w = weights_[i];
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorKind::InvalidArgument,
                  "weight " + std::to_string(i) + " is negative or non-finite");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kMassTol) {
    throw Error(ErrorKind::MassNotOne, "weights sum to " + std::to_string(total));
  }
}

Measure Measure::normalized(std::vector<double> raw) {
  double total = 0.0;
  for (double w : raw) {
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorKind::InvalidArgument, "raw weights must be non-negative and finite");
    }
    total += w;
  }
  if (total <= 0.0) throw Error(ErrorKind::MassNotOne, "raw weights have zero total mass");
  for (double& w : raw) w /= total;
  return Measure(std::move(raw));
}

Measure Measure::uniform(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "uniform measure on an empty space");
  return Measure(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Measure Measure::point_mass(std::size_t n, Index at) {
  if (at >= n) throw Error(ErrorKind::BadPoint, "point mass index out of range");
  std::vector<double> w(n, 0.0);
  w[at] = 1.0;
  return Measure(std::move(w));
}

double Measure::mass_of(std::span<const Index> subset) const noexcept {
  double total = 0.0;
  for (Index i : subset) total += weights_[i];
  return total;
}

double Measure::min_positive_weight() const noexcept {
  double best = 0.0;
  for (double w : weights_) {
    if (w > 0.0 && (best == 0.0 || w < best)) best = w;
  }
  return best;
}

MmSpace::MmSpace(FiniteMetricSpace space, Measure measure)
    : space_(std::move(space)), measure_(std::move(measure)) {
  if (space_.size() != measure_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "space has " + std::to_string(space_.size()) +
                                                  " points but measure has " +
                                                  std::to_string(measure_.size()) + " weights");
  }
}

bool MmSpace::fully_supported() const noexcept {
  return std::all_of(measure_.weights().begin(), measure_.weights().end(),
                     [](double w) { return w > 0.0; });
}

PointMap::PointMap(std::size_t target_size, std::vector<Index> image)
    : target_size_(target_size), image_(std::move(image)) {
  for (Index v : image_) {
    if (v >= target_size_) {
      throw Error(ErrorKind::MapMismatch, "image index " + std::to_string(v) +
                                              " outside target of size " +
                                              std::to_string(target_size_));
    }
  }
}

PointMap PointMap::identity(std::size_t n) {
  std::vector<Index> image(n);
  std::iota(image.begin(), image.end(), Index{0});
  return PointMap(n, std::move(image));
}

PointMap PointMap::constant(std::size_t source_size, std::size_t target_size, Index value) {
  return PointMap(target_size, std::vector<Index>(source_size, value));
}

IndexSet support(const Measure& mu) {
  IndexSet out;
  for (Index i = 0; i < mu.size(); ++i) {
    if (mu[i] > 0.0) out.push_back(i);
  }
  return out;
}

IndexSet make_index_set(std::vector<Index> indices, std::size_t n) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  if (!indices.empty() && indices.back() >= n) {
    throw Error(ErrorKind::BadPoint, "index " + std::to_string(indices.back()) + " out of range");
  }
  return indices;
}

MmSpace restrict(const MmSpace& m, std::span<const Index> subset) {
  const IndexSet b = make_index_set({subset.begin(), subset.end()}, m.size());
  const double mass = m.measure().mass_of(b);
  if (std::abs(mass - 1.0) > kMassTol) {
    throw Error(ErrorKind::MassNotOne, "restriction set carries mass " + std::to_string(mass));
  }
  std::vector<double> w;
  w.reserve(b.size());
  for (Index i : b) w.push_back(m.measure()[i]);
  return MmSpace(m.space().restricted(b), Measure(std::move(w)));
}

Measure pushforward(const Measure& mu, const PointMap& p) {
  if (mu.size() != p.source_size()) {
    throw Error(ErrorKind::DimensionMismatch, "measure length " + std::to_string(mu.size()) +
                                                  " vs map source size " +
                                                  std::to_string(p.source_size()));
  }
  std::vector<double> out(p.target_size(), 0.0);
  for (Index i = 0; i < mu.size(); ++i) out[p(i)] += mu[i];
  return Measure(std::move(out));
}

}  // namespace mmconc
