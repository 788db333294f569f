#include "mmconc/lipschitz.hpp"

#include <algorithm>
#include <cmath>

#include "mmconc/rng.hpp"

namespace mmconc {

namespace {

void require_same_size(const RealFunction& f, const FiniteMetricSpace& x) {
  if (f.size() != x.size()) {
    throw Error(ErrorKind::DimensionMismatch, "function has " + std::to_string(f.size()) +
                                                  " values, space has " +
                                                  std::to_string(x.size()) + " points");
  }
}

}  // namespace

RealFunction::RealFunction(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "function value is not finite");
  }
}

double RealFunction::sup_norm() const noexcept {
  double best = 0.0;
  for (double v : values_) best = std::max(best, std::abs(v));
  return best;
}

double RealFunction::min() const noexcept {
  return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
}

double RealFunction::max() const noexcept {
  return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

RealFunction RealFunction::shifted(double c) const {
  std::vector<double> out(values_);
  for (double& v : out) v += c;
  return RealFunction(std::move(out));
}

RealFunction RealFunction::composed(const PointMap& p) const {
  if (p.target_size() != size()) {
    throw Error(ErrorKind::MapMismatch, "map target does not match function domain");
  }
  std::vector<double> out(p.source_size());
  for (Index i = 0; i < out.size(); ++i) out[i] = values_[p(i)];
  return RealFunction(std::move(out));
}

double lip_constant(const RealFunction& f, const FiniteMetricSpace& x) {
  require_same_size(f, x);
  double best = 0.0;
  const std::size_t n = x.size();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double diff = std::abs(f[i] - f[j]);
      if (diff == 0.0) continue;
      const double d = x(i, j);
      if (d == 0.0) return kInfiniteLip;
      best = std::max(best, diff / d);
    }
  }
  return best;
}

double lip_constant_on(const RealFunction& f, const FiniteMetricSpace& x,
                       std::span<const Index> subset) {
  require_same_size(f, x);
  double best = 0.0;
  for (std::size_t a = 0; a < subset.size(); ++a) {
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      const Index i = subset[a];
      const Index j = subset[b];
      const double diff = std::abs(f[i] - f[j]);
      if (diff == 0.0) continue;
      if (x(i, j) == 0.0) return kInfiniteLip;
      best = std::max(best, diff / x(i, j));
    }
  }
  return best;
}

bool is_lipschitz(const RealFunction& f, const FiniteMetricSpace& x, double l, double tol) {
  require_same_size(f, x);
  for (Index i = 0; i < x.size(); ++i) {
    const auto row = x.row(i);
    for (Index j = i + 1; j < x.size(); ++j) {
      if (std::abs(f[i] - f[j]) > l * row[j] + tol) return false;
    }
  }
  return true;
}

double sup_distance(const RealFunction& f, const RealFunction& g) {
  if (f.size() != g.size()) throw Error(ErrorKind::DimensionMismatch, "function sizes differ");
  double best = 0.0;
  for (Index i = 0; i < f.size(); ++i) best = std::max(best, std::abs(f[i] - g[i]));
  return best;
}

RealFunction inf_convolution(const RealFunction& f, const FiniteMetricSpace& x, double k) {
  require_same_size(f, x);
  if (!(k >= 0.0)) throw Error(ErrorKind::InvalidArgument, "inf-convolution slope must be >= 0");
  const std::size_t n = x.size();
  std::vector<double> out(n);
  for (Index i = 0; i < n; ++i) {
    const auto row = x.row(i);
    double best = f[i];
    for (Index j = 0; j < n; ++j) best = std::min(best, f[j] + k * row[j]);
    out[i] = best;
  }
  return RealFunction(std::move(out));
}

RealFunction mcshane_nearest(const RealFunction& f, const FiniteMetricSpace& x, double l) {
  require_same_size(f, x);
  if (!(l >= 0.0)) throw Error(ErrorKind::InvalidArgument, "Lipschitz bound must be >= 0");
  const std::size_t n = x.size();
  std::vector<double> out(n);
  for (Index i = 0; i < n; ++i) {
    const auto row = x.row(i);
    double upper = f[i];
    double lower = f[i];
    for (Index j = 0; j < n; ++j) {
      upper = std::min(upper, f[j] + l * row[j]);
      lower = std::max(lower, f[j] - l * row[j]);
    }
    out[i] = 0.5 * (upper + lower);
  }
  return RealFunction(std::move(out));
}

double distance_to_lipschitz(const RealFunction& f, const FiniteMetricSpace& x, double l) {
  require_same_size(f, x);
  double worst = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    const auto row = x.row(i);
    for (Index j = 0; j < x.size(); ++j) worst = std::max(worst, f[i] - f[j] - l * row[j]);
  }
  return 0.5 * worst;
}

RealFunction truncate(const RealFunction& f, double c) {
  if (!(c >= 0.0)) throw Error(ErrorKind::InvalidArgument, "truncation level must be >= 0");
  std::vector<double> out(f.values());
  for (double& v : out) v = std::max(std::min(v, c), -c);
  return RealFunction(std::move(out));
}

RealFunction extend(std::span<const Index> subset, std::span<const double> values_on_subset,
                    const FiniteMetricSpace& x, double k, double c) {
  if (subset.size() != values_on_subset.size()) {
    throw Error(ErrorKind::DimensionMismatch, "subset and value list differ in length");
  }
  if (subset.empty()) throw Error(ErrorKind::EmptySet, "extension from an empty set");
  const std::size_t n = x.size();
  for (Index s : subset) {
    if (s >= n) throw Error(ErrorKind::BadPoint, "subset index out of range");
  }
  for (std::size_t a = 0; a < subset.size(); ++a) {
    if (std::abs(values_on_subset[a]) > c + kMassTol) {
      throw Error(ErrorKind::BoundExceeded, "value " + std::to_string(values_on_subset[a]) +
                                                " exceeds bound " + std::to_string(c));
    }
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      const double diff = std::abs(values_on_subset[a] - values_on_subset[b]);
      if (diff > k * x(subset[a], subset[b]) + kLipTol) {
        throw Error(ErrorKind::NotLipschitzOnS,
                    "values at points " + std::to_string(subset[a]) + " and " +
                        std::to_string(subset[b]) + " break the Lipschitz bound");
      }
    }
  }
  std::vector<double> out(n);
  for (Index g = 0; g < n; ++g) {
    const auto row = x.row(g);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < subset.size(); ++a) {
      best = std::min(best, values_on_subset[a] + k * row[subset[a]]);
    }
    out[g] = std::max(std::min(best, c), -c);
  }
  for (std::size_t a = 0; a < subset.size(); ++a) out[subset[a]] = values_on_subset[a];
  return RealFunction(std::move(out));
}

double equicontinuity_witness(std::span<const RealFunction> family, const FiniteMetricSpace& x,
                              double eps) {
  double delta = std::numeric_limits<double>::infinity();
  for (const auto& f : family) {
    require_same_size(f, x);
    for (Index i = 0; i < x.size(); ++i)
      for (Index j = i + 1; j < x.size(); ++j)
        if (std::abs(f[i] - f[j]) > eps) delta = std::min(delta, x(i, j));
  }
  return delta;
}

LipschitzApproximation lipschitz_approximate(std::span<const RealFunction> family,
                                  const FiniteMetricSpace& x, double eps, double delta) {
  if (!(eps > 0.0 && eps <= 1.0)) throw Error(ErrorKind::InvalidArgument, "eps must lie in (0, 1]");
  if (!(delta > 0.0)) throw Error(ErrorKind::BadWitness, "delta must be positive");
  for (const auto& f : family) {
    require_same_size(f, x);
    for (Index i = 0; i < x.size(); ++i)
      for (Index j = i + 1; j < x.size(); ++j)
        if (x(i, j) < delta && std::abs(f[i] - f[j]) > eps + kMassTol) {
          throw Error(ErrorKind::BadWitness,
                      "points " + std::to_string(i) + " and " + std::to_string(j) +
                          " are closer than delta but differ by more than eps");
        }
  }

  LipschitzApproximation out;
  double lowest = 0.0;
  double original_sup = 0.0;
  for (const auto& f : family) {
    lowest = std::min(lowest, f.min());
    original_sup = std::max(original_sup, f.sup_norm());
  }
  out.shift = -lowest;
  for (const auto& f : family) out.s = std::max(out.s, f.max() + out.shift);
  out.k = (out.s + eps) / delta;
  // With a non-zero shift the translated-back approximants are bounded by
  // original_sup + eps rather than s + eps.
  out.ell = std::max({out.k, out.s + 1.0, original_sup + 1.0});

  // Inf-convolution commutes with adding constants, so the shift never has
  // to be materialized.
  out.approximants.reserve(family.size());
  for (const auto& f : family) {
    RealFunction fk = inf_convolution(f, x, out.k);
    if (sup_distance(f, fk) > eps + kLipTol || fk.sup_norm() > out.ell + kLipTol ||
        !is_lipschitz(fk, x, out.k)) {
      throw Error(ErrorKind::SolverFailure, "approximation postcondition failed");
    }
    out.approximants.push_back(std::move(fk));
  }
  return out;
}

std::vector<RealFunction> lip1_candidates(const FiniteMetricSpace& x, std::size_t budget,
                                          std::uint64_t seed) {
  const std::size_t n = x.size();
  std::vector<RealFunction> out;
  if (n == 0) return out;
  if (n == 1) {
    out.push_back(RealFunction::constant(1, 0.0));
    return out;
  }
  budget = std::max(budget, n);
  out.reserve(budget);
  for (Index s = 0; s < n; ++s) {
    const auto row = x.row(s);
    out.emplace_back(std::vector<double>(row.begin(), row.end()));
  }

  Rng rng(seed);
  const std::size_t remaining = budget - n;
  const std::size_t set_count = remaining / 2;
  for (std::size_t t = 0; t < set_count; ++t) {
    // Random subset with a random inclusion rate so both small and large sets appear.
    const double rate = rng.uniform(0.05, 0.6);
    std::vector<double> v(n, std::numeric_limits<double>::infinity());
    bool any = false;
    for (Index s = 0; s < n; ++s) {
      if (!rng.coin(rate)) continue;
      any = true;
      const auto row = x.row(s);
      for (Index i = 0; i < n; ++i) v[i] = std::min(v[i], row[i]);
    }
    if (!any) {
      const auto row = x.row(rng.below(n));
      v.assign(row.begin(), row.end());
    }
    out.emplace_back(std::move(v));
  }
  const double scale = std::max(x.diameter(), 1e-12);
  while (out.size() < budget) {
    std::vector<double> v(n);
    for (double& e : v) e = rng.uniform(0.0, scale);
    out.push_back(mcshane_nearest(RealFunction(std::move(v)), x, 1.0));
  }
  for (const auto& f : out) {
    if (!is_lipschitz(f, x, 1.0)) {
      throw Error(ErrorKind::SolverFailure, "candidate function is not 1-Lipschitz");
    }
  }
  return out;
}

}  // namespace mmconc
