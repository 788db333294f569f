#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mmconc/core.hpp"
#include "mmconc/lipschitz.hpp"
#include "mmconc/lp.hpp"
#include "mmconc/rng.hpp"

namespace mmconc::testing {

/// Points in the unit cube of dimension `dim`, Euclidean distances.
inline FiniteMetricSpace random_euclidean(std::size_t n, std::size_t dim, Rng& rng) {
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
  for (auto& p : pts)
    for (double& c : p) c = rng.uniform();
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) s += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
      d[i * n + j] = std::sqrt(s);
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[j * n + i] = d[i * n + j];
  return FiniteMetricSpace::unlabeled(std::move(d), n);
}

/// Shortest-path metric of a complete graph with random edge weights in
/// [lo, hi]; distances are exact sums of edge weights, so ties are common
/// when the weights are drawn from a coarse grid.
inline FiniteMetricSpace random_graph_metric(std::size_t n, Rng& rng, double lo = 0.1,
                                             double hi = 2.0, bool coarse = false) {
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double w = rng.uniform(lo, hi);
      if (coarse) w = std::round(w * 4.0) / 4.0;
      w = std::max(w, lo);
      d[i * n + j] = d[j * n + i] = w;
    }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
  return FiniteMetricSpace::unlabeled(std::move(d), n);
}

inline FiniteMetricSpace random_space(std::size_t n, Rng& rng) {
  if (rng.coin()) return random_euclidean(n, 1 + rng.below(3), rng);
  return random_graph_metric(n, rng, 0.1, 2.0, rng.coin());
}

/// Random probability vector; some weights zeroed when `sparse`.
inline Measure random_measure(std::size_t n, Rng& rng, bool sparse = false) {
  std::vector<double> w(n);
  for (double& v : w) v = rng.uniform(0.05, 1.0);
  if (sparse) {
    for (double& v : w)
      if (rng.coin(0.3)) v = 0.0;
    if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) w[rng.below(n)] = 1.0;
  }
  return Measure::normalized(std::move(w));
}

/// d_MT through the primal LP in f, solved by the dense simplex with the
/// substitution g = f + 1 so every right-hand side is non-negative.
inline double d_mt_primal(const Measure& mu, const Measure& nu, const FiniteMetricSpace& x) {
  const std::size_t n = x.size();
  lp::Problem p;
  p.num_vars = n;
  p.objective.resize(n);
  double offset = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p.objective[i] = mu[i] - nu[i];
    offset += mu[i] - nu[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(n, 0.0);
    row[i] = 1.0;
    p.add_row(row, 2.0);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) p.add_row(i, 1.0, j, -1.0, x(i, j));
  return lp::maximize(p).value - offset;
}

}  // namespace mmconc::testing
