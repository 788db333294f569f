#include "mmconc/measure_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "mmconc/max_flow.hpp"

namespace mmconc {

namespace {

void require_dims(const Measure& mu, const Measure& nu, const FiniteMetricSpace& x) {
  if (mu.size() != x.size() || nu.size() != x.size()) {
    throw Error(ErrorKind::DimensionMismatch, "measures and space differ in size");
  }
}

std::vector<double> sorted_distinct(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

/// 1 - maxflow of the coupling graph that admits pairs with d <= threshold.
double coupling_defect(const Measure& mu, const Measure& nu, const FiniteMetricSpace& x,
                       const IndexSet& left, const IndexSet& right, double threshold) {
  const std::size_t source = left.size() + right.size();
  const std::size_t sink = source + 1;
  MaxFlow flow(sink + 1);
  for (std::size_t a = 0; a < left.size(); ++a) flow.add_edge(source, a, mu[left[a]]);
  for (std::size_t b = 0; b < right.size(); ++b) flow.add_edge(left.size() + b, sink, nu[right[b]]);
  for (std::size_t a = 0; a < left.size(); ++a)
    for (std::size_t b = 0; b < right.size(); ++b)
      if (x(left[a], right[b]) <= threshold) flow.add_edge(a, left.size() + b, 2.0);
  // Defects below the mass tolerance are flow rounding, not unmatched mass.
  const double defect = 1.0 - flow.run(source, sink);
  return defect <= kMassTol ? 0.0 : defect;
}

/// Smallest k whose interval (d_k, d_{k+1}] contains a feasible eps, given a
/// defect function that is non-increasing in k; returns max(d_k, defect_k).
template <typename DefectFn>
double first_feasible_interval(const std::vector<double>& critical, DefectFn&& defect) {
  const std::size_t m = critical.size();
  auto upper = [&](std::size_t k) {
    return k + 1 < m ? critical[k + 1] : std::numeric_limits<double>::infinity();
  };
  std::size_t lo = 0;
  std::size_t hi = m - 1;  // the last interval admits every pair, so it is feasible
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (defect(mid) <= upper(mid) + kMassTol) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return std::max(critical[lo], defect(lo));
}

}  // namespace

BoundedLipschitzSolution d_mt_solution(const Measure& mu, const Measure& nu,
                                       const FiniteMetricSpace& x) {
  require_dims(mu, nu, x);
  std::vector<double> signed_mass(x.size());
  for (Index i = 0; i < x.size(); ++i) signed_mass[i] = mu[i] - nu[i];
  // Both measures are validated to mass 1 individually; remove the residual
  // rounding so the transshipment is exactly balanced.
  double total = 0.0;
  for (double c : signed_mass) total += c;
  if (!signed_mass.empty()) signed_mass[0] -= total;
  return solve_bounded_lipschitz(signed_mass, x);
}

double d_mt(const Measure& mu, const Measure& nu, const FiniteMetricSpace& x) {
  return std::clamp(d_mt_solution(mu, nu, x).value, 0.0, 2.0);
}

double d_prokhorov(const Measure& mu, const Measure& nu, const FiniteMetricSpace& x) {
  require_dims(mu, nu, x);
  const IndexSet left = support(mu);
  const IndexSet right = support(nu);
  std::vector<double> values{0.0};
  for (Index a : left)
    for (Index b : right) values.push_back(x(a, b));
  const std::vector<double> critical = sorted_distinct(std::move(values));
  std::vector<double> cache(critical.size(), -1.0);
  auto defect = [&](std::size_t k) {
    if (cache[k] < 0.0) cache[k] = coupling_defect(mu, nu, x, left, right, critical[k]);
    return cache[k];
  };
  return std::min(1.0, first_feasible_interval(critical, defect));
}

namespace {

/// inf{eps > 0 : p(B) <= q(B_eps(B)) + eps for every B}, by enumerating B.
double prokhorov_one_sided(const Measure& p, const Measure& q, const FiniteMetricSpace& x,
                           const std::vector<double>& critical) {
  const std::size_t n = x.size();
  const std::uint64_t subsets = std::uint64_t{1} << n;
  // Mass of an arbitrary mask via two half-width lookup tables.
  const std::size_t lo_bits = n / 2;
  const std::size_t hi_bits = n - lo_bits;
  auto table = [](const Measure& m, std::size_t offset, std::size_t bits) {
    std::vector<double> t(std::size_t{1} << bits, 0.0);
    for (std::size_t mask = 1; mask < t.size(); ++mask) {
      const std::size_t low = static_cast<std::size_t>(__builtin_ctzll(mask));
      t[mask] = t[mask & (mask - 1)] + m[offset + low];
    }
    return t;
  };
  const auto q_lo = table(q, 0, lo_bits);
  const auto q_hi = table(q, lo_bits, hi_bits);
  const std::uint64_t lo_mask = (std::uint64_t{1} << lo_bits) - 1;
  auto q_mass = [&](std::uint64_t mask) { return q_lo[mask & lo_mask] + q_hi[mask >> lo_bits]; };

  std::vector<double> p_mass(subsets, 0.0);
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    p_mass[mask] = p_mass[mask & (mask - 1)] + p[static_cast<std::size_t>(__builtin_ctzll(mask))];
  }

  // Worst defect max_B p(B) - q({y : d(B, y) <= t}) for the enlargement
  // used on the eps-interval just above threshold t.
  std::vector<std::uint64_t> hood(subsets, 0);
  auto worst_defect = [&](double t) {
    std::vector<std::uint64_t> nbr(n, 0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t y = 0; y < n; ++y)
        if (x(a, y) <= t) nbr[a] |= std::uint64_t{1} << y;
    double worst = 0.0;
    for (std::uint64_t mask = 1; mask < subsets; ++mask) {
      hood[mask] = hood[mask & (mask - 1)] | nbr[static_cast<std::size_t>(__builtin_ctzll(mask))];
      worst = std::max(worst, p_mass[mask] - q_mass(hood[mask]));
    }
    return worst;
  };
  // Literal feasibility of a given eps with the strict enlargement.
  auto feasible = [&](double eps) {
    std::vector<std::uint64_t> nbr(n, 0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t y = 0; y < n; ++y)
        if (x(a, y) < eps) nbr[a] |= std::uint64_t{1} << y;
    for (std::uint64_t mask = 1; mask < subsets; ++mask) {
      hood[mask] = hood[mask & (mask - 1)] | nbr[static_cast<std::size_t>(__builtin_ctzll(mask))];
      if (p_mass[mask] > q_mass(hood[mask]) + eps + kMassTol) return false;
    }
    return true;
  };

  double best = 1.0;
  for (std::size_t k = 0; k < critical.size(); ++k) {
    const double upper =
        k + 1 < critical.size() ? critical[k + 1] : std::numeric_limits<double>::infinity();
    const double r = worst_defect(critical[k]);
    if (r <= upper + kMassTol) best = std::min(best, std::max(critical[k], r));
  }
  // Confirm the infimum against the definition on both sides.
  const double probe = 1e-10;
  if (!feasible(best + probe) || (best > probe && feasible(best - probe))) {
    throw Error(ErrorKind::SolverFailure, "Prokhorov enumeration failed its definition check");
  }
  return best;
}

}  // namespace

ProkhorovOracleResult d_prokhorov_oracle(const Measure& mu, const Measure& nu,
                                         const FiniteMetricSpace& x) {
  require_dims(mu, nu, x);
  if (x.size() > kProkhorovOracleMaxPoints) {
    throw Error(ErrorKind::TooLarge, "subset enumeration is limited to " +
                                         std::to_string(kProkhorovOracleMaxPoints) + " points");
  }
  ProkhorovOracleResult out;
  if (x.size() == 0) return out;
  const std::vector<double> critical =
      sorted_distinct(std::vector<double>(x.matrix().begin(), x.matrix().end()));
  out.mu_over_nu = prokhorov_one_sided(mu, nu, x, critical);
  out.nu_over_mu = prokhorov_one_sided(nu, mu, x, critical);
  if (std::abs(out.mu_over_nu - out.nu_over_mu) > 1e-9) {
    throw Error(ErrorKind::SolverFailure, "the two Prokhorov formulations disagree");
  }
  out.value = out.mu_over_nu;
  return out;
}

double ky_fan(const RealFunction& f, const RealFunction& g, const Measure& mu) {
  if (f.size() != g.size() || f.size() != mu.size()) {
    throw Error(ErrorKind::DimensionMismatch, "ky_fan arguments differ in size");
  }
  std::vector<std::pair<double, double>> dev;  // (|f - g|, mass)
  for (Index i = 0; i < f.size(); ++i) {
    if (mu[i] > 0.0) dev.emplace_back(std::abs(f[i] - g[i]), mu[i]);
  }
  std::sort(dev.begin(), dev.end());
  // Breakpoints 0 = b_0 < b_1 < ...; on [b_k, b_{k+1}) the tail mass
  // mu(|f - g| > eps) is constant.
  std::vector<double> breaks{0.0};
  for (const auto& [v, m] : dev)
    if (v > breaks.back()) breaks.push_back(v);
  auto tail = [&](double t) {
    double mass = 0.0;
    for (const auto& [v, m] : dev)
      if (v > t) mass += m;
    return mass;
  };
  for (std::size_t k = 0; k < breaks.size(); ++k) {
    const double upper =
        k + 1 < breaks.size() ? breaks[k + 1] : std::numeric_limits<double>::infinity();
    const double r = tail(breaks[k]);
    if (r < upper) return std::max(breaks[k], r);
  }
  return breaks.back();
}

double integral_gap(const RealFunction& f, const Measure& mu, const Measure& nu) {
  if (f.size() != mu.size() || f.size() != nu.size()) {
    throw Error(ErrorKind::DimensionMismatch, "function and measures differ in size");
  }
  double gap = 0.0;
  for (Index i = 0; i < f.size(); ++i) gap += f[i] * (mu[i] - nu[i]);
  return gap;
}

double invariance_equivalence_check(const Measure& mu, const Measure& nu,
                                    const FiniteMetricSpace& x,
                                    std::span<const RealFunction> family) {
  require_dims(mu, nu, x);
  double best = 0.0;
  for (std::size_t t = 0; t < family.size(); ++t) {
    const RealFunction& f = family[t];
    if (f.size() != x.size()) throw Error(ErrorKind::DimensionMismatch, "family member has wrong size");
    if (f.sup_norm() > 1.0 + kMassTol || !is_lipschitz(f, x, 1.0)) {
      throw Error(ErrorKind::BadFamily, "member " + std::to_string(t) + " is not in Lip_1^1");
    }
    best = std::max(best, std::abs(integral_gap(f, mu, nu)));
  }
  return best;
}

}  // namespace mmconc
