#include "mmconc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mmconc/parallel.hpp"
#include "mmconc/rng.hpp"

namespace mmconc {

FlowInstance::FlowInstance(FiniteGroup group, FiniteMetricSpace space,
                           std::vector<std::vector<Index>> action)
    : group_(std::move(group)), space_(std::move(space)) {
  const std::size_t order = group_.order();
  const std::size_t n = space_.size();
  if (action.size() != order) throw Error(ErrorKind::DimensionMismatch, "one action row per group element");
  action_.resize(order * n);
  for (Index g = 0; g < order; ++g) {
    if (action[g].size() != n) throw Error(ErrorKind::DimensionMismatch, "action row has the wrong length");
    std::vector<bool> seen(n, false);
    for (Index x = 0; x < n; ++x) {
      const Index y = action[g][x];
      if (y >= n) throw Error(ErrorKind::BadPoint, "action sends a point outside the space");
      if (seen[y]) throw Error(ErrorKind::InvalidArgument, "element " + group_.labels()[g] + " does not act bijectively");
      seen[y] = true;
      action_[g * n + x] = y;
    }
  }
  for (Index x = 0; x < n; ++x) {
    if (act(group_.identity(), x) != x) throw Error(ErrorKind::InvalidArgument, "the identity moves a point");
  }
  auto compatible = [&](Index g, Index h, Index x) {
    return act(g, act(h, x)) == act(group_.mul(g, h), x);
  };
  if (order * order * n <= kFullCheckLimit) {
    for (Index g = 0; g < order; ++g)
      for (Index h = 0; h < order; ++h)
        for (Index x = 0; x < n; ++x)
          if (!compatible(g, h, x)) {
            throw Error(ErrorKind::InvalidArgument, "g(hx) != (gh)x for g = " + group_.labels()[g] +
                                                        ", h = " + group_.labels()[h]);
          }
  } else {
    Rng rng(0x5eed);
    for (std::size_t t = 0; t < 200000; ++t) {
      if (!compatible(rng.below(order), rng.below(order), rng.below(n))) {
        throw Error(ErrorKind::InvalidArgument, "table is not a group action");
      }
    }
  }
}

std::vector<std::vector<Index>> FlowInstance::action_table() const {
  const std::size_t n = space_.size();
  std::vector<std::vector<Index>> out(group_.order(), std::vector<Index>(n));
  for (Index g = 0; g < group_.order(); ++g)
    for (Index x = 0; x < n; ++x) out[g][x] = act(g, x);
  return out;
}

FlowInstance regular_flow(const FiniteGroup& group, const FiniteMetricSpace& metric) {
  std::vector<std::vector<Index>> action(group.order(), std::vector<Index>(group.order()));
  for (Index g = 0; g < group.order(); ++g)
    for (Index x = 0; x < group.order(); ++x) action[g][x] = group.mul(g, x);
  return FlowInstance(group, metric, std::move(action));
}

FlowInstance coset_flow(const FiniteGroup& group, const RightInvariantMetric& metric,
                        std::span<const Index> generators) {
  const std::size_t order = group.order();
  // Subgroup generated by the generators: closure under right multiplication.
  std::vector<bool> in_h(order, false);
  std::vector<Index> h{group.identity()};
  in_h[group.identity()] = true;
  for (Index s : generators) group.check_element(s);
  for (std::size_t k = 0; k < h.size(); ++k) {
    for (Index s : generators) {
      const Index next = group.mul(h[k], s);
      if (!in_h[next]) {
        in_h[next] = true;
        h.push_back(next);
      }
    }
  }
  std::sort(h.begin(), h.end());
  // Coset of a is a·H; its representative is the smallest element.
  std::vector<Index> coset_of(order, order);
  std::vector<Index> reps;
  for (Index a = 0; a < order; ++a) {
    if (coset_of[a] != order) continue;
    for (Index k : h) coset_of[group.mul(a, k)] = reps.size();
    reps.push_back(a);
  }
  const std::size_t m = reps.size();
  std::vector<double> dist(m * m, 0.0);
  std::vector<std::string> labels(m);
  for (Index i = 0; i < m; ++i) {
    labels[i] = group.labels()[reps[i]] + "H";
    for (Index j = 0; j < m; ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (Index k : h) best = std::min(best, metric.base()(group.mul(reps[i], k), reps[j]));
      dist[i * m + j] = best;
    }
  }
  // Symmetrize against rounding; the quotient formula is symmetric in exact arithmetic.
  for (Index i = 0; i < m; ++i)
    for (Index j = i + 1; j < m; ++j) dist[j * m + i] = dist[i * m + j];
  std::vector<std::vector<Index>> action(order, std::vector<Index>(m));
  for (Index g = 0; g < order; ++g)
    for (Index i = 0; i < m; ++i) action[g][i] = coset_of[group.mul(g, reps[i])];
  return FlowInstance(group, FiniteMetricSpace(std::move(labels), std::move(dist)), std::move(action));
}

FlowInstance trivial_flow(const FiniteGroup& group, const FiniteMetricSpace& space) {
  std::vector<std::vector<Index>> action(group.order(), std::vector<Index>(space.size()));
  for (auto& row : action)
    for (Index x = 0; x < space.size(); ++x) row[x] = x;
  return FlowInstance(group, space, std::move(action));
}

FlowInstance cycle_with_apex_flow(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "cycle needs at least two points");
  const FiniteMetricSpace cycle = cyclic_geodesic_space(n, false);
  const std::size_t m = n + 1;
  // Half the cycle diameter, at least 1, keeps the triangle inequality.
  const double apex = std::max(1.0, static_cast<double>(n / 2) / 2.0);
  std::vector<double> dist(m * m, 0.0);
  std::vector<std::string> labels(m);
  for (Index a = 0; a < m; ++a) {
    labels[a] = a < n ? "c" + std::to_string(a) : "apex";
    for (Index b = 0; b < m; ++b) {
      if (a == b) continue;
      dist[a * m + b] = a < n && b < n ? cycle(a, b) : apex;
    }
  }
  const FiniteGroup group = FiniteGroup::cyclic(n);
  std::vector<std::vector<Index>> action(n, std::vector<Index>(m));
  for (Index g = 0; g < n; ++g) {
    for (Index x = 0; x < n; ++x) action[g][x] = (g + x) % n;
    action[g][n] = n;
  }
  return FlowInstance(group, FiniteMetricSpace(std::move(labels), std::move(dist)), std::move(action));
}

FiniteMetricSpace d_Gx(const FlowInstance& flow, Index x) {
  if (x >= flow.space().size()) throw Error(ErrorKind::BadPoint, "point " + std::to_string(x) + " is not in the space");
  const std::size_t order = flow.group().order();
  std::vector<double> dist(order * order);
  for (Index g = 0; g < order; ++g)
    for (Index h = 0; h < order; ++h) dist[g * order + h] = flow.space()(flow.act(g, x), flow.act(h, x));
  return FiniteMetricSpace(flow.group().labels(), std::move(dist), true);
}

RightInvariantMetric d_GX(const FlowInstance& flow) {
  const std::size_t order = flow.group().order();
  std::vector<double> dist(order * order, 0.0);
  for (Index x = 0; x < flow.space().size(); ++x)
    for (Index g = 0; g < order; ++g)
      for (Index h = 0; h < order; ++h)
        dist[g * order + h] = std::max(dist[g * order + h], flow.space()(flow.act(g, x), flow.act(h, x)));
  return RightInvariantMetric(flow.group(), FiniteMetricSpace(flow.group().labels(), std::move(dist), true));
}

double avg_orbit_displacement(const FlowInstance& flow, const Measure& nu, std::span<const Index> e) {
  if (e.empty()) throw Error(ErrorKind::EmptySet, "E must be non-empty");
  if (nu.size() != flow.space().size()) throw Error(ErrorKind::DimensionMismatch, "measure and space differ in size");
  for (Index g : e) flow.group().check_element(g);
  double total = 0.0;
  for (Index x = 0; x < nu.size(); ++x) {
    if (nu[x] == 0.0) continue;
    double worst = 0.0;
    for (Index g : e) worst = std::max(worst, flow.space()(x, flow.act(g, x)));
    total += nu[x] * worst;
  }
  return total;
}

Measure haar_average(const FlowInstance& flow, const Measure& nu0) {
  const std::size_t n = flow.space().size();
  if (nu0.size() != n) throw Error(ErrorKind::DimensionMismatch, "measure and space differ in size");
  std::vector<Index> orbit_id(n, n);
  std::vector<double> weights(n, 0.0);
  for (Index x = 0; x < n; ++x) {
    if (orbit_id[x] != n) continue;
    std::vector<Index> orbit;
    for (Index g = 0; g < flow.group().order(); ++g) {
      const Index y = flow.act(g, x);
      if (orbit_id[y] == n) {
        orbit_id[y] = x;
        orbit.push_back(y);
      }
    }
    double mass = 0.0;
    for (Index y : orbit) mass += nu0[y];
    const double each = mass / static_cast<double>(orbit.size());
    for (Index y : orbit) weights[y] = each;
  }
  return Measure::normalized(std::move(weights));
}

double flow_invariance_gap(const FlowInstance& flow, const Measure& nu) {
  if (nu.size() != flow.space().size()) throw Error(ErrorKind::DimensionMismatch, "measure and space differ in size");
  double gap = 0.0;
  for (Index g = 0; g < flow.group().order(); ++g)
    for (Index x = 0; x < nu.size(); ++x) gap = std::max(gap, std::abs(nu[flow.act(g, x)] - nu[x]));
  return gap;
}

OrbitBoundReport verify_orbit_bound(const FlowInstance& flow, std::span<const Measure> measures,
                               const Measure& nu, std::span<const Index> e,
                               const OrbitBoundOptions& options) {
  if (measures.empty()) throw Error(ErrorKind::InvalidArgument, "the measure sequence is empty");
  if (options.alphas.empty()) throw Error(ErrorKind::InvalidArgument, "the alpha grid is empty");
  for (double a : options.alphas) {
    if (!(a > 0.0)) throw Error(ErrorKind::InvalidArgument, "alphas must be positive");
  }
  if (!(options.tail_fraction > 0.0 && options.tail_fraction <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "tail fraction must be in (0, 1]");
  }
  const FiniteGroup& group = flow.group();
  for (const Measure& mu : measures) {
    if (mu.size() != group.order()) throw Error(ErrorKind::DimensionMismatch, "measures must live on the group");
  }
  if (flow_invariance_gap(flow, nu) > options.invariance_tol) {
    throw Error(ErrorKind::NotInvariant, "nu is not invariant under the action");
  }

  OrbitBoundReport report;
  report.lhs = avg_orbit_displacement(flow, nu, e);

  // Points with identical d_{G,x} share their ObsDiam values.
  std::vector<FiniteMetricSpace> metrics;
  {
    std::map<std::vector<double>, std::size_t> seen;
    for (Index x = 0; x < flow.space().size(); ++x) {
      FiniteMetricSpace d = d_Gx(flow, x);
      if (seen.emplace(d.matrix(), metrics.size()).second) metrics.push_back(std::move(d));
    }
  }
  const std::size_t count = measures.size();
  const std::size_t na = options.alphas.size();
  const std::size_t nm = metrics.size();
  std::vector<double> values(count * na * nm, 0.0);
  std::vector<char> exact(count * na * nm, 0);
  ObsDiamOptions obs = options.obs;
  obs.use_oracle = options.use_oracle;
  parallel_for(values.size(), options.threads, [&](std::size_t k) {
    const std::size_t i = k / (na * nm);
    const std::size_t a = (k / nm) % na;
    const std::size_t u = k % nm;
    const ObsDiamReport r = obs_diam(MmSpace(metrics[u], measures[i]), options.alphas[a], obs);
    values[k] = r.best_value();
    exact[k] = r.certified();
  });

  report.tail_start = count - static_cast<std::size_t>(
                                  std::ceil(options.tail_fraction * static_cast<double>(count)));
  report.tail_start = std::min(report.tail_start, count - 1);
  report.series.assign(na, std::vector<double>(count, 0.0));
  report.certified = true;
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t i = 0; i < count; ++i) {
      double worst = 0.0;
      for (std::size_t u = 0; u < nm; ++u) {
        const std::size_t k = (i * na + a) * nm + u;
        worst = std::max(worst, values[k]);
        if (i >= report.tail_start && !exact[k]) report.certified = false;
      }
      report.series[a][i] = worst;
    }
    double tail_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = report.tail_start; i < count; ++i) tail_min = std::min(tail_min, report.series[a][i]);
    if (a == 0 || tail_min > report.rhs) {
      report.rhs = tail_min;
      report.alpha_star = options.alphas[a];
    }
  }
  report.holds = report.lhs <= report.rhs + options.tol;

  const RightInvariantMetric dgx = d_GX(flow);
  report.defects.assign(count, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    const std::vector<double> per_g = invariance_defects(measures[i], group, dgx, options.threads);
    report.defects[i] = *std::max_element(per_g.begin(), per_g.end());
  }
  return report;
}

FixedPointCandidate least_displaced_point(const FlowInstance& flow) {
  FixedPointCandidate best;
  best.value = std::numeric_limits<double>::infinity();
  for (Index x = 0; x < flow.space().size(); ++x) {
    double worst = 0.0;
    for (Index g = 0; g < flow.group().order(); ++g) worst = std::max(worst, flow.space()(x, flow.act(g, x)));
    if (worst < best.value) {
      best.value = worst;
      best.x0 = x;
    }
  }
  if (flow.space().size() == 0) best.value = 0.0;
  return best;
}

}  // namespace mmconc
