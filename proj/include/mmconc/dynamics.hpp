#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmconc/concentration.hpp"
#include "mmconc/core.hpp"
#include "mmconc/groups.hpp"

namespace mmconc {

/// A finite group acting on a finite metric space by permutations.
/// action(g, action(h, x)) = action(g·h, x) is checked exhaustively when
/// |G|^2·|X| is at most kFullCheckLimit and on samples above.
class FlowInstance {
 public:
  static constexpr std::size_t kFullCheckLimit = 1000000;

  FlowInstance(FiniteGroup group, FiniteMetricSpace space, std::vector<std::vector<Index>> action);

  const FiniteGroup& group() const noexcept { return group_; }
  const FiniteMetricSpace& space() const noexcept { return space_; }
  Index act(Index g, Index x) const noexcept { return action_[g * space_.size() + x]; }
  std::vector<std::vector<Index>> action_table() const;

 private:
  FiniteGroup group_;
  FiniteMetricSpace space_;
  std::vector<Index> action_;
};

/// G acting on itself by left multiplication, with the group's metric.
FlowInstance regular_flow(const FiniteGroup& group, const FiniteMetricSpace& metric);
/// G acting on the left cosets gH of the subgroup generated by `generators`,
/// with d(aH, bH) = min over k in H of d(ak, b) for the right-invariant d.
FlowInstance coset_flow(const FiniteGroup& group, const RightInvariantMetric& metric,
                        std::span<const Index> generators);
/// Every element fixes every point.
FlowInstance trivial_flow(const FiniteGroup& group, const FiniteMetricSpace& space);
/// Z_n rotating an n-cycle (unit geodesic) plus one fixed apex point at
/// distance max(1, floor(n/2)/2) from every cycle point: two orbits, one of
/// them a fixed point.
FlowInstance cycle_with_apex_flow(std::size_t n);

/// d_{G,x}(g, h) = d(gx, hx); a pseudo-metric on G. Throws BadPoint.
FiniteMetricSpace d_Gx(const FlowInstance& flow, Index x);
/// d_{G,X} = max over x of d_{G,x}; right-invariant by construction (checked).
RightInvariantMetric d_GX(const FlowInstance& flow);

/// sum over x of nu(x) · max over g in E of d(x, gx). Throws EmptySet on empty E.
double avg_orbit_displacement(const FlowInstance& flow, const Measure& nu, std::span<const Index> e);

/// (1/|G|) sum over g of g_* nu0, computed per orbit as nu0(orbit) / |orbit|,
/// so points of one orbit get bit-identical weights.
Measure haar_average(const FlowInstance& flow, const Measure& nu0);

/// Largest |nu(gx) - nu(x)|.
double flow_invariance_gap(const FlowInstance& flow, const Measure& nu);

struct OrbitBoundOptions {
  std::vector<double> alphas{0.5, 0.2, 0.1, 0.05, 0.02};
  /// The last ceil(tail_fraction · count) measures stand in for the liminf.
  double tail_fraction = 0.5;
  bool use_oracle = true;
  double tol = 1e-7;
  /// nu counts as invariant when flow_invariance_gap is at most this.
  double invariance_tol = 1e-12;
  ObsDiamOptions obs;
  std::size_t threads = 1;
};

struct OrbitBoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double alpha_star = 0.0;
  /// Every ObsDiam value entering rhs is exact (oracle or closed form).
  bool certified = false;
  /// lhs <= rhs + tol. A failure only refutes the inequality when certified.
  bool holds = true;
  std::size_t tail_start = 0;
  /// series[a][i] = max over x of ObsDiam(G, d_{G,x}, mu_i; -alphas[a]).
  std::vector<std::vector<double>> series;
  /// Per i: max over g of the invariance defect of mu_i under d_{G,X}.
  std::vector<double> defects;

  bool violated() const noexcept { return certified && !holds; }
};

/// Finite check of  int sup_{g in E} d(x, gx) dnu  <=  sup_alpha liminf_i
/// sup_x ObsDiam(G, d_{G,x}, mu_i; -alpha). Throws NotInvariant if nu is not
/// G-invariant.
OrbitBoundReport verify_orbit_bound(const FlowInstance& flow, std::span<const Measure> measures,
                               const Measure& nu, std::span<const Index> e,
                               const OrbitBoundOptions& options = {});

struct FixedPointCandidate {
  Index x0 = 0;
  /// max over g of d(x0, g x0)
  double value = 0.0;
};

/// Point minimizing the largest displacement (first minimizer).
FixedPointCandidate least_displaced_point(const FlowInstance& flow);

}  // namespace mmconc
