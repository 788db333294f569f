#include "mmconc/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mmconc {

namespace {

constexpr double kReducedCostTol = 1e-12;
constexpr double kFeasTol = 1e-9;

/// Spanning-tree state of the network simplex over the support of the
/// signed mass. Local node m is the ground node. Arcs run from every source
/// to every sink and through the ground node; with metric costs a path
/// through any other node is never cheaper than its direct arc, so the
/// remaining arcs of the complete graph are redundant.
class NetworkSimplex {
 public:
  NetworkSimplex(std::span<const double> supply, std::vector<Index> sources,
                 std::vector<Index> sinks, const FiniteMetricSpace& x)
      : x_(x),
        sources_(std::move(sources)),
        sinks_(std::move(sinks)),
        m_(sources_.size() + sinks_.size()),
        root_(m_),
        parent_(m_ + 1, root_),
        up_(m_ + 1, false),
        flow_(m_ + 1, 0.0),
        depth_(m_ + 1, 0),
        potential_(m_ + 1, 0.0) {
    points_.reserve(m_);
    points_.insert(points_.end(), sources_.begin(), sources_.end());
    points_.insert(points_.end(), sinks_.begin(), sinks_.end());
    // Initial tree: every node hangs off the ground node, sources with an
    // upward arc and sinks with a downward one.
    for (Index v = 0; v < m_; ++v) {
      up_[v] = v < sources_.size();
      flow_[v] = std::abs(supply[points_[v]]);
    }
    num_arcs_ = sources_.size() * sinks_.size() + m_;
    block_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(static_cast<double>(num_arcs_))));
    rebuild();
  }

  std::size_t run() {
    const std::size_t cap = 50 * num_arcs_ + 100000;
    std::size_t pivots = 0;
    while (true) {
      Index k = 0;
      Index l = 0;
      if (!price(k, l)) return pivots;
      if (++pivots > cap) throw Error(ErrorKind::SolverFailure, "network simplex iteration cap reached");
      pivot(k, l);
    }
  }

  /// Potential of source or sink `v` (local index).
  double potential(Index v) const { return potential_[v]; }
  const std::vector<Index>& points() const { return points_; }
  std::size_t num_sources() const { return sources_.size(); }

  double tree_cost() const {
    double total = 0.0;
    for (Index v = 0; v < m_; ++v) {
      total += flow_[v] * (up_[v] ? cost(v, parent_[v]) : cost(parent_[v], v));
    }
    return total;
  }

  double min_flow() const {
    double lo = 0.0;
    for (Index v = 0; v < m_; ++v) lo = std::min(lo, flow_[v]);
    return lo;
  }

 private:
  double cost(Index u, Index w) const {
    return (u == root_ || w == root_) ? 1.0 : x_(points_[u], points_[w]);
  }

  /// Arc number a as (tail, head) in local indices.
  void arc(std::size_t a, Index& tail, Index& head) const {
    const std::size_t pairs = sources_.size() * sinks_.size();
    if (a < pairs) {
      tail = a / sinks_.size();
      head = sources_.size() + a % sinks_.size();
    } else if (a < pairs + sources_.size()) {
      tail = a - pairs;
      head = root_;
    } else {
      tail = root_;
      head = sources_.size() + (a - pairs - sources_.size());
    }
  }

  // Block search pricing: scan arcs cyclically from where the last search
  // stopped and take the most negative reduced cost of the first block that
  // has one.
  bool price(Index& k, Index& l) {
    double best = -kReducedCostTol;
    bool found = false;
    std::size_t in_block = 0;
    for (std::size_t scanned = 0; scanned < num_arcs_; ++scanned) {
      Index u = 0;
      Index w = 0;
      arc(next_arc_, u, w);
      next_arc_ = next_arc_ + 1 == num_arcs_ ? 0 : next_arc_ + 1;
      const double rc = cost(u, w) - potential_[u] + potential_[w];
      if (rc < best) {
        best = rc;
        k = u;
        l = w;
        found = true;
      }
      if (++in_block == block_) {
        if (found) return true;
        in_block = 0;
      }
    }
    return found;
  }

  void pivot(Index k, Index l) {
    // Tree paths from k and l up to their join node.
    std::vector<Index>& path_k = path_k_;
    std::vector<Index>& path_l = path_l_;
    path_k.clear();
    path_l.clear();
    Index a = k;
    Index b = l;
    while (depth_[a] > depth_[b]) {
      path_k.push_back(a);
      a = parent_[a];
    }
    while (depth_[b] > depth_[a]) {
      path_l.push_back(b);
      b = parent_[b];
    }
    while (a != b) {
      path_k.push_back(a);
      path_l.push_back(b);
      a = parent_[a];
      b = parent_[b];
    }

    // Cycle orientation follows the entering arc k -> l. Traversal from the
    // join: down to k, across k -> l, up from l. On the k side an upward tree
    // arc opposes the orientation; on the l side a downward one does. The
    // last blocking arc in traversal order leaves, which keeps the tree
    // strongly feasible.
    double theta = std::numeric_limits<double>::infinity();
    Index leaving = root_;
    bool leaving_on_k_side = false;
    for (auto it = path_k.rbegin(); it != path_k.rend(); ++it) {
      const Index v = *it;
      if (up_[v] && flow_[v] <= theta) {
        theta = flow_[v];
        leaving = v;
        leaving_on_k_side = true;
      }
    }
    for (Index v : path_l) {
      if (!up_[v] && flow_[v] <= theta) {
        theta = flow_[v];
        leaving = v;
        leaving_on_k_side = false;
      }
    }
    if (leaving == root_) throw Error(ErrorKind::SolverFailure, "transshipment is unbounded");

    for (Index v : path_k) flow_[v] += up_[v] ? -theta : theta;
    for (Index v : path_l) flow_[v] += up_[v] ? theta : -theta;
    flow_[leaving] = 0.0;

    // Re-hang the subtree below the leaving arc from the entering arc,
    // reversing parent pointers between the entering endpoint and `leaving`.
    const Index start = leaving_on_k_side ? k : l;
    const Index new_parent = leaving_on_k_side ? l : k;
    const bool new_up = leaving_on_k_side;  // k -> l points to the parent when k is the child
    Index v = start;
    Index prev = new_parent;
    bool prev_up = new_up;
    double prev_flow = theta;
    while (true) {
      const Index old_parent = parent_[v];
      const bool old_up = up_[v];
      const double old_flow = flow_[v];
      parent_[v] = prev;
      up_[v] = prev_up;
      flow_[v] = prev_flow;
      if (v == leaving) break;
      prev = v;
      prev_up = !old_up;
      prev_flow = old_flow;
      v = old_parent;
    }
    rebuild();
  }

  void rebuild() {
    const std::size_t total = m_ + 1;
    children_start_.assign(total + 1, 0);
    for (Index v = 0; v < m_; ++v) ++children_start_[parent_[v] + 1];
    for (std::size_t i = 0; i < total; ++i) children_start_[i + 1] += children_start_[i];
    children_.assign(m_, 0);
    fill_.assign(children_start_.begin(), children_start_.end() - 1);
    for (Index v = 0; v < m_; ++v) children_[fill_[parent_[v]]++] = v;

    order_.clear();
    order_.push_back(root_);
    depth_[root_] = 0;
    potential_[root_] = 0.0;
    for (std::size_t head = 0; head < order_.size(); ++head) {
      const Index u = order_[head];
      for (std::size_t c = children_start_[u]; c < children_start_[u + 1]; ++c) {
        const Index w = children_[c];
        depth_[w] = depth_[u] + 1;
        // Tree arcs are tight: y_tail - y_head = cost(tail, head).
        potential_[w] = up_[w] ? potential_[u] + cost(w, u) : potential_[u] - cost(u, w);
        order_.push_back(w);
      }
    }
    if (order_.size() != total) throw Error(ErrorKind::SolverFailure, "spanning tree became disconnected");
  }

  const FiniteMetricSpace& x_;
  std::vector<Index> sources_;
  std::vector<Index> sinks_;
  std::vector<Index> points_;
  std::size_t m_;
  Index root_;
  std::size_t num_arcs_ = 0;
  std::size_t block_ = 0;
  std::size_t next_arc_ = 0;
  std::vector<Index> parent_;
  std::vector<bool> up_;
  std::vector<double> flow_;
  std::vector<std::size_t> depth_;
  std::vector<double> potential_;
  std::vector<std::size_t> children_start_;
  std::vector<std::size_t> fill_;
  std::vector<Index> children_;
  std::vector<Index> order_;
  std::vector<Index> path_k_;
  std::vector<Index> path_l_;
};

}  // namespace

BoundedLipschitzSolution solve_bounded_lipschitz(std::span<const double> signed_mass,
                                                 const FiniteMetricSpace& x) {
  const std::size_t n = x.size();
  if (signed_mass.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "signed mass has " + std::to_string(signed_mass.size()) +
                                                  " entries, space has " + std::to_string(n));
  }
  double total = 0.0;
  bool all_zero = true;
  for (double c : signed_mass) {
    total += c;
    all_zero = all_zero && c == 0.0;
  }
  if (std::abs(total) > kMassTol) {
    throw Error(ErrorKind::InvalidArgument, "signed mass must sum to zero");
  }
  BoundedLipschitzSolution out;
  out.witness.assign(n, 0.0);
  if (all_zero) return out;

  std::vector<Index> sources;
  std::vector<Index> sinks;
  for (Index i = 0; i < n; ++i) {
    if (signed_mass[i] > 0.0) sources.push_back(i);
    if (signed_mass[i] < 0.0) sinks.push_back(i);
  }
  NetworkSimplex solver(signed_mass, sources, sinks, x);
  out.pivots = solver.run();

  // The tree potentials only satisfy the constraints of the arcs present.
  // Their transform through the sinks and the ground node,
  //   f(x) = min(1, min_t f_t + d(x, t)),
  // is 1-Lipschitz with |f| <= 1 everywhere, rises on sources and falls on
  // sinks, so it is optimal for the full program.
  std::vector<double> sink_potential(sinks.size());
  for (std::size_t t = 0; t < sinks.size(); ++t) sink_potential[t] = solver.potential(sources.size() + t);
  for (Index i = 0; i < n; ++i) {
    double f = 1.0;
    const auto row = x.row(i);
    for (std::size_t t = 0; t < sinks.size(); ++t) f = std::min(f, sink_potential[t] + row[sinks[t]]);
    out.witness[i] = f;
  }
  for (Index i = 0; i < n; ++i) {
    if (std::abs(out.witness[i]) > 1.0 + kFeasTol) {
      throw Error(ErrorKind::SolverFailure, "optimal potential leaves [-1, 1]");
    }
    for (Index j = 0; j < n; ++j) {
      if (out.witness[i] - out.witness[j] > x(i, j) + kFeasTol) {
        throw Error(ErrorKind::SolverFailure, "optimal potential breaks a Lipschitz constraint");
      }
    }
  }
  if (solver.min_flow() < -kFeasTol) throw Error(ErrorKind::SolverFailure, "negative flow in final tree");

  for (Index i = 0; i < n; ++i) out.value += out.witness[i] * signed_mass[i];
  out.primal_cost = solver.tree_cost();
  if (std::abs(out.primal_cost - out.value) > kFeasTol) {
    throw Error(ErrorKind::SolverFailure, "duality gap " + std::to_string(out.primal_cost - out.value));
  }
  return out;
}

}  // namespace mmconc
