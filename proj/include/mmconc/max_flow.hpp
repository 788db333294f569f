#pragma once

#include <cstddef>
#include <vector>

namespace mmconc {

/// Dinic's algorithm on real capacities. Augmenting steps below `eps` are
/// ignored so floating residue cannot loop forever.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes, double eps = 1e-15);

  void add_edge(std::size_t from, std::size_t to, double capacity);
  double run(std::size_t source, std::size_t sink);

  /// After run(): nodes reachable from the source in the residual graph,
  /// i.e. the source side of a minimum cut.
  std::vector<bool> source_side() const;

 private:
  struct Edge {
    std::size_t to;
    std::size_t rev;
    double cap;
  };

  bool bfs(std::size_t source, std::size_t sink);
  double dfs(std::size_t v, std::size_t sink, double pushed);

  std::vector<std::vector<Edge>> graph_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
  std::size_t source_ = 0;
  double eps_;
};

}  // namespace mmconc
