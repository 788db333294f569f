#include "mmconc/max_flow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace mmconc {

MaxFlow::MaxFlow(std::size_t nodes, double eps) : graph_(nodes), eps_(eps) {}

void MaxFlow::add_edge(std::size_t from, std::size_t to, double capacity) {
  graph_[from].push_back({to, graph_[to].size(), capacity});
  graph_[to].push_back({from, graph_[from].size() - 1, 0.0});
}

bool MaxFlow::bfs(std::size_t source, std::size_t sink) {
  level_.assign(graph_.size(), -1);
  std::queue<std::size_t> queue;
  level_[source] = 0;
  queue.push(source);
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop();
    for (const Edge& e : graph_[v]) {
      if (e.cap > eps_ && level_[e.to] < 0) {
        level_[e.to] = level_[v] + 1;
        queue.push(e.to);
      }
    }
  }
  return level_[sink] >= 0;
}

double MaxFlow::dfs(std::size_t v, std::size_t sink, double pushed) {
  if (v == sink) return pushed;
  for (std::size_t& i = iter_[v]; i < graph_[v].size(); ++i) {
    Edge& e = graph_[v][i];
    if (e.cap <= eps_ || level_[e.to] != level_[v] + 1) continue;
    const double got = dfs(e.to, sink, std::min(pushed, e.cap));
    if (got > eps_) {
      e.cap -= got;
      graph_[e.to][e.rev].cap += got;
      return got;
    }
  }
  return 0.0;
}

double MaxFlow::run(std::size_t source, std::size_t sink) {
  source_ = source;
  double total = 0.0;
  while (bfs(source, sink)) {
    iter_.assign(graph_.size(), 0);
    while (true) {
      const double got = dfs(source, sink, std::numeric_limits<double>::infinity());
      if (got <= eps_) break;
      total += got;
    }
  }
  return total;
}

std::vector<bool> MaxFlow::source_side() const {
  std::vector<bool> seen(graph_.size(), false);
  std::queue<std::size_t> queue;
  seen[source_] = true;
  queue.push(source_);
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop();
    for (const Edge& e : graph_[v]) {
      if (e.cap > eps_ && !seen[e.to]) {
        seen[e.to] = true;
        queue.push(e.to);
      }
    }
  }
  return seen;
}

}  // namespace mmconc
