#include "bgx/maxflow.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "bgx/errors.hpp"

namespace bgx {

MaxFlow::MaxFlow(std::size_t nodes)
    : nodes_(nodes), source_(nodes), sink_(nodes + 1), adjacency_(nodes + 2), sink_side_(nodes, 0) {}

void MaxFlow::push_edge(std::size_t u, std::size_t v, double cap, double rev_cap) {
  if (!(cap >= 0.0) || !(rev_cap >= 0.0)) throw InvalidArgument("capacities must be non-negative");
  adjacency_[u].push_back(edges_.size());
  edges_.push_back({v, cap});
  adjacency_[v].push_back(edges_.size());
  edges_.push_back({u, rev_cap});
  max_cap_ = std::max({max_cap_, cap, rev_cap});
}

void MaxFlow::add_terminal(std::size_t node, double source_cap, double sink_cap) {
  if (source_cap > 0.0) push_edge(source_, node, source_cap, 0.0);
  if (sink_cap > 0.0) push_edge(node, sink_, sink_cap, 0.0);
}

void MaxFlow::add_edge(std::size_t u, std::size_t v, double forward, double backward) {
  if (forward > 0.0 || backward > 0.0) push_edge(u, v, forward, backward);
}

bool MaxFlow::build_levels(double eps) {
  level_.assign(nodes_ + 2, -1);
  std::deque<std::size_t> queue{source_};
  level_[source_] = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t e : adjacency_[u]) {
      const Edge& edge = edges_[e];
      if (edge.cap > eps && level_[edge.to] < 0) {
        level_[edge.to] = level_[u] + 1;
        queue.push_back(edge.to);
      }
    }
  }
  return level_[sink_] >= 0;
}

double MaxFlow::solve() {
  const double eps = max_cap_ * 1e-12;
  double total = 0.0;
  std::vector<std::size_t> next(nodes_ + 2);
  std::vector<std::size_t> path;

  while (build_levels(eps)) {
    std::fill(next.begin(), next.end(), 0);
    for (;;) {
      // Depth-first search for one augmenting path along increasing levels.
      path.clear();
      std::size_t u = source_;
      while (u != sink_) {
        bool advanced = false;
        auto& adj = adjacency_[u];
        for (; next[u] < adj.size(); ++next[u]) {
          const Edge& edge = edges_[adj[next[u]]];
          if (edge.cap > eps && level_[edge.to] == level_[u] + 1) {
            path.push_back(adj[next[u]]);
            u = edge.to;
            advanced = true;
            break;
          }
        }
        if (advanced) continue;
        level_[u] = -1;
        if (path.empty()) break;
        u = edges_[path.back() ^ 1].to;
        path.pop_back();
        ++next[u];
      }
      if (u != sink_) break;

      double bottleneck = std::numeric_limits<double>::infinity();
      for (std::size_t e : path) bottleneck = std::min(bottleneck, edges_[e].cap);
      for (std::size_t e : path) {
        edges_[e].cap -= bottleneck;
        edges_[e ^ 1].cap += bottleneck;
      }
      total += bottleneck;
    }
  }

  // Nodes that still reach the sink through residual capacity.
  std::vector<unsigned char> reach(nodes_ + 2, 0);
  std::deque<std::size_t> queue{sink_};
  reach[sink_] = 1;
  while (!queue.empty()) {
    const std::size_t x = queue.front();
    queue.pop_front();
    for (std::size_t e : adjacency_[x]) {
      const std::size_t y = edges_[e].to;
      if (!reach[y] && edges_[e ^ 1].cap > eps) {
        reach[y] = 1;
        queue.push_back(y);
      }
    }
  }
  std::copy(reach.begin(), reach.begin() + static_cast<std::ptrdiff_t>(nodes_), sink_side_.begin());
  return total;
}

}  // namespace bgx
