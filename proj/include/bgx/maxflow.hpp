#pragma once

#include <cstddef>
#include <vector>

namespace bgx {

/// s-t max-flow / min-cut (Dinic) with a fixed edge scan order, so the
/// returned cut is reproducible. Residual capacities below a relative
/// epsilon of the largest capacity count as saturated.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes);

  /// Adds source->node and node->sink capacities (either may be 0).
  void add_terminal(std::size_t node, double source_cap, double sink_cap);

  /// Adds node u -> v with capacity `forward` and v -> u with `backward`.
  void add_edge(std::size_t u, std::size_t v, double forward, double backward);

  double solve();

  /// After solve(): true when the node can still reach the sink in the
  /// residual graph, i.e. it lies in the smallest sink side of a min cut.
  bool on_sink_side(std::size_t node) const { return sink_side_[node] != 0; }

  std::size_t nodes() const { return nodes_; }

 private:
  struct Edge {
    std::size_t to;
    double cap;
  };

  void push_edge(std::size_t u, std::size_t v, double cap, double rev_cap);
  bool build_levels(double eps);

  std::size_t nodes_;
  std::size_t source_;
  std::size_t sink_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<int> level_;
  std::vector<unsigned char> sink_side_;
  double max_cap_ = 0.0;
};

}  // namespace bgx
