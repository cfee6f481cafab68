#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "exposure/rng.hpp"

namespace exposure {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Immutable simple undirected graph in compressed sparse row form.
///
/// Neighbor lists are sorted, duplicate-free and loop-free. The flat edge
/// array stores each undirected edge once as (u, v) with u < v, which makes
/// a uniform edge draw O(1).
class Graph {
 public:
  Graph() = default;

  /// Drops self-loops and collapses parallel edges. Throws InputError when an
  /// endpoint is >= num_nodes.
  static Graph from_edges(std::span<const Edge> edges, std::size_t num_nodes);

  std::size_t num_nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  std::span<const NodeId> neighbors(NodeId v) const noexcept {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }
  std::vector<std::size_t> degrees() const;
  std::size_t max_degree() const noexcept;

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  bool has_edge(NodeId u, NodeId v) const noexcept;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::vector<Edge> edges_;
};

/// Immutable simple directed graph. An edge (u, v) means v follows u:
/// u is a friend of v, v is a follower of u.
class DiGraph {
 public:
  DiGraph() = default;

  static DiGraph from_edges(std::span<const Edge> edges, std::size_t num_nodes);

  std::size_t num_nodes() const noexcept { return out_offsets_.empty() ? 0 : out_offsets_.size() - 1; }
  std::size_t num_edges() const noexcept { return edges_.size(); }

  std::span<const NodeId> out_neighbors(NodeId v) const noexcept {
    return {out_adj_.data() + out_offsets_[v], out_adj_.data() + out_offsets_[v + 1]};
  }
  std::span<const NodeId> in_neighbors(NodeId v) const noexcept {
    return {in_adj_.data() + in_offsets_[v], in_adj_.data() + in_offsets_[v + 1]};
  }
  std::size_t out_degree(NodeId v) const noexcept { return out_offsets_[v + 1] - out_offsets_[v]; }
  std::size_t in_degree(NodeId v) const noexcept { return in_offsets_[v + 1] - in_offsets_[v]; }

  const std::vector<Edge>& edges() const noexcept { return edges_; }

 private:
  std::vector<std::size_t> out_offsets_, in_offsets_;
  std::vector<NodeId> out_adj_, in_adj_;
  std::vector<Edge> edges_;
};

enum class DirectedMode { node, friends, followers };

// Samplers. All throw InputError when their support is empty.

NodeId sample_uniform_node(std::size_t num_nodes, RngStream& rng);
inline NodeId sample_uniform_node(const Graph& g, RngStream& rng) {
  return sample_uniform_node(g.num_nodes(), rng);
}

/// Random end of a uniformly drawn edge: P(v) = d(v) / 2|E|.
NodeId sample_random_friend(const Graph& g, RngStream& rng);

/// Uniform neighbor of a uniform node. Isolated anchors are redrawn, up to
/// |V| attempts.
NodeId sample_friend_two_step(const Graph& g, RngStream& rng);

/// node: uniform; friends: edge source, P(v) ~ d_out(v);
/// followers: edge target, P(v) ~ d_in(v).
NodeId sample_directed(const DiGraph& g, DirectedMode mode, RngStream& rng);

struct WalkOptions {
  std::size_t burn_in = 0;  ///< 0 selects 10 * |V|
  std::size_t thin = 0;     ///< 0 selects |V|
};

/// Simple random walk from `start`; returns num_samples positions taken after
/// burn_in steps and then every thin steps. Explicit thin = 0 is rejected by
/// the overload taking raw counts.
std::vector<NodeId> random_walk_friends(const Graph& g, NodeId start, std::size_t burn_in,
                                        std::size_t thin, std::size_t num_samples, RngStream& rng);
std::vector<NodeId> random_walk_friends(const Graph& g, NodeId start, WalkOptions options,
                                        std::size_t num_samples, RngStream& rng);

/// 2|E| / |V| for undirected graphs, 0 when edgeless.
double average_degree(const Graph& g) noexcept;
/// |E| / |V|, the common mean of in- and out-degree.
double average_degree(const DiGraph& g) noexcept;

bool is_connected(const Graph& g);
bool is_bipartite(const Graph& g);

}  // namespace exposure
