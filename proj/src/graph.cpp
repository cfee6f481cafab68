#include "exposure/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <string>

#include "exposure/error.hpp"

namespace exposure {

namespace {

void check_endpoints(std::span<const Edge> edges, std::size_t num_nodes) {
  for (const auto& [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes) {
      throw InputError("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                       ") has an endpoint outside [0, " + std::to_string(num_nodes) + ")");
    }
  }
}

// Builds CSR arrays from a sorted, unique list of (source, target) arcs.
void build_csr(const std::vector<Edge>& arcs, std::size_t num_nodes, std::vector<std::size_t>& offsets,
               std::vector<NodeId>& adjacency) {
  offsets.assign(num_nodes + 1, 0);
  for (const auto& [u, v] : arcs) ++offsets[u + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  adjacency.resize(arcs.size());
  std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [u, v] : arcs) adjacency[cursor[u]++] = v;
}

}  // namespace

Graph Graph::from_edges(std::span<const Edge> edges, std::size_t num_nodes) {
  check_endpoints(edges, num_nodes);

  Graph g;
  g.edges_.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    g.edges_.emplace_back(u, v);
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());

  std::vector<Edge> arcs;
  arcs.reserve(2 * g.edges_.size());
  for (const auto& [u, v] : g.edges_) {
    arcs.emplace_back(u, v);
    arcs.emplace_back(v, u);
  }
  std::sort(arcs.begin(), arcs.end());
  build_csr(arcs, num_nodes, g.offsets_, g.adjacency_);
  return g;
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> d(num_nodes());
  for (std::size_t v = 0; v < d.size(); ++v) d[v] = degree(static_cast<NodeId>(v));
  return d;
}

std::size_t Graph::max_degree() const noexcept {
  std::size_t best = 0;
  for (std::size_t v = 0; v < num_nodes(); ++v) best = std::max(best, degree(static_cast<NodeId>(v)));
  return best;
}

bool Graph::has_edge(NodeId u, NodeId v) const noexcept {
  if (u >= num_nodes() || v >= num_nodes()) return false;
  auto nu = neighbors(u);
  return std::binary_search(nu.begin(), nu.end(), v);
}

DiGraph DiGraph::from_edges(std::span<const Edge> edges, std::size_t num_nodes) {
  check_endpoints(edges, num_nodes);

  DiGraph g;
  g.edges_.reserve(edges.size());
  for (const auto& [u, v] : edges) {
    if (u != v) g.edges_.emplace_back(u, v);
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());
  build_csr(g.edges_, num_nodes, g.out_offsets_, g.out_adj_);

  std::vector<Edge> reversed;
  reversed.reserve(g.edges_.size());
  for (const auto& [u, v] : g.edges_) reversed.emplace_back(v, u);
  std::sort(reversed.begin(), reversed.end());
  build_csr(reversed, num_nodes, g.in_offsets_, g.in_adj_);
  return g;
}

NodeId sample_uniform_node(std::size_t num_nodes, RngStream& rng) {
  if (num_nodes == 0) throw InputError("cannot sample a node from an empty graph");
  return static_cast<NodeId>(rng.index(num_nodes));
}

NodeId sample_random_friend(const Graph& g, RngStream& rng) {
  if (g.num_edges() == 0) throw InputError("cannot sample a random friend from an edgeless graph");
  const Edge& e = g.edges()[rng.index(g.num_edges())];
  return rng.coin() ? e.first : e.second;
}

NodeId sample_friend_two_step(const Graph& g, RngStream& rng) {
  if (g.num_edges() == 0) throw InputError("no node has a neighbor");
  const std::size_t n = g.num_nodes();
  for (std::size_t attempt = 0; attempt < n; ++attempt) {
    NodeId anchor = sample_uniform_node(g, rng);
    auto nb = g.neighbors(anchor);
    if (!nb.empty()) return nb[rng.index(nb.size())];
  }
  // Attempt budget exhausted: fall back to a uniform non-isolated anchor so
  // the operation stays total with the same conditional distribution.
  std::vector<NodeId> anchors;
  for (NodeId v = 0; v < n; ++v) {
    if (g.degree(v) > 0) anchors.push_back(v);
  }
  auto nb = g.neighbors(anchors[rng.index(anchors.size())]);
  return nb[rng.index(nb.size())];
}

NodeId sample_directed(const DiGraph& g, DirectedMode mode, RngStream& rng) {
  if (mode == DirectedMode::node) return sample_uniform_node(g.num_nodes(), rng);
  if (g.num_edges() == 0) throw InputError("cannot sample friends or followers from an edgeless graph");
  const Edge& e = g.edges()[rng.index(g.num_edges())];
  return mode == DirectedMode::friends ? e.first : e.second;
}

std::vector<NodeId> random_walk_friends(const Graph& g, NodeId start, std::size_t burn_in,
                                        std::size_t thin, std::size_t num_samples, RngStream& rng) {
  if (start >= g.num_nodes()) throw InputError("walk start is not a node of the graph");
  if (g.degree(start) == 0) throw InputError("walk start is isolated");
  if (thin == 0) throw InputError("walk thinning interval must be at least 1");

  std::vector<NodeId> out;
  out.reserve(num_samples);
  NodeId at = start;
  auto step = [&] {
    auto nb = g.neighbors(at);
    at = nb[rng.index(nb.size())];
  };
  for (std::size_t i = 0; i < burn_in; ++i) step();
  for (std::size_t s = 0; s < num_samples; ++s) {
    if (s > 0) {
      for (std::size_t i = 0; i < thin; ++i) step();
    }
    out.push_back(at);
  }
  return out;
}

std::vector<NodeId> random_walk_friends(const Graph& g, NodeId start, WalkOptions options,
                                        std::size_t num_samples, RngStream& rng) {
  const std::size_t n = g.num_nodes();
  std::size_t burn_in = options.burn_in ? options.burn_in : 10 * n;
  std::size_t thin = options.thin ? options.thin : std::max<std::size_t>(n, 1);
  return random_walk_friends(g, start, burn_in, thin, num_samples, rng);
}

double average_degree(const Graph& g) noexcept {
  if (g.num_nodes() == 0) return 0.0;
  return 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(g.num_nodes());
}

double average_degree(const DiGraph& g) noexcept {
  if (g.num_nodes() == 0) return 0.0;
  return static_cast<double>(g.num_edges()) / static_cast<double>(g.num_nodes());
}

bool is_connected(const Graph& g) {
  const std::size_t n = g.num_nodes();
  if (n <= 1) return true;
  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (NodeId w : g.neighbors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == n;
}

bool is_bipartite(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<int> side(n, -1);
  std::queue<NodeId> queue;
  for (NodeId root = 0; root < n; ++root) {
    if (side[root] != -1) continue;
    side[root] = 0;
    queue.push(root);
    while (!queue.empty()) {
      NodeId v = queue.front();
      queue.pop();
      for (NodeId w : g.neighbors(v)) {
        if (side[w] == -1) {
          side[w] = 1 - side[v];
          queue.push(w);
        } else if (side[w] == side[v]) {
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace exposure
