#include "exposure/genmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_set>

#include "exposure/error.hpp"

namespace exposure {

namespace {

std::uint64_t edge_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Moments of the degree at an edge end, over both orientations. Rewiring
// leaves `mean` and `second` fixed and only moves the cross term.
struct EdgeDegreeMoments {
  double arcs = 0;       // 2|E|
  double mean = 0;       // E[d]
  double second = 0;     // E[d^2]
  double variance() const { return second - mean * mean; }

  std::optional<double> coefficient(double cross_sum) const {
    const double var = variance();
    if (arcs == 0 || !(var > 1e-12 * std::max(1.0, second))) return std::nullopt;
    // E[d_u d_v] over arcs = 2 * cross_sum / (2|E|).
    const double r = (2.0 * cross_sum / arcs - mean * mean) / var;
    return std::clamp(r, -1.0, 1.0);
  }
};

EdgeDegreeMoments edge_moments(const Graph& g) {
  EdgeDegreeMoments m;
  m.arcs = 2.0 * static_cast<double>(g.num_edges());
  if (m.arcs == 0) return m;
  double s1 = 0, s2 = 0;
  for (const auto& [u, v] : g.edges()) {
    const double du = static_cast<double>(g.degree(u)), dv = static_cast<double>(g.degree(v));
    s1 += du + dv;
    s2 += du * du + dv * dv;
  }
  m.mean = s1 / m.arcs;
  m.second = s2 / m.arcs;
  return m;
}

double cross_sum(const Graph& g) {
  // Integer accumulation keeps the incremental updates in the rewiring loop
  // exact relative to this starting value.
  std::int64_t s = 0;
  for (const auto& [u, v] : g.edges()) {
    s += static_cast<std::int64_t>(g.degree(u)) * static_cast<std::int64_t>(g.degree(v));
  }
  return static_cast<double>(s);
}

// Pearson moments of the node degree, for the degree-sharing coefficient.
struct NodeDegreeMoments {
  double n = 0, mean = 0, variance = 0;
};

NodeDegreeMoments node_moments(const Graph& g) {
  NodeDegreeMoments m;
  m.n = static_cast<double>(g.num_nodes());
  if (m.n == 0) return m;
  double s1 = 0, s2 = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const double d = static_cast<double>(g.degree(v));
    s1 += d;
    s2 += d * d;
  }
  m.mean = s1 / m.n;
  m.variance = s2 / m.n - m.mean * m.mean;
  return m;
}

std::optional<double> degree_sharing_from_sums(const NodeDegreeMoments& m, double sharer_degree_sum,
                                               double sharers) {
  if (m.n == 0) return std::nullopt;
  const double p = sharers / m.n;
  const double var_s = p * (1.0 - p);
  if (!(m.variance > 1e-12 * std::max(1.0, m.mean * m.mean)) || !(var_s > 0)) return std::nullopt;
  const double cov = sharer_degree_sum / m.n - m.mean * p;
  return std::clamp(cov / std::sqrt(m.variance * var_s), -1.0, 1.0);
}

}  // namespace

void validate(const CorrelationTarget& t) {
  if (!(t.target >= -1.0 && t.target <= 1.0)) throw InputError("correlation target must lie in [-1, 1]");
  if (!(t.tolerance > 0.0 && t.tolerance < 1.0)) throw InputError("correlation tolerance must lie in (0, 1)");
}

DegreeSequence powerlaw_degree_sequence(std::size_t n, double alpha, std::size_t k_min, RngStream& rng) {
  if (n < 2) throw InputError("power-law degree sequence needs at least 2 nodes");
  if (!(alpha > 2.0)) throw InputError("power-law exponent must exceed 2");
  if (k_min < 1 || k_min > n - 1) throw InputError("minimum degree must lie in [1, n - 1]");

  const double cap = static_cast<double>(n - 1);
  const double exponent = -1.0 / (alpha - 1.0);
  DegreeSequence seq;
  seq.degrees.resize(n);
  std::size_t total = 0;
  for (auto& k : seq.degrees) {
    // Inverse CDF of P(x) ~ x^-alpha on [k_min, inf).
    const double x = static_cast<double>(k_min) * std::pow(1.0 - rng.uniform(), exponent);
    k = static_cast<std::size_t>(std::min(std::ceil(x), cap));
    total += k;
  }
  if (total % 2 == 1) {
    if (seq.degrees[0] < n - 1) {
      ++seq.degrees[0];
    } else {
      --seq.degrees[0];
    }
  }
  return seq;
}

Graph configuration_model(const DegreeSequence& seq, RngStream& rng) {
  std::vector<NodeId> stubs;
  for (std::size_t v = 0; v < seq.degrees.size(); ++v) {
    stubs.insert(stubs.end(), seq.degrees[v], static_cast<NodeId>(v));
  }
  if (stubs.size() % 2 != 0) throw InputError("degree sequence has an odd sum");
  std::shuffle(stubs.begin(), stubs.end(), rng);
  std::vector<Edge> edges;
  edges.reserve(stubs.size() / 2);
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) edges.emplace_back(stubs[i], stubs[i + 1]);
  return Graph::from_edges(edges, seq.degrees.size());
}

std::optional<double> assortativity_coefficient(const Graph& g) {
  return edge_moments(g).coefficient(cross_sum(g));
}

std::optional<double> degree_sharing_correlation(const Graph& g, const SharingState& s) {
  double sum = 0;
  for (NodeId v : s.sharers()) sum += static_cast<double>(g.degree(v));
  return degree_sharing_from_sums(node_moments(g), sum, static_cast<double>(s.num_sharers()));
}

RewireResult rewire_to_assortativity(const Graph& g, const CorrelationTarget& target, RngStream& rng,
                                     const RewireObserver& observer) {
  validate(target);
  if (g.num_edges() < 2) throw InputError("rewiring needs at least two edges");

  RewireResult result;
  const EdgeDegreeMoments moments = edge_moments(g);
  double cross = cross_sum(g);
  std::optional<double> current = moments.coefficient(cross);
  if (!current) {
    result.graph = g;
    return result;
  }

  std::vector<Edge> edges = g.edges();
  std::unordered_set<std::uint64_t> present;
  present.reserve(2 * edges.size());
  for (const auto& [u, v] : edges) present.insert(edge_key(u, v));
  auto deg = [&](NodeId v) { return static_cast<double>(g.degree(v)); };

  double r = *current;
  const std::size_t m = edges.size();
  while (std::abs(r - target.target) > target.tolerance && result.iterations < target.max_iters) {
    ++result.iterations;
    const std::size_t i = rng.index(m);
    std::size_t j = rng.index(m - 1);
    if (j >= i) ++j;
    const auto [a, b] = edges[i];
    const auto [c, d] = edges[j];
    const double old_cross = deg(a) * deg(b) + deg(c) * deg(d);

    struct Candidate {
      Edge e1, e2;
      double r;
    };
    Candidate options[2] = {{{a, c}, {b, d}, 0}, {{a, d}, {b, c}, 0}};
    bool valid[2] = {false, false};
    for (int k = 0; k < 2; ++k) {
      auto& o = options[k];
      if (o.e1.first == o.e1.second || o.e2.first == o.e2.second) continue;
      if (present.count(edge_key(o.e1.first, o.e1.second)) ||
          present.count(edge_key(o.e2.first, o.e2.second)))
        continue;
      const double next_cross = cross - old_cross + deg(o.e1.first) * deg(o.e1.second) +
                                deg(o.e2.first) * deg(o.e2.second);
      o.r = *moments.coefficient(next_cross);
      valid[k] = true;
    }

    const double dist = std::abs(r - target.target);
    const bool upward = r < target.target;
    int pick = -1;
    for (int k = 0; k < 2; ++k) {
      if (!valid[k] || !(std::abs(options[k].r - target.target) < dist)) continue;
      if (pick < 0 || (upward ? options[k].r > options[pick].r : options[k].r < options[pick].r)) pick = k;
    }
    if (pick < 0) continue;

    const auto& o = options[pick];
    present.erase(edge_key(a, b));
    present.erase(edge_key(c, d));
    present.insert(edge_key(o.e1.first, o.e1.second));
    present.insert(edge_key(o.e2.first, o.e2.second));
    edges[i] = o.e1;
    edges[j] = o.e2;
    cross += deg(o.e1.first) * deg(o.e1.second) + deg(o.e2.first) * deg(o.e2.second) - old_cross;
    const double before = r;
    r = o.r;
    ++result.rewires;
    if (observer) observer(before, r);
  }

  result.graph = Graph::from_edges(edges, g.num_nodes());
  result.achieved = assortativity_coefficient(result.graph);
  result.reached = result.achieved && std::abs(*result.achieved - target.target) <= target.tolerance;
  return result;
}

SharingState bernoulli_sharing(const Graph& g, double p, RngStream& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("sharing probability must lie in [0, 1]");
  std::vector<char> bits(g.num_nodes(), 0);
  for (auto& b : bits) b = rng.bernoulli(p) ? 1 : 0;
  return SharingState::from_bits(std::move(bits));
}

SwapResult swap_to_correlation(const Graph& g, const SharingState& s, const CorrelationTarget& target,
                               RngStream& rng) {
  validate(target);
  const std::size_t n = g.num_nodes();
  if (s.num_nodes() != n) throw InputError("sharing state does not match the graph");
  if (s.num_sharers() == 0 || s.num_sharers() == n) {
    throw InputError("label swapping needs at least one sharer and one non-sharer");
  }

  SwapResult result;
  const NodeDegreeMoments moments = node_moments(g);
  const double count = static_cast<double>(s.num_sharers());
  double sum = 0;
  for (NodeId v : s.sharers()) sum += static_cast<double>(g.degree(v));
  std::optional<double> current = degree_sharing_from_sums(moments, sum, count);
  if (!current) {
    result.state = s;
    return result;
  }

  std::vector<NodeId> on = s.sharers();
  std::vector<NodeId> off;
  off.reserve(n - on.size());
  for (NodeId v = 0; v < n; ++v) {
    if (!s.shares(v)) off.push_back(v);
  }

  double r = *current;
  while (std::abs(r - target.target) > target.tolerance && result.iterations < target.max_iters) {
    ++result.iterations;
    const std::size_t i = rng.index(on.size());
    const std::size_t j = rng.index(off.size());
    const double du = static_cast<double>(g.degree(on[i]));
    const double dv = static_cast<double>(g.degree(off[j]));
    const bool upward = r < target.target;
    if (upward ? !(du < dv) : !(du > dv)) continue;
    const double next_sum = sum - du + dv;
    const double next = *degree_sharing_from_sums(moments, next_sum, count);
    if (!(std::abs(next - target.target) < std::abs(r - target.target))) continue;
    std::swap(on[i], off[j]);
    sum = next_sum;
    r = next;
    ++result.swaps;
  }

  result.state = SharingState::from_sharers(on, n);
  result.achieved = degree_sharing_correlation(g, result.state);
  result.reached = result.achieved && std::abs(*result.achieved - target.target) <= target.tolerance;
  return result;
}

}  // namespace exposure
