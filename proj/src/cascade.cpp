#include "exposure/cascade.hpp"

#include <algorithm>
#include <string>

#include "exposure/error.hpp"

namespace exposure {

namespace {

// True iff the sorted ranges share an element. Galloping is not worth it at
// social-network degrees; a linear merge with early exit is enough.
bool sorted_intersect(std::span<const NodeId> a, std::span<const NodeId> b) {
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

bool any_neighbor_shares(std::span<const NodeId> nbrs, const SharingState& s) {
  // Short neighbor lists scan the bitmap; long ones against a small sharer
  // list use the sorted-list intersection.
  if (nbrs.size() <= s.num_sharers()) {
    return std::any_of(nbrs.begin(), nbrs.end(), [&](NodeId u) { return s.shares(u); });
  }
  return sorted_intersect(nbrs, s.sharers());
}

}  // namespace

SharingState SharingState::from_sharers(std::span<const NodeId> sharers, std::size_t num_nodes) {
  SharingState s(num_nodes);
  for (NodeId v : sharers) {
    if (v >= num_nodes) {
      throw InputError("sharer id " + std::to_string(v) + " is not a node (|V| = " +
                       std::to_string(num_nodes) + ")");
    }
    s.bits_[v] = 1;
  }
  for (NodeId v = 0; v < num_nodes; ++v) {
    if (s.bits_[v]) s.sharers_.push_back(v);
  }
  return s;
}

SharingState SharingState::from_bits(std::vector<char> bits) {
  SharingState s;
  s.bits_ = std::move(bits);
  for (NodeId v = 0; v < s.bits_.size(); ++v) {
    if (s.bits_[v]) {
      s.bits_[v] = 1;
      s.sharers_.push_back(v);
    }
  }
  return s;
}

SharingState SharingState::with_added(std::span<const NodeId> extra) const {
  SharingState next = *this;
  bool grew = false;
  for (NodeId v : extra) {
    if (!next.bits_[v]) {
      next.bits_[v] = 1;
      grew = true;
    }
  }
  if (grew) {
    next.sharers_.clear();
    for (NodeId v = 0; v < next.bits_.size(); ++v) {
      if (next.bits_[v]) next.sharers_.push_back(v);
    }
  }
  return next;
}

bool exposure(const Graph& g, const SharingState& s, NodeId v) {
  return any_neighbor_shares(g.neighbors(v), s);
}

bool exposure(const DiGraph& g, const SharingState& s, NodeId v) {
  return any_neighbor_shares(g.in_neighbors(v), s);
}

std::vector<char> exposure_vector(const Graph& g, const SharingState& s) {
  std::vector<char> f(g.num_nodes(), 0);
  // Mark neighbors of sharers: O(sum of sharer degrees).
  for (NodeId u : s.sharers()) {
    for (NodeId v : g.neighbors(u)) f[v] = 1;
  }
  return f;
}

std::vector<char> exposure_vector(const DiGraph& g, const SharingState& s) {
  std::vector<char> f(g.num_nodes(), 0);
  for (NodeId u : s.sharers()) {
    for (NodeId v : g.out_neighbors(u)) f[v] = 1;
  }
  return f;
}

double true_exposure(const Graph& g, const SharingState& s) {
  if (g.num_nodes() == 0) return 0.0;
  auto f = exposure_vector(g, s);
  return static_cast<double>(std::count(f.begin(), f.end(), 1)) / static_cast<double>(g.num_nodes());
}

double true_exposure(const DiGraph& g, const SharingState& s) {
  if (g.num_nodes() == 0) return 0.0;
  auto f = exposure_vector(g, s);
  return static_cast<double>(std::count(f.begin(), f.end(), 1)) / static_cast<double>(g.num_nodes());
}

void validate(const CascadeParams& params) {
  if (!(params.p_inf >= 0.0 && params.p_inf <= 1.0)) {
    throw InputError("infection probability must lie in [0, 1]");
  }
  if (!(params.theta > 0.0 && params.theta <= 1.0)) {
    throw InputError("LTM threshold must lie in (0, 1]");
  }
}

StepOutcome icm_step(const Graph& g, const SharingState& s, std::span<const NodeId> frontier,
                     double p_inf, const RngStream& coins, std::size_t step_index, bool retry) {
  if (!(p_inf >= 0.0 && p_inf <= 1.0)) throw InputError("infection probability must lie in [0, 1]");
  std::vector<NodeId> activated;
  if (p_inf > 0.0) {
    std::vector<char> hit(g.num_nodes(), 0);
    for (NodeId u : frontier) {
      for (NodeId v : g.neighbors(u)) {
        if (s.shares(v) || hit[v]) continue;
        const double coin = coins.keyed_uniform(u, v, retry ? step_index + 1 : 0);
        if (coin < p_inf) {
          hit[v] = 1;
          activated.push_back(v);
        }
      }
    }
    std::sort(activated.begin(), activated.end());
  }
  SharingState next = s.with_added(activated);
  return {std::move(next), std::move(activated)};
}

StepOutcome ltm_step(const Graph& g, const SharingState& s, double theta, bool strict) {
  if (!(theta > 0.0 && theta <= 1.0)) throw InputError("LTM threshold must lie in (0, 1]");
  std::vector<NodeId> activated;
  std::vector<std::size_t> active_nbrs(g.num_nodes(), 0);
  for (NodeId u : s.sharers()) {
    for (NodeId v : g.neighbors(u)) ++active_nbrs[v];
  }
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const std::size_t d = g.degree(v);
    if (s.shares(v) || d == 0 || active_nbrs[v] == 0) continue;
    const double frac = static_cast<double>(active_nbrs[v]) / static_cast<double>(d);
    if (strict ? frac > theta : frac >= theta) activated.push_back(v);
  }
  SharingState next = s.with_added(activated);
  return {std::move(next), std::move(activated)};
}

std::vector<NodeId> choose_seeds(const Graph& g, std::size_t count, RngStream& rng) {
  const std::size_t n = g.num_nodes();
  if (count > n) throw InputError("more cascade seeds requested than nodes");
  // Partial Fisher-Yates over a sparse swap map would be cheaper for huge n;
  // rejection is fine while count << n.
  std::vector<char> taken(n, 0);
  std::vector<NodeId> seeds;
  seeds.reserve(count);
  if (2 * count > n) {
    std::vector<NodeId> all(n);
    for (NodeId v = 0; v < n; ++v) all[v] = v;
    std::shuffle(all.begin(), all.end(), rng);
    seeds.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
  } else {
    while (seeds.size() < count) {
      NodeId v = sample_uniform_node(g, rng);
      if (!taken[v]) {
        taken[v] = 1;
        seeds.push_back(v);
      }
    }
  }
  std::sort(seeds.begin(), seeds.end());
  return seeds;
}

Cascade::Cascade(const Graph& g, CascadeParams params, std::span<const NodeId> seeds, RngStream rng)
    : graph_(&g), params_(params), rng_(std::move(rng)) {
  validate(params_);
  state_ = SharingState::from_sharers(seeds, g.num_nodes());
  frontier_ = state_.sharers();
}

const SharingState& Cascade::advance() {
  StepOutcome out;
  if (params_.model == CascadeModel::icm) {
    std::span<const NodeId> attempting =
        params_.icm_retry ? std::span<const NodeId>(state_.sharers()) : std::span<const NodeId>(frontier_);
    out = icm_step(*graph_, state_, attempting, params_.p_inf, rng_, step_, params_.icm_retry);
  } else {
    out = ltm_step(*graph_, state_, params_.theta, params_.ltm_strict);
  }
  ++step_;
  // Single-attempt ICM and LTM cannot restart once a step adds nobody;
  // retry ICM can, so it never reports a fixed point unless p_inf is 0.
  stalled_ = out.activated.empty() &&
             (params_.model == CascadeModel::ltm || !params_.icm_retry || params_.p_inf == 0.0);
  frontier_ = std::move(out.activated);
  state_ = std::move(out.state);
  return state_;
}

CascadeTrajectory run_cascade(const Graph& g, const CascadeParams& params,
                              std::span<const NodeId> seeds, std::size_t steps, RngStream rng) {
  CascadeTrajectory traj;
  traj.model = params.model;
  traj.params = params;
  Cascade cascade(g, params, seeds, std::move(rng));
  traj.states.reserve(steps + 1);
  traj.states.push_back(cascade.state());
  for (std::size_t t = 1; t <= steps; ++t) {
    if (traj.fixed_point_step) {
      traj.states.push_back(traj.states.back());
      continue;
    }
    traj.states.push_back(cascade.advance());
    if (cascade.at_fixed_point()) traj.fixed_point_step = t;
  }
  return traj;
}

}  // namespace exposure
