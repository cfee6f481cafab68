#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "exposure/graph.hpp"
#include "exposure/rng.hpp"

namespace exposure {

/// Who has shared the item: one bit per node plus the sorted sharer list.
class SharingState {
 public:
  SharingState() = default;
  explicit SharingState(std::size_t num_nodes) : bits_(num_nodes, 0) {}

  /// Throws InputError if an id is >= num_nodes. Duplicates are ignored.
  static SharingState from_sharers(std::span<const NodeId> sharers, std::size_t num_nodes);
  static SharingState from_bits(std::vector<char> bits);

  std::size_t num_nodes() const noexcept { return bits_.size(); }
  bool shares(NodeId v) const noexcept { return bits_[v] != 0; }
  const std::vector<NodeId>& sharers() const noexcept { return sharers_; }
  std::size_t num_sharers() const noexcept { return sharers_.size(); }
  const std::vector<char>& bits() const noexcept { return bits_; }

  /// Copy with the given nodes added.
  SharingState with_added(std::span<const NodeId> extra) const;

  friend bool operator==(const SharingState&, const SharingState&) = default;

 private:
  std::vector<char> bits_;
  std::vector<NodeId> sharers_;
};

/// f(v): 1 iff some neighbor of v shares. Sharing oneself does not count.
/// Evaluated as an early-exit intersection test of two sorted id lists.
bool exposure(const Graph& g, const SharingState& s, NodeId v);
/// Directed variant: v is exposed iff one of its friends (in-neighbors) shares.
bool exposure(const DiGraph& g, const SharingState& s, NodeId v);

/// Exact fraction of exposed nodes.
double true_exposure(const Graph& g, const SharingState& s);
double true_exposure(const DiGraph& g, const SharingState& s);

/// Per-node exposure indicators.
std::vector<char> exposure_vector(const Graph& g, const SharingState& s);
std::vector<char> exposure_vector(const DiGraph& g, const SharingState& s);

enum class CascadeModel { icm, ltm };

struct CascadeParams {
  CascadeModel model = CascadeModel::icm;
  double p_inf = 0.05;     ///< ICM infection probability
  bool icm_retry = false;  ///< every past sharer attempts every step
  double theta = 0.05;     ///< LTM activation threshold, in (0, 1]
  bool ltm_strict = false; ///< activate on fraction > theta instead of >=
};

struct StepOutcome {
  SharingState state;
  std::vector<NodeId> activated;  ///< sorted ids that became sharers this step
};

/// One ICM step. `frontier` holds the nodes allowed to attempt (those that
/// became sharers in the previous step, or all sharers in retry mode). The
/// coin for attempt u -> v is keyed by (u, v) and, in retry mode, the step
/// index, so runs with different p_inf on one stream are coupled.
StepOutcome icm_step(const Graph& g, const SharingState& s, std::span<const NodeId> frontier,
                     double p_inf, const RngStream& coins, std::size_t step_index = 0,
                     bool retry = false);

/// One synchronous LTM step: non-sharer v with d(v) >= 1 activates iff the
/// fraction of sharing neighbors is >= theta (> theta when strict).
StepOutcome ltm_step(const Graph& g, const SharingState& s, double theta, bool strict = false);

struct CascadeTrajectory {
  CascadeModel model = CascadeModel::icm;
  CascadeParams params;
  std::vector<SharingState> states;  ///< steps + 1 entries, states[0] is the seed state
  /// First step index whose state equals its predecessor; later entries are
  /// padding copies of the fixed point.
  std::optional<std::size_t> fixed_point_step;
};

void validate(const CascadeParams& params);

/// Uniformly chosen distinct seed nodes.
std::vector<NodeId> choose_seeds(const Graph& g, std::size_t count, RngStream& rng);

/// Incremental driver so callers (the tracker) can interleave work with steps.
class Cascade {
 public:
  Cascade(const Graph& g, CascadeParams params, std::span<const NodeId> seeds, RngStream rng);

  const SharingState& state() const noexcept { return state_; }
  std::size_t step_index() const noexcept { return step_; }
  bool at_fixed_point() const noexcept { return stalled_; }
  /// Advances one diffusion step and returns the new state.
  const SharingState& advance();

 private:
  const Graph* graph_;
  CascadeParams params_;
  RngStream rng_;
  SharingState state_;
  std::vector<NodeId> frontier_;
  std::size_t step_ = 0;
  bool stalled_ = false;
};

CascadeTrajectory run_cascade(const Graph& g, const CascadeParams& params,
                              std::span<const NodeId> seeds, std::size_t steps, RngStream rng);

}  // namespace exposure
