#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "exposure/cascade.hpp"
#include "exposure/graph.hpp"
#include "exposure/rng.hpp"

namespace exposure {

struct StepPolicy {
  enum class Kind { decreasing, constant } kind = Kind::constant;
  double epsilon = 0.01;

  static StepPolicy decreasing() { return {Kind::decreasing, 0.0}; }
  static StepPolicy constant(double eps) { return {Kind::constant, eps}; }

  /// Step for update number n (1-based).
  double step(std::size_t n) const noexcept {
    return kind == Kind::decreasing ? 1.0 / static_cast<double>(n) : epsilon;
  }
};

enum class TrackerKind { vanilla, fp };

/// Stochastic-approximation tracker state: x <- x + step * (obs - x).
struct TrackerState {
  double estimate = 0.0;
  std::size_t updates_done = 0;
  TrackerKind kind = TrackerKind::vanilla;
  StepPolicy policy;
};

/// Folds one observation into the tracker.
void apply_observation(TrackerState& state, double observation);

/// Draws one fresh sample against the sharing snapshot and updates. Vanilla
/// observes f(X) for a uniform node; fp observes d_bar f(Y) / d(Y) for a
/// random friend Y.
void tracker_update(TrackerState& state, const Graph& g, const SharingState& snapshot, RngStream& rng);

struct TrackingConfig {
  CascadeParams cascade;
  std::size_t seed_count = 10;
  std::size_t diffusion_steps = 100;
  std::size_t updates_per_step = 100;
  StepPolicy vanilla_policy = StepPolicy::constant(0.01);
  StepPolicy fp_policy = StepPolicy::constant(0.01);
  double initial_estimate = 0.0;
};

struct TrackingRecord {
  std::size_t step = 0;
  double true_exposure = 0.0;
  double vanilla_estimate = 0.0;
  double fp_estimate = 0.0;
  double vanilla_abs_error = 0.0;
  double fp_abs_error = 0.0;
  std::optional<double> degree_sharing_corr;
  std::size_t num_sharers = 0;
};

struct TrackingSeries {
  std::vector<TrackingRecord> records;
  std::vector<NodeId> seeds;

  double mean_vanilla_error() const;
  double mean_fp_error() const;
};

/// For t = 1..diffusion_steps: advance the cascade once, compute the exact
/// exposure, then run `updates_per_step` updates of each tracker against the
/// frozen step-t state. Seeds, cascade coins and the two trackers draw from
/// separate child streams of `rng`.
TrackingSeries run_tracking_experiment(const Graph& g, const TrackingConfig& config, const RngStream& rng);

}  // namespace exposure
