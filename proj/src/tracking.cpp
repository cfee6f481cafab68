#include "exposure/tracking.hpp"

#include <cmath>

#include "exposure/error.hpp"
#include "exposure/genmodel.hpp"

namespace exposure {

void apply_observation(TrackerState& state, double observation) {
  ++state.updates_done;
  state.estimate += state.policy.step(state.updates_done) * (observation - state.estimate);
}

void tracker_update(TrackerState& state, const Graph& g, const SharingState& snapshot, RngStream& rng) {
  if (state.kind == TrackerKind::vanilla) {
    const NodeId x = sample_uniform_node(g, rng);
    apply_observation(state, exposure(g, snapshot, x) ? 1.0 : 0.0);
    return;
  }
  if (g.num_edges() == 0) throw InputError("friendship-paradox tracker needs at least one edge");
  const NodeId y = sample_random_friend(g, rng);
  const double obs =
      exposure(g, snapshot, y) ? average_degree(g) / static_cast<double>(g.degree(y)) : 0.0;
  apply_observation(state, obs);
}

double TrackingSeries::mean_vanilla_error() const {
  if (records.empty()) return 0.0;
  double s = 0;
  for (const auto& r : records) s += r.vanilla_abs_error;
  return s / static_cast<double>(records.size());
}

double TrackingSeries::mean_fp_error() const {
  if (records.empty()) return 0.0;
  double s = 0;
  for (const auto& r : records) s += r.fp_abs_error;
  return s / static_cast<double>(records.size());
}

TrackingSeries run_tracking_experiment(const Graph& g, const TrackingConfig& config, const RngStream& rng) {
  validate(config.cascade);
  if (config.updates_per_step == 0) throw InputError("updates per diffusion step must be at least 1");
  if (g.num_edges() == 0) throw InputError("tracking needs at least one edge");
  for (const auto& p : {config.vanilla_policy, config.fp_policy}) {
    if (p.kind == StepPolicy::Kind::constant && !(p.epsilon > 0.0)) {
      throw InputError("constant step size must be positive");
    }
  }

  TrackingSeries series;
  RngStream seed_rng = rng.derive(0);
  series.seeds = choose_seeds(g, config.seed_count, seed_rng);
  Cascade cascade(g, config.cascade, series.seeds, rng.derive(1));
  RngStream vanilla_rng = rng.derive(2);
  RngStream fp_rng = rng.derive(3);

  TrackerState vanilla{config.initial_estimate, 0, TrackerKind::vanilla, config.vanilla_policy};
  TrackerState fp{config.initial_estimate, 0, TrackerKind::fp, config.fp_policy};

  series.records.reserve(config.diffusion_steps);
  for (std::size_t t = 1; t <= config.diffusion_steps; ++t) {
    const SharingState& snapshot = cascade.advance();
    const double truth = true_exposure(g, snapshot);
    for (std::size_t i = 0; i < config.updates_per_step; ++i) {
      tracker_update(vanilla, g, snapshot, vanilla_rng);
      tracker_update(fp, g, snapshot, fp_rng);
    }
    TrackingRecord rec;
    rec.step = t;
    rec.true_exposure = truth;
    rec.vanilla_estimate = vanilla.estimate;
    rec.fp_estimate = fp.estimate;
    rec.vanilla_abs_error = std::abs(vanilla.estimate - truth);
    rec.fp_abs_error = std::abs(fp.estimate - truth);
    rec.degree_sharing_corr = degree_sharing_correlation(g, snapshot);
    rec.num_sharers = snapshot.num_sharers();
    series.records.push_back(rec);
  }
  return series;
}

}  // namespace exposure
