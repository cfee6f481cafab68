#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "exposure/cascade.hpp"
#include "exposure/estimators.hpp"
#include "exposure/genmodel.hpp"
#include "exposure/graph.hpp"

namespace exposure {

enum class Method { vanilla, fp, fp_walk, fp_two_step, d_node, d_friend, d_follower };

std::string_view to_string(Method m) noexcept;
/// Accepts the CLI spellings: vanilla, fp, fp-walk, fp-two-step, d-node,
/// d-friend, d-follower. Throws InputError otherwise.
Method parse_method(std::string_view name);
bool is_directed(Method m) noexcept;

struct GenerateSpec {
  std::size_t nodes = 10000;
  double alpha = 2.5;
  std::size_t k_min = 1;
};

struct FileSource {
  std::string path;
  bool directed = false;
};

struct ExperimentConfig {
  std::optional<GenerateSpec> generate;  ///< used when `file` is empty
  std::optional<FileSource> file;
  std::optional<std::string> sharers_path;  ///< overrides Bernoulli sharing
  std::optional<double> rkk_target;
  std::optional<double> rho_target;
  double sharing_prob = 0.05;
  std::size_t n_samples = 100;
  std::size_t reps = 1000;
  std::vector<Method> methods{Method::vanilla, Method::fp};
  std::uint64_t seed = 1;
  double tolerance = 0.01;
  std::size_t max_iters = 100000;
  std::optional<double> d_bar_override;
  std::size_t workers = 1;

  void validate() const;
};

/// Flat "key = value" text, '#' comments, list values comma-separated.
/// Unknown keys are an input error. Returns every key seen for callers that
/// accept grid-only keys.
std::map<std::string, std::string> parse_key_values(std::istream& in);
ExperimentConfig config_from_key_values(const std::map<std::string, std::string>& kv);

/// One Monte Carlo replicate of one method.
struct RepRecord {
  std::size_t rep = 0;
  Method method = Method::vanilla;
  double estimate = 0.0;
  double abs_error = 0.0;
};

struct MethodSummary {
  Method method = Method::vanilla;
  double mean_abs_error = 0.0;
  std::optional<double> mean_abs_error_pct;  ///< empty when f_bar = 0
  std::optional<double> std_error_pct;
  double mean_estimate = 0.0;
};

/// Percent-error aggregation over a rep ledger: 100 * mean|est - f|/f.
std::optional<double> mean_abs_error_pct(const std::vector<RepRecord>& reps, Method m, double f_bar);

struct StaticResult {
  double true_exposure = 0.0;
  std::optional<double> rkk_achieved;
  std::optional<double> rho_achieved;
  bool shaping_reached = true;
  std::optional<ConditionVerdict> verdict;  ///< undirected only
  std::optional<double> variance_vanilla;   ///< exact, at n_samples
  std::optional<double> variance_fp;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t sharers = 0;
  std::vector<RepRecord> reps;
  std::vector<MethodSummary> summaries;
};

/// Prepared graph plus sharing for one experiment cell.
struct PreparedCell {
  Graph graph;
  SharingState sharing;
  std::optional<double> rkk_achieved;
  std::optional<double> rho_achieved;
  bool shaping_reached = true;
};

/// Power-law configuration-model graph, optionally rewired toward rkk_target.
/// Returns the graph and whether the target was met (true when absent).
struct ShapedGraph {
  Graph graph;
  std::optional<double> rkk_achieved;
  bool reached = true;
};
ShapedGraph make_shaped_graph(const GenerateSpec& gen, std::optional<double> rkk_target,
                              const CorrelationTarget& shaping, RngStream& rng);

/// Bernoulli(p) sharing, optionally label-swapped toward rho_target.
struct ShapedSharing {
  SharingState sharing;
  std::optional<double> rho_achieved;
  bool reached = true;
};
ShapedSharing make_shaped_sharing(const Graph& g, double p, std::optional<double> rho_target,
                                  const CorrelationTarget& shaping, RngStream& rng);

/// Runs `reps` independent estimates per method with n_samples samples each.
/// Rep r of method m draws from stream (seed, cell_index, r) derived per method,
/// so results do not depend on the number of workers.
std::vector<RepRecord> run_monte_carlo(const Graph& g, const SharingState& s, const std::vector<Method>& methods,
                                       std::size_t n_samples, std::size_t reps, std::uint64_t seed,
                                       std::uint64_t cell_index, std::optional<double> d_bar_override,
                                       std::size_t workers);
std::vector<RepRecord> run_monte_carlo(const DiGraph& g, const SharingState& s,
                                       const std::vector<Method>& methods, std::size_t n_samples,
                                       std::size_t reps, std::uint64_t seed, std::uint64_t cell_index,
                                       std::optional<double> d_bar_override, std::size_t workers);

std::vector<MethodSummary> summarize(const std::vector<RepRecord>& reps, const std::vector<Method>& methods,
                                     double f_bar);

StaticResult run_static_experiment(const ExperimentConfig& config);
/// Same as above on a caller-supplied graph and sharing state.
StaticResult run_static_experiment(const Graph& g, const SharingState& s, const ExperimentConfig& config);

/// Columns: rep,method,estimate,abs_error,true_exposure.
void write_reps_csv(std::ostream& out, const StaticResult& r);

struct GridSpec {
  ExperimentConfig base;  ///< nodes, k_min, n_samples, reps, methods, seed, shaping
  std::vector<double> alphas{2.5, 2.2};
  std::vector<std::optional<double>> rkk_targets{-0.2, 0.0, 0.2};
  std::vector<std::optional<double>> rho_targets{-0.2, 0.0, 0.2};
  std::vector<double> sharing_probs{0.005, 0.01, 0.02, 0.05, 0.1};
};

struct GridRow {
  std::size_t cell_index = 0;
  double alpha = 0.0;
  std::optional<double> rkk_target, rho_target;
  std::optional<double> rkk_achieved, rho_achieved;
  double p = 0.0;
  double p_hat = 0.0;  ///< realized sharer fraction
  Method method = Method::vanilla;
  double true_exposure = 0.0;
  std::optional<double> mean_abs_error_pct;  ///< empty marks a null cell (f_bar = 0)
  std::optional<double> std_error_pct;
  double mean_abs_error = 0.0;
  bool shaping_reached = true;
};

struct GridResult {
  std::vector<GridRow> rows;
  /// Per-rep ledger keyed by cell index.
  std::map<std::size_t, std::vector<RepRecord>> ledgers;
  std::map<std::size_t, double> cell_true_exposure;
  std::size_t null_rows() const;
  bool all_shaping_reached() const;
};

using GridProgress = std::function<void(const GridRow&)>;

GridResult run_grid(const GridSpec& spec, const GridProgress& progress = {});
GridSpec grid_from_key_values(const std::map<std::string, std::string>& kv);

/// Non-null rows only.
void write_grid_csv(std::ostream& out, const GridResult& result);
/// Columns: cell,method,rep,estimate,abs_error,true_exposure.
void write_grid_ledger_csv(std::ostream& out, const GridResult& result);

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace exposure
