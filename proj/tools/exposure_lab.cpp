// exposure-lab: command-line front end for the exposure estimation library.
//
// Exit codes: 0 success, 2 input error, 3 correlation shaping missed its
// tolerance (outputs are still written), 4 true exposure is zero so the
// percent error metric is undefined.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "exposure/error.hpp"
#include "exposure/estimators.hpp"
#include "exposure/genmodel.hpp"
#include "exposure/harness.hpp"
#include "exposure/io.hpp"
#include "exposure/tracking.hpp"
#include "json.hpp"

using namespace exposure;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitShaping = 3;
constexpr int kExitNoExposure = 4;

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  return out;
}

// Writes via `emit` to `path`, or to stdout when path is empty or "-".
template <typename F>
void write_to(const std::string& path, F&& emit) {
  if (path.empty() || path == "-") {
    emit(std::cout);
    return;
  }
  auto out = open_output(path);
  emit(out);
}

void note_remap(const std::string& graph_path, const std::vector<std::uint64_t>& original_ids,
                std::string id_map_path) {
  if (original_ids.empty()) return;
  if (id_map_path.empty()) id_map_path = graph_path + ".idmap";
  std::ofstream out(id_map_path);
  if (!out) {
    std::fprintf(stderr, "warning: node ids were remapped but %s is not writable\n", id_map_path.c_str());
    return;
  }
  write_id_map(out, original_ids);
  std::fprintf(stderr, "node ids remapped to 0..%zu; mapping written to %s\n", original_ids.size() - 1,
               id_map_path.c_str());
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& item : names) {
    std::size_t start = 0;
    while (start <= item.size()) {
      const auto comma = item.find(',', start);
      const std::string name = item.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!name.empty()) out.push_back(parse_method(name));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return out;
}

std::string fmt(double x) { return format_real(x); }
std::string fmt(const std::optional<double>& x) { return format_real(x); }

// ---- generate ----

struct GenerateArgs {
  GenerateSpec gen;
  std::optional<double> rkk, rho;
  double sharing_prob = 0.05;
  double tolerance = 0.01;
  std::size_t max_iters = 100000;
  std::uint64_t seed = 1;
  std::string out_graph, out_sharers;
};

int run_generate(const GenerateArgs& a) {
  const CorrelationTarget shaping{0.0, a.tolerance, a.max_iters};
  validate(shaping);
  RngStream graph_rng(a.seed, 0);
  ShapedGraph sg = make_shaped_graph(a.gen, a.rkk, shaping, graph_rng);
  RngStream share_rng(a.seed, 1);
  ShapedSharing sh = make_shaped_sharing(sg.graph, a.sharing_prob, a.rho, shaping, share_rng);

  if (!a.out_graph.empty()) {
    auto out = open_output(a.out_graph);
    write_edge_list(out, sg.graph);
  }
  if (!a.out_sharers.empty()) {
    auto out = open_output(a.out_sharers);
    write_sharers(out, sh.sharing);
  }
  std::printf("nodes %zu edges %zu sharers %zu\n", sg.graph.num_nodes(), sg.graph.num_edges(),
              sh.sharing.num_sharers());
  std::printf("assortativity %s target %s\n", fmt(sg.rkk_achieved).c_str(), fmt(a.rkk).c_str());
  std::printf("degree_sharing_corr %s target %s\n", fmt(sh.rho_achieved).c_str(), fmt(a.rho).c_str());
  std::printf("true_exposure %s\n", fmt(true_exposure(sg.graph, sh.sharing)).c_str());
  if (!sg.reached || !sh.reached) {
    std::fprintf(stderr, "warning: correlation shaping stopped outside the tolerance\n");
    return kExitShaping;
  }
  return 0;
}

// ---- estimate ----

struct EstimateArgs {
  std::string config_path;
  std::string graph, sharers, out, id_map;
  bool directed = false;
  std::vector<std::string> methods;
  std::optional<std::size_t> samples, reps, workers;
  std::optional<std::uint64_t> seed;
  std::optional<double> dbar_override, sharing_prob;
};

ExperimentConfig estimate_config(const EstimateArgs& a) {
  ExperimentConfig c;
  if (!a.config_path.empty()) {
    std::ifstream in(a.config_path);
    if (!in) throw InputError("cannot open " + a.config_path);
    c = config_from_key_values(parse_key_values(in));
  }
  if (!a.graph.empty()) {
    c.file = FileSource{a.graph, a.directed};
    c.generate.reset();
  } else if (c.file && a.directed) {
    c.file->directed = true;
  }
  if (!c.file && a.config_path.empty()) throw InputError("estimate needs --graph or --config");
  if (!a.sharers.empty()) c.sharers_path = a.sharers;
  if (!a.methods.empty()) c.methods = parse_methods(a.methods);
  if (a.samples) c.n_samples = *a.samples;
  if (a.reps) c.reps = *a.reps;
  if (a.seed) c.seed = *a.seed;
  if (a.dbar_override) c.d_bar_override = a.dbar_override;
  if (a.sharing_prob) c.sharing_prob = *a.sharing_prob;
  if (a.workers) c.workers = std::max<std::size_t>(1, *a.workers);
  if (c.file && c.file->directed && a.methods.empty() && a.config_path.empty()) {
    c.methods = {Method::d_node, Method::d_friend, Method::d_follower};
  }
  return c;
}

int run_estimate(const EstimateArgs& a) {
  ExperimentConfig c = estimate_config(a);
  c.validate();
  if (c.file) {
    // Surface the parse report and any id remapping before the run.
    auto data = read_edge_list(c.file->path);
    std::fprintf(stderr, "loaded %s: %zu nodes, %zu edge lines, %zu skipped lines\n", c.file->path.c_str(),
                 data.num_nodes, data.edges.size(), data.skipped_lines);
    note_remap(c.file->path, data.original_ids, a.id_map);
  }
  StaticResult r = run_static_experiment(c);
  write_to(a.out, [&](std::ostream& os) { write_reps_csv(os, r); });

  std::fprintf(stderr, "true_exposure %s (nodes %zu edges %zu sharers %zu)\n", fmt(r.true_exposure).c_str(),
               r.nodes, r.edges, r.sharers);
  if (r.verdict) {
    std::fprintf(stderr, "condition lhs %s -> %s preferred%s\n", fmt(r.verdict->lhs).c_str(),
                 r.verdict->fp_preferred ? "fp" : "vanilla", r.verdict->tie ? " (tie)" : "");
  }
  for (const auto& s : r.summaries) {
    std::fprintf(stderr, "%-12s mean_estimate %s mean_abs_error %s mean_abs_error_pct %s\n",
                 std::string(to_string(s.method)).c_str(), fmt(s.mean_estimate).c_str(),
                 fmt(s.mean_abs_error).c_str(), fmt(s.mean_abs_error_pct).c_str());
  }
  if (!(r.true_exposure > 0.0)) {
    std::fprintf(stderr, "warning: true exposure is 0; percent error is undefined\n");
    return kExitNoExposure;
  }
  if (!r.shaping_reached) {
    std::fprintf(stderr, "warning: correlation shaping stopped outside the tolerance\n");
    return kExitShaping;
  }
  return 0;
}

// ---- grid ----

struct GridArgs {
  std::string config_path, out, ledger;
  std::optional<std::size_t> workers;
  bool quiet = false;
};

int run_grid_command(const GridArgs& a) {
  GridSpec spec;
  if (!a.config_path.empty()) {
    std::ifstream in(a.config_path);
    if (!in) throw InputError("cannot open " + a.config_path);
    spec = grid_from_key_values(parse_key_values(in));
  } else {
    spec.base.generate = GenerateSpec{};
  }
  if (a.workers) spec.base.workers = std::max<std::size_t>(1, *a.workers);
  auto progress = [&](const GridRow& row) {
    if (a.quiet) return;
    std::fprintf(stderr, "cell %zu alpha %s rkk %s/%s rho %s/%s p %s %s: %s%%\n", row.cell_index,
                 fmt(row.alpha).c_str(), fmt(row.rkk_target).c_str(), fmt(row.rkk_achieved).c_str(),
                 fmt(row.rho_target).c_str(), fmt(row.rho_achieved).c_str(), fmt(row.p).c_str(),
                 std::string(to_string(row.method)).c_str(), fmt(row.mean_abs_error_pct).c_str());
  };
  GridResult result = run_grid(spec, progress);
  write_to(a.out, [&](std::ostream& os) { write_grid_csv(os, result); });
  if (!a.ledger.empty()) {
    auto out = open_output(a.ledger);
    write_grid_ledger_csv(out, result);
  }
  if (result.null_rows() > 0) {
    std::fprintf(stderr, "%zu rows have zero true exposure and are omitted from the CSV\n", result.null_rows());
  }
  if (!result.all_shaping_reached()) {
    std::fprintf(stderr, "warning: some cells missed their correlation targets (see *_achieved columns)\n");
    return kExitShaping;
  }
  return 0;
}

// ---- track ----

struct TrackArgs {
  std::string graph, out, trajectory, id_map;
  GenerateSpec gen;
  std::optional<double> rkk;
  double tolerance = 0.01;
  std::size_t max_iters = 100000;
  std::string model = "icm";
  double p_inf = 0.05, theta = 0.05;
  bool icm_retry = false, ltm_strict = false;
  std::size_t seeds_count = 10, steps = 100, updates_per_step = 100;
  std::string policy = "constant";
  double epsilon = 0.01, initial = 0.0;
  std::uint64_t seed = 1;
};

int run_track(const TrackArgs& a) {
  Graph g;
  bool reached = true;
  if (!a.graph.empty()) {
    auto loaded = load_graph(a.graph);
    note_remap(a.graph, loaded.original_ids, a.id_map);
    g = std::move(loaded.graph);
    if (a.rkk) {
      RngStream rng(a.seed, 0);
      auto rw = rewire_to_assortativity(g, CorrelationTarget{*a.rkk, a.tolerance, a.max_iters}, rng);
      g = std::move(rw.graph);
      reached = rw.reached;
    }
  } else {
    RngStream rng(a.seed, 0);
    ShapedGraph sg = make_shaped_graph(a.gen, a.rkk, CorrelationTarget{0.0, a.tolerance, a.max_iters}, rng);
    g = std::move(sg.graph);
    reached = sg.reached;
    std::fprintf(stderr, "generated %zu nodes %zu edges, assortativity %s\n", g.num_nodes(), g.num_edges(),
                 fmt(sg.rkk_achieved).c_str());
  }

  TrackingConfig cfg;
  if (a.model == "icm") {
    cfg.cascade.model = CascadeModel::icm;
  } else if (a.model == "ltm") {
    cfg.cascade.model = CascadeModel::ltm;
  } else {
    throw InputError("--model must be icm or ltm");
  }
  cfg.cascade.p_inf = a.p_inf;
  cfg.cascade.theta = a.theta;
  cfg.cascade.icm_retry = a.icm_retry;
  cfg.cascade.ltm_strict = a.ltm_strict;
  cfg.seed_count = a.seeds_count;
  cfg.diffusion_steps = a.steps;
  cfg.updates_per_step = a.updates_per_step;
  StepPolicy policy;
  if (a.policy == "constant") {
    policy = StepPolicy::constant(a.epsilon);
  } else if (a.policy == "decreasing") {
    policy = StepPolicy::decreasing();
  } else {
    throw InputError("--policy must be constant or decreasing");
  }
  cfg.vanilla_policy = cfg.fp_policy = policy;
  cfg.initial_estimate = a.initial;

  TrackingSeries series = run_tracking_experiment(g, cfg, RngStream(a.seed, 1));
  write_to(a.out, [&](std::ostream& os) {
    os << "step,true_exposure,vanilla_est,fp_est,vanilla_abs_err,fp_abs_err,degree_sharing_corr\n";
    for (const auto& r : series.records) {
      os << r.step << ',' << fmt(r.true_exposure) << ',' << fmt(r.vanilla_estimate) << ',' << fmt(r.fp_estimate)
         << ',' << fmt(r.vanilla_abs_error) << ',' << fmt(r.fp_abs_error) << ',' << fmt(r.degree_sharing_corr)
         << '\n';
    }
  });
  if (!a.trajectory.empty()) {
    // Same seeds and coin stream as the tracker run.
    auto traj = run_cascade(g, cfg.cascade, series.seeds, cfg.diffusion_steps, RngStream(a.seed, 1).derive(1));
    auto out = open_output(a.trajectory);
    write_trajectory_csv(out, g, traj);
  }
  std::fprintf(stderr, "time-averaged abs error: vanilla %s fp %s\n", fmt(series.mean_vanilla_error()).c_str(),
               fmt(series.mean_fp_error()).c_str());
  if (!reached) {
    std::fprintf(stderr, "warning: assortativity shaping stopped outside the tolerance\n");
    return kExitShaping;
  }
  return 0;
}

// ---- analyze ----

struct AnalyzeArgs {
  std::string graph, sharers, id_map;
  std::size_t samples = 1;
  std::size_t sign_sample = 1000;
  std::uint64_t seed = 1;
};

int run_analyze(const AnalyzeArgs& a) {
  auto loaded = load_graph(a.graph);
  note_remap(a.graph, loaded.original_ids, a.id_map);
  const Graph& g = loaded.graph;
  SharingState s = read_sharers(a.sharers, g.num_nodes(), loaded.original_ids);
  const double f = true_exposure(g, s);
  const ConditionVerdict v = condition_empirical(g, s);

  auto opt = [](const std::optional<double>& x) { return x ? nlohmann::json(*x) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["nodes"] = g.num_nodes();
  j["edges"] = g.num_edges();
  j["sharers"] = s.num_sharers();
  j["average_degree"] = average_degree(g);
  j["true_exposure"] = f;
  j["samples"] = a.samples;
  j["variance_vanilla"] = exact_variance_vanilla(f, a.samples);
  j["variance_fp"] = exact_variance_fp(g, s, a.samples);
  j["condition"] = {{"lhs", v.lhs}, {"fp_preferred", v.fp_preferred}, {"tie", v.tie}};
  j["recommended"] = v.fp_preferred ? "fp" : "vanilla";
  j["assortativity"] = opt(assortativity_coefficient(g));
  j["degree_sharing_corr"] = opt(degree_sharing_correlation(g, s));
  if (s.num_sharers() > 0 && s.num_sharers() < g.num_nodes()) {
    RngStream rng(a.seed, 0);
    auto h = sharer_degree_sign_heuristic(g, s, a.sign_sample, rng);
    j["sign_heuristic"] = {{"sign", std::string(to_string(h.sign))},
                           {"sharer_mean_degree", h.sharer_mean_degree},
                           {"nonsharer_mean_degree", h.nonsharer_mean_degree},
                           {"standard_error", h.standard_error}};
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Estimate the fraction of a network exposed to shared information"};
  app.name("exposure-lab");
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "power-law graph plus Bernoulli sharing, optionally shaped");
  g->add_option("--nodes", gen.gen.nodes, "number of nodes")->capture_default_str();
  g->add_option("--alpha", gen.gen.alpha, "power-law exponent (> 2)")->capture_default_str();
  g->add_option("--kmin", gen.gen.k_min, "minimum degree")->capture_default_str();
  g->add_option("--assortativity", gen.rkk, "assortativity target");
  g->add_option("--sharing-prob", gen.sharing_prob, "probability that a node shares")->capture_default_str();
  g->add_option("--degree-sharing-corr", gen.rho, "degree-sharing correlation target");
  g->add_option("--tolerance", gen.tolerance, "shaping tolerance")->capture_default_str();
  g->add_option("--max-iters", gen.max_iters, "shaping iteration budget")->capture_default_str();
  g->add_option("--seed", gen.seed, "random seed")->capture_default_str();
  g->add_option("--out-graph", gen.out_graph, "edge-list output path");
  g->add_option("--out-sharers", gen.out_sharers, "sharer-list output path");

  EstimateArgs est;
  auto* e = app.add_subcommand("estimate", "Monte Carlo comparison of exposure estimators");
  e->add_option("--config", est.config_path, "key = value config file");
  e->add_option("--graph", est.graph, "edge-list file");
  e->add_flag("--directed", est.directed, "read each line u v as a directed edge u -> v (v follows u)");
  e->add_option("--sharers", est.sharers, "sharer-list file (default: Bernoulli sharing)");
  e->add_option("--sharing-prob", est.sharing_prob, "Bernoulli sharing probability without --sharers");
  e->add_option("--method", est.methods,
                "vanilla|fp|fp-walk|fp-two-step|d-node|d-friend|d-follower (repeatable, comma lists allowed)");
  e->add_option("--samples", est.samples, "samples per estimate");
  e->add_option("--reps", est.reps, "Monte Carlo repetitions");
  e->add_option("--seed", est.seed, "random seed");
  e->add_option("--dbar-override", est.dbar_override, "externally supplied average degree");
  e->add_option("--workers", est.workers, "worker threads");
  e->add_option("--out", est.out, "per-rep CSV path (default stdout)");
  e->add_option("--id-map", est.id_map, "where to write the id mapping when ids are remapped");

  GridArgs grid;
  auto* gr = app.add_subcommand("grid", "estimator error over an (alpha, rkk, rho, p) grid");
  gr->add_option("--config", grid.config_path, "key = value config file");
  gr->add_option("--out", grid.out, "grid CSV path (default stdout)");
  gr->add_option("--ledger", grid.ledger, "per-rep ledger CSV path");
  gr->add_option("--workers", grid.workers, "worker threads");
  gr->add_flag("--quiet", grid.quiet, "no per-cell progress lines");

  TrackArgs tr;
  auto* t = app.add_subcommand("track", "real-time tracking of exposure during a cascade");
  t->add_option("--graph", tr.graph, "edge-list file (default: generate)");
  t->add_option("--nodes", tr.gen.nodes, "generated graph size")->capture_default_str();
  t->add_option("--alpha", tr.gen.alpha, "power-law exponent")->capture_default_str();
  t->add_option("--kmin", tr.gen.k_min, "minimum degree")->capture_default_str();
  t->add_option("--assortativity", tr.rkk, "assortativity target");
  t->add_option("--tolerance", tr.tolerance, "shaping tolerance")->capture_default_str();
  t->add_option("--max-iters", tr.max_iters, "shaping iteration budget")->capture_default_str();
  t->add_option("--model", tr.model, "icm or ltm")->capture_default_str();
  t->add_option("--p-inf", tr.p_inf, "ICM infection probability")->capture_default_str();
  t->add_option("--theta", tr.theta, "LTM threshold")->capture_default_str();
  t->add_flag("--icm-retry", tr.icm_retry, "every past sharer retries every step");
  t->add_flag("--ltm-strict", tr.ltm_strict, "activate on fraction > theta");
  t->add_option("--seeds-count", tr.seeds_count, "initial sharers")->capture_default_str();
  t->add_option("--steps", tr.steps, "diffusion steps")->capture_default_str();
  t->add_option("--updates-per-step", tr.updates_per_step, "tracker updates per step")->capture_default_str();
  t->add_option("--policy", tr.policy, "constant or decreasing")->capture_default_str();
  t->add_option("--epsilon", tr.epsilon, "constant step size")->capture_default_str();
  t->add_option("--initial-estimate", tr.initial, "tracker starting value")->capture_default_str();
  t->add_option("--seed", tr.seed, "random seed")->capture_default_str();
  t->add_option("--out", tr.out, "tracking CSV path (default stdout)");
  t->add_option("--trajectory", tr.trajectory, "cascade trajectory CSV path");
  t->add_option("--id-map", tr.id_map, "where to write the id mapping when ids are remapped");

  AnalyzeArgs an;
  auto* a = app.add_subcommand("analyze", "exact variances and the estimator decision for a graph");
  a->add_option("--graph", an.graph, "edge-list file")->required();
  a->add_option("--sharers", an.sharers, "sharer-list file")->required();
  a->add_option("--samples", an.samples, "sample size n for the variances")->capture_default_str();
  a->add_option("--sign-sample", an.sign_sample, "non-sharer sample for the sign heuristic")->capture_default_str();
  a->add_option("--seed", an.seed, "random seed")->capture_default_str();
  a->add_option("--id-map", an.id_map, "where to write the id mapping when ids are remapped");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitInput;
  }

  try {
    if (*g) return run_generate(gen);
    if (*e) return run_estimate(est);
    if (*gr) return run_grid_command(grid);
    if (*t) return run_track(tr);
    if (*a) return run_analyze(an);
  } catch (const InputError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitInput;
  }
  return 0;
}
