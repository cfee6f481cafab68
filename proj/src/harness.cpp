#include "exposure/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "exposure/error.hpp"
#include "exposure/io.hpp"

namespace exposure {

namespace {

// Stream-id tags so graph, sharing and sampling draws never collide.
constexpr std::uint64_t kGraphTag = 0x6772617068ULL;
constexpr std::uint64_t kShareTag = 0x7368617265ULL;
constexpr std::uint64_t kSampleTag = 0x73616d706cULL;

std::uint64_t tag(std::uint64_t kind, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = mix64(kind);
  for (std::uint64_t p : parts) h = hash_combine(h, p);
  return h;
}

std::string trim_copy(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim_copy(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InputError("config key '" + key + "' expects a number, got '" + v + "'");
  }
}

std::uint64_t to_count(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v.front() == '-') throw std::invalid_argument(v);
    unsigned long long x = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw InputError("config key '" + key + "' expects a non-negative integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InputError("config key '" + key + "' expects true/false, got '" + v + "'");
}

// "none" disables a shaping target.
std::optional<double> to_target(const std::string& key, const std::string& v) {
  if (v == "none") return std::nullopt;
  return to_real(key, v);
}

const std::set<std::string>& static_keys() {
  static const std::set<std::string> keys{
      "nodes",     "alpha",          "kmin",      "graph",     "directed",    "sharers",
      "assortativity", "degree_sharing_corr", "sharing_prob", "samples", "reps", "methods",
      "seed",      "tolerance",      "max_iters", "dbar_override", "workers"};
  return keys;
}

const std::set<std::string>& grid_keys() {
  static const std::set<std::string> keys{"alphas", "assortativities", "degree_sharing_corrs",
                                          "sharing_probs"};
  return keys;
}

std::vector<NodeId> draw_samples(const Graph& g, Method m, std::size_t n, RngStream& rng) {
  std::vector<NodeId> out;
  out.reserve(n);
  switch (m) {
    case Method::vanilla:
      for (std::size_t i = 0; i < n; ++i) out.push_back(sample_uniform_node(g, rng));
      break;
    case Method::fp:
      for (std::size_t i = 0; i < n; ++i) out.push_back(sample_random_friend(g, rng));
      break;
    case Method::fp_two_step:
      for (std::size_t i = 0; i < n; ++i) out.push_back(sample_friend_two_step(g, rng));
      break;
    case Method::fp_walk: {
      // A degree-biased start is already stationary, component by component,
      // so every walk sample has the random-friend marginal.
      const NodeId start = sample_random_friend(g, rng);
      out = random_walk_friends(g, start, WalkOptions{}, n, rng);
      break;
    }
    default:
      throw InputError(std::string("method ") + std::string(to_string(m)) + " needs a directed graph");
  }
  return out;
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::vanilla: return "vanilla";
    case Method::fp: return "fp";
    case Method::fp_walk: return "fp-walk";
    case Method::fp_two_step: return "fp-two-step";
    case Method::d_node: return "d-node";
    case Method::d_friend: return "d-friend";
    case Method::d_follower: return "d-follower";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::vanilla, Method::fp, Method::fp_walk, Method::fp_two_step, Method::d_node,
                   Method::d_friend, Method::d_follower}) {
    if (to_string(m) == name) return m;
  }
  throw InputError("unknown method '" + std::string(name) + "'");
}

bool is_directed(Method m) noexcept {
  return m == Method::d_node || m == Method::d_friend || m == Method::d_follower;
}

void ExperimentConfig::validate() const {
  if (reps < 1) throw InputError("reps must be at least 1");
  if (n_samples < 1) throw InputError("samples must be at least 1");
  if (!(sharing_prob >= 0.0 && sharing_prob <= 1.0)) throw InputError("sharing probability must lie in [0, 1]");
  if (methods.empty()) throw InputError("at least one method is required");
  if (!file && !generate) throw InputError("either a graph file or generation parameters are required");
  const bool directed = file && file->directed;
  for (Method m : methods) {
    if (is_directed(m) != directed) {
      throw InputError("method " + std::string(to_string(m)) +
                       (directed ? " needs an undirected graph" : " needs a directed graph"));
    }
  }
  if (directed && (rkk_target || rho_target)) {
    throw InputError("correlation shaping is only supported on undirected graphs");
  }
  exposure::validate(CorrelationTarget{0.0, tolerance, max_iters});
}

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim_copy(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(line_no) + " is not 'key = value'");
    }
    std::string key = trim_copy(t.substr(0, eq));
    std::string value = trim_copy(t.substr(eq + 1));
    if (!static_keys().count(key) && !grid_keys().count(key)) {
      throw InputError("unknown config key '" + key + "' on line " + std::to_string(line_no));
    }
    kv[key] = value;
  }
  return kv;
}

ExperimentConfig config_from_key_values(const std::map<std::string, std::string>& kv) {
  ExperimentConfig c;
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto* v = get("graph")) {
    c.file = FileSource{*v, false};
    if (auto* d = get("directed")) c.file->directed = to_bool("directed", *d);
  } else {
    GenerateSpec gen;
    if (auto* v = get("nodes")) gen.nodes = to_count("nodes", *v);
    if (auto* v = get("alpha")) gen.alpha = to_real("alpha", *v);
    if (auto* v = get("kmin")) gen.k_min = to_count("kmin", *v);
    c.generate = gen;
  }
  if (auto* v = get("sharers")) c.sharers_path = *v;
  if (auto* v = get("assortativity")) c.rkk_target = to_target("assortativity", *v);
  if (auto* v = get("degree_sharing_corr")) c.rho_target = to_target("degree_sharing_corr", *v);
  if (auto* v = get("sharing_prob")) c.sharing_prob = to_real("sharing_prob", *v);
  if (auto* v = get("samples")) c.n_samples = to_count("samples", *v);
  if (auto* v = get("reps")) c.reps = to_count("reps", *v);
  if (auto* v = get("seed")) c.seed = to_count("seed", *v);
  if (auto* v = get("tolerance")) c.tolerance = to_real("tolerance", *v);
  if (auto* v = get("max_iters")) c.max_iters = to_count("max_iters", *v);
  if (auto* v = get("dbar_override")) c.d_bar_override = to_real("dbar_override", *v);
  if (auto* v = get("workers")) c.workers = std::max<std::uint64_t>(1, to_count("workers", *v));
  if (auto* v = get("methods")) {
    c.methods.clear();
    for (const auto& name : split_list(*v)) c.methods.push_back(parse_method(name));
  }
  return c;
}

GridSpec grid_from_key_values(const std::map<std::string, std::string>& kv) {
  GridSpec spec;
  spec.base = config_from_key_values(kv);
  if (spec.base.file) throw InputError("grid runs generate their graphs; 'graph' is not accepted");
  auto reals = [&](const char* key, auto convert, auto& dest) {
    auto it = kv.find(key);
    if (it == kv.end()) return;
    dest.clear();
    for (const auto& item : split_list(it->second)) dest.push_back(convert(key, item));
  };
  reals("alphas", to_real, spec.alphas);
  reals("assortativities", to_target, spec.rkk_targets);
  reals("degree_sharing_corrs", to_target, spec.rho_targets);
  reals("sharing_probs", to_real, spec.sharing_probs);
  return spec;
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
          try {
            fn(i);
          } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<RepRecord> run_monte_carlo(const Graph& g, const SharingState& s, const std::vector<Method>& methods,
                                       std::size_t n_samples, std::size_t reps, std::uint64_t seed,
                                       std::uint64_t cell_index, std::optional<double> d_bar_override,
                                       std::size_t workers) {
  const double f_bar = true_exposure(g, s);
  std::vector<RepRecord> out(methods.size() * reps);
  EstimateOptions opts;
  opts.d_bar_override = d_bar_override;
  parallel_for(out.size(), workers, [&](std::size_t idx) {
    const Method m = methods[idx / reps];
    const std::size_t rep = idx % reps;
    RngStream rng = RngStream(seed, tag(kSampleTag, {cell_index, static_cast<std::uint64_t>(m)})).derive(rep);
    const auto samples = draw_samples(g, m, n_samples, rng);
    const double est = m == Method::vanilla ? vanilla_estimate(g, samples, s, opts).estimate
                                            : fp_estimate(g, samples, s, opts).estimate;
    out[idx] = {rep, m, est, std::abs(est - f_bar)};
  });
  return out;
}

std::vector<RepRecord> run_monte_carlo(const DiGraph& g, const SharingState& s,
                                       const std::vector<Method>& methods, std::size_t n_samples,
                                       std::size_t reps, std::uint64_t seed, std::uint64_t cell_index,
                                       std::optional<double> d_bar_override, std::size_t workers) {
  const double f_bar = true_exposure(g, s);
  std::vector<RepRecord> out(methods.size() * reps);
  EstimateOptions opts;
  opts.d_bar_override = d_bar_override;
  parallel_for(out.size(), workers, [&](std::size_t idx) {
    const Method m = methods[idx / reps];
    const std::size_t rep = idx % reps;
    DirectedMode mode;
    switch (m) {
      case Method::d_node: mode = DirectedMode::node; break;
      case Method::d_friend: mode = DirectedMode::friends; break;
      case Method::d_follower: mode = DirectedMode::followers; break;
      default: throw InputError(std::string("method ") + std::string(to_string(m)) + " needs an undirected graph");
    }
    RngStream rng = RngStream(seed, tag(kSampleTag, {cell_index, static_cast<std::uint64_t>(m)})).derive(rep);
    std::vector<NodeId> samples(n_samples);
    for (auto& v : samples) v = sample_directed(g, mode, rng);
    const double est = directed_estimate(g, mode, samples, s, opts).estimate;
    out[idx] = {rep, m, est, std::abs(est - f_bar)};
  });
  return out;
}

std::optional<double> mean_abs_error_pct(const std::vector<RepRecord>& reps, Method m, double f_bar) {
  if (!(f_bar > 0.0)) return std::nullopt;
  double sum = 0, count = 0;
  for (const auto& r : reps) {
    if (r.method != m) continue;
    sum += r.abs_error;
    count += 1;
  }
  if (count == 0) return std::nullopt;
  return 100.0 * (sum / count) / f_bar;
}

std::vector<MethodSummary> summarize(const std::vector<RepRecord>& reps, const std::vector<Method>& methods,
                                     double f_bar) {
  std::vector<MethodSummary> out;
  for (Method m : methods) {
    MethodSummary s;
    s.method = m;
    double sum = 0, sum2 = 0, est = 0, count = 0;
    for (const auto& r : reps) {
      if (r.method != m) continue;
      sum += r.abs_error;
      sum2 += r.abs_error * r.abs_error;
      est += r.estimate;
      count += 1;
    }
    if (count > 0) {
      s.mean_abs_error = sum / count;
      s.mean_estimate = est / count;
      s.mean_abs_error_pct = mean_abs_error_pct(reps, m, f_bar);
      if (f_bar > 0.0) {
        const double var = count > 1 ? std::max(0.0, (sum2 - sum * sum / count) / (count - 1)) : 0.0;
        s.std_error_pct = 100.0 * std::sqrt(var / count) / f_bar;
      }
    }
    out.push_back(s);
  }
  return out;
}

ShapedGraph make_shaped_graph(const GenerateSpec& gen, std::optional<double> rkk_target,
                              const CorrelationTarget& shaping, RngStream& rng) {
  ShapedGraph out;
  const DegreeSequence seq = powerlaw_degree_sequence(gen.nodes, gen.alpha, gen.k_min, rng);
  out.graph = configuration_model(seq, rng);
  out.rkk_achieved = assortativity_coefficient(out.graph);
  if (rkk_target) {
    CorrelationTarget t = shaping;
    t.target = *rkk_target;
    RewireResult rw = rewire_to_assortativity(out.graph, t, rng);
    out.graph = std::move(rw.graph);
    out.rkk_achieved = rw.achieved;
    out.reached = rw.reached;
  }
  return out;
}

ShapedSharing make_shaped_sharing(const Graph& g, double p, std::optional<double> rho_target,
                                  const CorrelationTarget& shaping, RngStream& rng) {
  ShapedSharing out;
  out.sharing = bernoulli_sharing(g, p, rng);
  out.rho_achieved = degree_sharing_correlation(g, out.sharing);
  if (rho_target && out.sharing.num_sharers() > 0 && out.sharing.num_sharers() < g.num_nodes()) {
    CorrelationTarget t = shaping;
    t.target = *rho_target;
    SwapResult sw = swap_to_correlation(g, out.sharing, t, rng);
    out.sharing = std::move(sw.state);
    out.rho_achieved = sw.achieved;
    out.reached = sw.reached;
  } else if (rho_target) {
    out.reached = false;
  }
  return out;
}

StaticResult run_static_experiment(const Graph& g, const SharingState& s, const ExperimentConfig& config) {
  if (s.num_nodes() != g.num_nodes()) throw InputError("sharing state does not match the graph");
  StaticResult r;
  r.nodes = g.num_nodes();
  r.edges = g.num_edges();
  r.sharers = s.num_sharers();
  r.true_exposure = true_exposure(g, s);
  r.rkk_achieved = assortativity_coefficient(g);
  r.rho_achieved = degree_sharing_correlation(g, s);
  if (g.num_edges() > 0) {
    r.verdict = condition_empirical(g, s);
    r.variance_vanilla = exact_variance_vanilla(r.true_exposure, config.n_samples);
    r.variance_fp = exact_variance_fp(g, s, config.n_samples);
  }
  r.reps = run_monte_carlo(g, s, config.methods, config.n_samples, config.reps, config.seed, 0,
                           config.d_bar_override, config.workers);
  r.summaries = summarize(r.reps, config.methods, r.true_exposure);
  return r;
}

StaticResult run_static_experiment(const ExperimentConfig& config) {
  config.validate();
  const CorrelationTarget shaping{0.0, config.tolerance, config.max_iters};

  if (config.file && config.file->directed) {
    auto loaded = load_digraph(config.file->path);
    const DiGraph& g = loaded.graph;
    SharingState s;
    if (config.sharers_path) {
      s = read_sharers(*config.sharers_path, g.num_nodes(), loaded.original_ids);
    } else {
      RngStream rng(config.seed, kShareTag);
      std::vector<char> bits(g.num_nodes());
      for (auto& b : bits) b = rng.bernoulli(config.sharing_prob) ? 1 : 0;
      s = SharingState::from_bits(std::move(bits));
    }
    StaticResult r;
    r.nodes = g.num_nodes();
    r.edges = g.num_edges();
    r.sharers = s.num_sharers();
    r.true_exposure = true_exposure(g, s);
    r.reps = run_monte_carlo(g, s, config.methods, config.n_samples, config.reps, config.seed, 0,
                             config.d_bar_override, config.workers);
    r.summaries = summarize(r.reps, config.methods, r.true_exposure);
    return r;
  }

  Graph g;
  std::vector<std::uint64_t> original_ids;
  bool reached = true;
  RngStream graph_rng(config.seed, kGraphTag);
  if (config.file) {
    auto loaded = load_graph(config.file->path);
    g = std::move(loaded.graph);
    original_ids = std::move(loaded.original_ids);
    if (config.rkk_target) {
      CorrelationTarget t = shaping;
      t.target = *config.rkk_target;
      RewireResult rw = rewire_to_assortativity(g, t, graph_rng);
      g = std::move(rw.graph);
      reached = reached && rw.reached;
    }
  } else {
    ShapedGraph sg = make_shaped_graph(*config.generate, config.rkk_target, shaping, graph_rng);
    g = std::move(sg.graph);
    reached = reached && sg.reached;
  }

  SharingState s;
  RngStream share_rng(config.seed, kShareTag);
  if (config.sharers_path) {
    s = read_sharers(*config.sharers_path, g.num_nodes(), original_ids);
    if (config.rho_target) {
      CorrelationTarget t = shaping;
      t.target = *config.rho_target;
      SwapResult sw = swap_to_correlation(g, s, t, share_rng);
      s = std::move(sw.state);
      reached = reached && sw.reached;
    }
  } else {
    ShapedSharing sh = make_shaped_sharing(g, config.sharing_prob, config.rho_target, shaping, share_rng);
    s = std::move(sh.sharing);
    reached = reached && sh.reached;
  }

  StaticResult r = run_static_experiment(g, s, config);
  r.shaping_reached = reached;
  return r;
}

void write_reps_csv(std::ostream& out, const StaticResult& r) {
  out << "rep,method,estimate,abs_error,true_exposure\n";
  for (const auto& rec : r.reps) {
    out << rec.rep << ',' << to_string(rec.method) << ',' << format_real(rec.estimate) << ','
        << format_real(rec.abs_error) << ',' << format_real(r.true_exposure) << '\n';
  }
}

std::size_t GridResult::null_rows() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const GridRow& r) { return !r.mean_abs_error_pct; }));
}

bool GridResult::all_shaping_reached() const {
  return std::all_of(rows.begin(), rows.end(), [](const GridRow& r) { return r.shaping_reached; });
}

GridResult run_grid(const GridSpec& spec, const GridProgress& progress) {
  ExperimentConfig base = spec.base;
  if (!base.generate) base.generate = GenerateSpec{};
  base.file.reset();
  base.validate();
  for (double p : spec.sharing_probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("sharing probability must lie in [0, 1]");
  }
  const CorrelationTarget shaping{0.0, base.tolerance, base.max_iters};

  GridResult result;
  const std::size_t R = spec.rkk_targets.size(), H = spec.rho_targets.size(), P = spec.sharing_probs.size();
  for (std::size_t ai = 0; ai < spec.alphas.size(); ++ai) {
    GenerateSpec gen = *base.generate;
    gen.alpha = spec.alphas[ai];
    for (std::size_t ri = 0; ri < R; ++ri) {
      RngStream graph_rng(base.seed, tag(kGraphTag, {ai, ri}));
      ShapedGraph sg = make_shaped_graph(gen, spec.rkk_targets[ri], shaping, graph_rng);
      for (std::size_t hi = 0; hi < H; ++hi) {
        for (std::size_t pi = 0; pi < P; ++pi) {
          const std::size_t cell = ((ai * R + ri) * H + hi) * P + pi;
          RngStream share_rng(base.seed, tag(kShareTag, {ai, ri, hi, pi}));
          ShapedSharing sh =
              make_shaped_sharing(sg.graph, spec.sharing_probs[pi], spec.rho_targets[hi], shaping, share_rng);
          const double f_bar = true_exposure(sg.graph, sh.sharing);
          result.cell_true_exposure[cell] = f_bar;
          std::vector<RepRecord> reps;
          if (f_bar > 0.0) {
            reps = run_monte_carlo(sg.graph, sh.sharing, base.methods, base.n_samples, base.reps, base.seed,
                                   cell, base.d_bar_override, base.workers);
          }
          const auto summaries = summarize(reps, base.methods, f_bar);
          for (const auto& s : summaries) {
            GridRow row;
            row.cell_index = cell;
            row.alpha = gen.alpha;
            row.rkk_target = spec.rkk_targets[ri];
            row.rho_target = spec.rho_targets[hi];
            row.rkk_achieved = sg.rkk_achieved;
            row.rho_achieved = sh.rho_achieved;
            row.p = spec.sharing_probs[pi];
            row.p_hat = static_cast<double>(sh.sharing.num_sharers()) / static_cast<double>(sg.graph.num_nodes());
            row.method = s.method;
            row.true_exposure = f_bar;
            row.mean_abs_error_pct = s.mean_abs_error_pct;
            row.std_error_pct = s.std_error_pct;
            row.mean_abs_error = s.mean_abs_error;
            row.shaping_reached = sg.reached && sh.reached;
            if (progress) progress(row);
            result.rows.push_back(row);
          }
          if (!reps.empty()) result.ledgers[cell] = std::move(reps);
        }
      }
    }
  }
  return result;
}

void write_grid_csv(std::ostream& out, const GridResult& result) {
  out << "cell,alpha,rkk_target,rkk_achieved,rho_target,rho_achieved,p,p_hat,method,true_exposure,"
         "mean_abs_error_pct,std_error_pct,mean_abs_error,shaping_reached\n";
  for (const auto& r : result.rows) {
    if (!r.mean_abs_error_pct) continue;
    out << r.cell_index << ',' << format_real(r.alpha) << ',' << format_real(r.rkk_target) << ','
        << format_real(r.rkk_achieved) << ',' << format_real(r.rho_target) << ',' << format_real(r.rho_achieved)
        << ',' << format_real(r.p) << ',' << format_real(r.p_hat) << ',' << to_string(r.method) << ','
        << format_real(r.true_exposure) << ',' << format_real(r.mean_abs_error_pct) << ','
        << format_real(r.std_error_pct) << ',' << format_real(r.mean_abs_error) << ','
        << (r.shaping_reached ? 1 : 0) << '\n';
  }
}

void write_grid_ledger_csv(std::ostream& out, const GridResult& result) {
  out << "cell,method,rep,estimate,abs_error,true_exposure\n";
  for (const auto& [cell, reps] : result.ledgers) {
    const double f_bar = result.cell_true_exposure.at(cell);
    for (const auto& r : reps) {
      out << cell << ',' << to_string(r.method) << ',' << r.rep << ',' << format_real(r.estimate) << ','
          << format_real(r.abs_error) << ',' << format_real(f_bar) << '\n';
    }
  }
}

}  // namespace exposure
