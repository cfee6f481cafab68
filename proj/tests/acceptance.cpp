// Acceptance suite: one PASS/FAIL line per criterion, INFO lines for findings.
// Exit status is 1 when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "exposure/cascade.hpp"
#include "exposure/estimators.hpp"
#include "exposure/genmodel.hpp"
#include "exposure/graph.hpp"
#include "exposure/harness.hpp"
#include "exposure/tracking.hpp"
#include "oracles.hpp"

using namespace exposure;

namespace {

int failures = 0;

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void criterion(const char* name, double time_limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o = body();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < time_limit_s;
  const bool ok = o.ok && in_time;
  if (!ok) ++failures;
  std::printf("%s %s: %s [%.2fs, limit %.0fs%s]\n", ok ? "PASS" : "FAIL", name, o.detail.c_str(), secs,
              time_limit_s, in_time ? "" : ", exceeded");
  std::fflush(stdout);
}

void info(const std::string& line) {
  std::printf("INFO %s\n", line.c_str());
  std::fflush(stdout);
}

SharingState to_state(const std::vector<int>& share) {
  auto ids = oracle::sharer_ids(share);
  return SharingState::from_sharers(ids, share.size());
}

// Random undirected instance with at least one edge.
struct Instance {
  std::vector<Edge> edges;
  std::size_t n = 0;
  std::vector<int> share;
};

Instance random_instance(std::mt19937_64& rng, std::size_t n_lo, std::size_t n_hi) {
  std::uniform_int_distribution<std::size_t> size(n_lo, n_hi);
  std::uniform_real_distribution<double> unit(0.1, 0.7);
  for (;;) {
    Instance in;
    in.n = size(rng);
    in.edges = oracle::random_edges(in.n, unit(rng), rng);
    if (in.edges.empty()) continue;
    in.share = oracle::random_sharing(in.n, unit(rng), rng);
    return in;
  }
}

// ---------------------------------------------------------------------------

Outcome unbiasedness() {
  std::mt19937_64 rng(101);
  double worst = 0;
  for (int trial = 0; trial < 500; ++trial) {
    auto in = random_instance(rng, 2, 12);
    Graph g = Graph::from_edges(in.edges, in.n);
    SharingState s = to_state(in.share);
    const auto dense = oracle::dense_undirected(in.edges, in.n);
    const double f_bar = oracle::mean(oracle::exposures(dense, in.share));

    double e_vanilla = 0;
    for (NodeId v = 0; v < in.n; ++v) {
      NodeId one[] = {v};
      e_vanilla += vanilla_estimate(g, one, s).estimate / static_cast<double>(in.n);
    }
    // Y is a random end of a random edge: every arc head with weight 1/2|E|.
    double e_fp = 0;
    const double arcs = 2.0 * static_cast<double>(g.num_edges());
    for (auto [u, v] : g.edges()) {
      for (NodeId y : {u, v}) {
        NodeId one[] = {y};
        e_fp += fp_estimate(g, one, s).estimate / arcs;
      }
    }
    worst = std::max({worst, std::abs(e_vanilla - f_bar), std::abs(e_fp - f_bar)});
  }
  return {worst <= 1e-12, fmt("500 graphs, max |E[estimate] - f_bar| = %.3g (tol 1e-12)", worst)};
}

// Central moments of the single-sample estimator laws, by enumeration.
struct Law {
  std::vector<double> values, probs;
  double moment(double about, int k) const {
    double m = 0;
    for (std::size_t i = 0; i < values.size(); ++i) m += probs[i] * std::pow(values[i] - about, k);
    return m;
  }
};

Outcome variances() {
  std::mt19937_64 rng(202);
  const std::size_t draws = 100000;
  double worst_z = 0;
  double worst_formula = 0;
  for (int trial = 0; trial < 20; ++trial) {
    auto in = random_instance(rng, 6, 12);
    Graph g = Graph::from_edges(in.edges, in.n);
    SharingState s = to_state(in.share);
    const auto dense = oracle::dense_undirected(in.edges, in.n);
    const auto f = oracle::exposures(dense, in.share);
    const double f_bar = oracle::mean(f);
    const double d_bar = average_degree(g);

    Law vanilla, fp;
    for (std::size_t v = 0; v < in.n; ++v) {
      vanilla.values.push_back(f[v]);
      vanilla.probs.push_back(1.0 / static_cast<double>(in.n));
      if (dense.deg[v] == 0) continue;
      fp.values.push_back(d_bar * f[v] / static_cast<double>(dense.deg[v]));
      fp.probs.push_back(static_cast<double>(dense.deg[v]) / static_cast<double>(dense.arcs.size()));
    }
    const double var_v = exact_variance_vanilla(f_bar, 1);
    const double var_f = exact_variance_fp(g, s, 1);
    worst_formula = std::max({worst_formula, std::abs(var_v - vanilla.moment(f_bar, 2)),
                              std::abs(var_f - fp.moment(f_bar, 2))});

    RngStream stream(303, static_cast<std::uint64_t>(trial));
    auto check = [&](const Law& law, double exact, bool is_fp) {
      double sum = 0, sum2 = 0;
      for (std::size_t i = 0; i < draws; ++i) {
        NodeId one[1];
        double x;
        if (is_fp) {
          one[0] = sample_random_friend(g, stream);
          x = fp_estimate(g, one, s).estimate;
        } else {
          one[0] = sample_uniform_node(g, stream);
          x = vanilla_estimate(g, one, s).estimate;
        }
        sum += x;
        sum2 += x * x;
      }
      const double nd = static_cast<double>(draws);
      const double mean = sum / nd;
      const double sample_var = (sum2 - nd * mean * mean) / (nd - 1);
      // Standard error of the sample variance from the exact fourth moment.
      const double mu4 = law.moment(f_bar, 4);
      const double se = std::sqrt(std::max(0.0, (mu4 - (nd - 3) / (nd - 1) * exact * exact) / nd));
      const double z = se > 0 ? std::abs(sample_var - exact) / se : (sample_var == exact ? 0.0 : 1e9);
      worst_z = std::max(worst_z, z);
    };
    check(vanilla, var_v, false);
    check(fp, var_f, true);
  }

  // Five-node star, center sharing.
  std::vector<Edge> star{{0, 1}, {0, 2}, {0, 3}, {0, 4}};
  Graph g = Graph::from_edges(star, 5);
  SharingState s = SharingState::from_sharers(std::vector<NodeId>{0}, 5);
  const double sv = exact_variance_vanilla(true_exposure(g, s), 1);
  const double sf = exact_variance_fp(g, s, 1);
  const bool star_ok = std::abs(sv - 0.16) <= 1e-12 && std::abs(sf - 0.64) <= 1e-12;

  const bool ok = worst_z <= 3.0 && worst_formula <= 1e-12 && star_ok;
  return {ok, fmt("20 graphs x 2 estimators, max |z| = %.2f (limit 3); formula vs enumeration %.3g; "
                  "star vanilla %.12g fp %.12g",
                  worst_z, worst_formula, sv, sf)};
}

int sign_of(double x) { return std::abs(x) <= kTieTolerance ? 0 : (x > 0 ? 1 : -1); }

Outcome sign_equivalence() {
  std::mt19937_64 rng(404);
  int agree = 0, ties = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Instance in;
    if (trial % 10 == 0) {
      // Regular graphs make the condition vanish exactly.
      in.n = 5 + static_cast<std::size_t>(trial / 10);
      for (std::size_t v = 0; v < in.n; ++v) {
        in.edges.emplace_back(static_cast<NodeId>(v), static_cast<NodeId>((v + 1) % in.n));
      }
      in.share = oracle::random_sharing(in.n, 0.4, rng);
    } else {
      in = random_instance(rng, 3, 30);
    }
    Graph g = Graph::from_edges(in.edges, in.n);
    SharingState s = to_state(in.share);
    const double lhs = condition_empirical(g, s).lhs;
    const double gap = exact_variance_vanilla(true_exposure(g, s), 1) - exact_variance_fp(g, s, 1);
    if (sign_of(lhs) == sign_of(gap)) ++agree;
    if (sign_of(lhs) == 0) ++ties;
  }
  return {agree == 200, fmt("%d/200 signs agree (%d ties)", agree, ties)};
}

std::vector<double> linspace(double lo, double hi, int k) {
  std::vector<double> v;
  for (int i = 0; i < k; ++i) v.push_back(lo + (hi - lo) * i / (k - 1));
  return v;
}

Outcome independent_grid() {
  const auto rho0 = linspace(0.5, 0.99, 10);
  int checked = 0, negative = 0;
  double worst = -1e300;
  auto run = [&](const DegreeLaw& law) {
    for (double r : rho0) {
      const double lhs = condition_independent_case(law, r).verdict.lhs;
      ++checked;
      if (lhs < 0) ++negative;
      worst = std::max(worst, lhs);
    }
  };
  for (double a : linspace(2.1, 3.5, 10)) run(DegreeLaw::powerlaw(a));
  for (double l : linspace(0.1, 2.0, 10)) run(DegreeLaw::exponential(l));
  return {negative == checked, fmt("%d/%d grid points with lhs < 0, max lhs %.4g", negative, checked, worst)};
}

// ---------------------------------------------------------------------------

struct Fig1Cell {
  double rkk, rho;
  bool fp_should_win;
};
constexpr Fig1Cell kFig1Cells[] = {{0.2, 0.2, true}, {-0.2, -0.2, true}, {0.2, -0.2, false}, {-0.2, 0.2, false}};
constexpr double kFig1P = 0.01;

// Wins per (alpha, cell) over seeds 1..5.
std::vector<int> fig1_wins(double p, std::string& detail) {
  std::vector<int> wins;
  for (double alpha : {2.2, 2.5}) {
    for (const auto& cell : kFig1Cells) {
      int w = 0;
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ExperimentConfig c;
        c.generate = GenerateSpec{2000, alpha, 1};
        c.rkk_target = cell.rkk;
        c.rho_target = cell.rho;
        c.sharing_prob = p;
        c.n_samples = 100;
        c.reps = 500;
        c.seed = seed;
        auto r = run_static_experiment(c);
        const double v = r.summaries[0].mean_abs_error;
        const double f = r.summaries[1].mean_abs_error;
        if (cell.fp_should_win ? f < v : v < f) ++w;
      }
      wins.push_back(w);
      detail += fmt(" a%.1f(%+.1f,%+.1f)=%d/5", alpha, cell.rkk, cell.rho, w);
    }
  }
  return wins;
}

Outcome fig1() {
  std::string detail;
  auto wins = fig1_wins(kFig1P, detail);
  const bool ok = std::all_of(wins.begin(), wins.end(), [](int w) { return w >= 4; });
  return {ok, fmt("n=2000 reps=500 samples=100 p=%.3g, seeds with the expected ordering:", kFig1P) + detail};
}

// Time-averaged tracker errors over seeds 1..5 for one (model, rkk) cell.
struct Fig2Tally {
  int wins = 0;
  std::string detail;
};

Fig2Tally fig2_cell(CascadeModel model, double rkk) {
  Fig2Tally t;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RngStream graph_rng(seed, 0);
    ShapedGraph sg = make_shaped_graph(GenerateSpec{10000, 2.5, 1}, rkk, CorrelationTarget{rkk, 0.01, 100000},
                                       graph_rng);
    TrackingConfig cfg;
    cfg.cascade.model = model;
    cfg.cascade.p_inf = 0.05;
    cfg.cascade.icm_retry = true;
    cfg.cascade.theta = 0.05;
    cfg.seed_count = 10;
    cfg.diffusion_steps = 100;
    cfg.updates_per_step = 100;
    cfg.vanilla_policy = cfg.fp_policy = StepPolicy::constant(0.01);
    auto series = run_tracking_experiment(sg.graph, cfg, RngStream(seed, 1));
    const double v = series.mean_vanilla_error();
    const double f = series.mean_fp_error();
    const bool ok = rkk > 0 ? f < v : v < f;
    if (ok) ++t.wins;
    t.detail += fmt(" [rkk %.3f van %.4f fp %.4f final f %.3f]", sg.rkk_achieved.value_or(NAN), v, f,
                    series.records.back().true_exposure);
  }
  return t;
}

void fig2(CascadeModel model, double rkk, const char* name) {
  criterion(name, 150, [&] {
    auto t = fig2_cell(model, rkk);
    return Outcome{t.wins >= 4, fmt("%s wins %d/5 (need 4):", rkk > 0 ? "fp" : "vanilla", t.wins) + t.detail};
  });
}

// ---------------------------------------------------------------------------

Outcome random_walk() {
  std::mt19937_64 rng(505);
  std::vector<Edge> edges;
  Graph g;
  do {
    edges = oracle::random_edges(30, 0.15, rng);
    g = Graph::from_edges(edges, 30);
  } while (!is_connected(g) || is_bipartite(g));
  RngStream stream(606, 0);
  const std::size_t count = 100000;
  auto samples = random_walk_friends(g, 0, WalkOptions{}, count, stream);
  std::vector<double> freq(30, 0);
  for (NodeId v : samples) freq[v] += 1.0 / static_cast<double>(count);
  double tv = 0;
  for (NodeId v = 0; v < 30; ++v) {
    tv += std::abs(freq[v] - static_cast<double>(g.degree(v)) / (2.0 * static_cast<double>(g.num_edges())));
  }
  tv /= 2;
  return {tv < 0.02 && samples.size() == count, fmt("%zu samples, TV = %.4f (limit 0.02)", samples.size(), tv)};
}

Outcome cascade_invariants() {
  std::mt19937_64 rng(707);
  int monotone = 0;
  int ltm_runs = 0, ltm_identical = 0;
  for (int run = 0; run < 1000; ++run) {
    auto in = random_instance(rng, 10, 60);
    Graph g = Graph::from_edges(in.edges, in.n);
    CascadeParams params;
    params.model = run % 2 == 0 ? CascadeModel::icm : CascadeModel::ltm;
    params.p_inf = std::uniform_real_distribution<double>(0.01, 0.5)(rng);
    params.icm_retry = run % 4 == 2;
    params.theta = std::uniform_real_distribution<double>(0.05, 0.6)(rng);
    RngStream seeds_rng(808, static_cast<std::uint64_t>(run));
    auto seeds = choose_seeds(g, 1 + static_cast<std::size_t>(run % 3), seeds_rng);
    auto traj = run_cascade(g, params, seeds, 20, RngStream(909, static_cast<std::uint64_t>(run)));
    bool ok = true;
    for (std::size_t t = 1; t < traj.states.size(); ++t) {
      for (NodeId v : traj.states[t - 1].sharers()) ok = ok && traj.states[t].shares(v);
    }
    if (ok) ++monotone;
    if (params.model == CascadeModel::ltm) {
      ++ltm_runs;
      auto again = run_cascade(g, params, seeds, 20, RngStream(911, static_cast<std::uint64_t>(run)));
      bool same = again.states.size() == traj.states.size() && again.fixed_point_step == traj.fixed_point_step;
      for (std::size_t t = 0; same && t < traj.states.size(); ++t) {
        same = again.states[t].bits() == traj.states[t].bits();
      }
      if (same) ++ltm_identical;
    }
  }
  return {monotone == 1000 && ltm_identical == ltm_runs,
          fmt("%d/1000 runs monotone; %d/%d LTM reruns identical", monotone, ltm_identical, ltm_runs)};
}

Outcome directed_enumeration() {
  std::mt19937_64 rng(1001);
  double worst_node = 0, worst_friend = 0, worst_follower = 0;
  int friend_dev = 0, follower_dev = 0, graphs = 0;
  while (graphs < 100) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(2, 10)(rng);
    auto edges = oracle::random_edges(n, std::uniform_real_distribution<double>(0.1, 0.6)(rng), rng, true);
    if (edges.empty()) continue;
    ++graphs;
    auto share = oracle::random_sharing(n, 0.4, rng);
    DiGraph g = DiGraph::from_edges(edges, n);
    SharingState s = to_state(share);
    const auto dense = oracle::dense_directed(edges, n);
    const double f_bar = oracle::mean(oracle::exposures(dense, share));
    const double m = static_cast<double>(g.num_edges());

    double node = 0, friends = 0, followers = 0;
    for (NodeId v = 0; v < n; ++v) {
      NodeId one[] = {v};
      node += directed_estimate(g, DirectedMode::node, one, s).estimate / static_cast<double>(n);
      if (g.out_degree(v) > 0) {
        friends += static_cast<double>(g.out_degree(v)) / m *
                   directed_estimate(g, DirectedMode::friends, one, s).estimate;
      }
      if (g.in_degree(v) > 0) {
        followers += static_cast<double>(g.in_degree(v)) / m *
                     directed_estimate(g, DirectedMode::followers, one, s).estimate;
      }
    }
    worst_node = std::max(worst_node, std::abs(node - f_bar));
    worst_friend = std::max(worst_friend, std::abs(friends - f_bar));
    worst_follower = std::max(worst_follower, std::abs(followers - f_bar));
    if (std::abs(friends - f_bar) > 1e-12) ++friend_dev;
    if (std::abs(followers - f_bar) > 1e-12) ++follower_dev;
  }
  info(fmt("directed friend mode deviates from f_bar on %d/100 graphs (max %.4f); follower mode on %d/100 "
           "(max %.4f)",
           friend_dev, worst_friend, follower_dev, worst_follower));
  return {worst_node <= 1e-12, fmt("100 graphs, node mode max |E - f_bar| = %.3g (tol 1e-12)", worst_node)};
}

}  // namespace

int main() {
  criterion("unbiasedness", 10, unbiasedness);
  criterion("variance-formulas", 30, variances);
  criterion("sign-equivalence", 10, sign_equivalence);
  criterion("independent-case-grid", 5, independent_grid);

  criterion("static-orderings", 600, fig1);
  for (double p : {0.005, 0.02, 0.05, 0.1}) {
    std::string detail;
    fig1_wins(p, detail);
    info(fmt("static orderings at p=%.3g:", p) + detail);
  }

  fig2(CascadeModel::icm, 0.2, "tracking-icm-assortative");
  fig2(CascadeModel::icm, -0.2, "tracking-icm-disassortative");
  fig2(CascadeModel::ltm, 0.2, "tracking-ltm-assortative");
  fig2(CascadeModel::ltm, -0.2, "tracking-ltm-disassortative");

  criterion("random-walk-stationarity", 5, random_walk);
  criterion("cascade-invariants", 60, cascade_invariants);
  criterion("directed-enumeration", 10, directed_enumeration);

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
