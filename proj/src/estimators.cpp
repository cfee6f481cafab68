#include "exposure/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "exposure/error.hpp"

namespace exposure {

std::string_view to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::vanilla: return "vanilla";
    case EstimatorKind::fp: return "fp";
    case EstimatorKind::directed_node: return "d-node";
    case EstimatorKind::directed_friend: return "d-friend";
    case EstimatorKind::directed_follower: return "d-follower";
  }
  return "unknown";
}

std::string_view to_string(SignGuess g) noexcept {
  switch (g) {
    case SignGuess::positive: return "positive";
    case SignGuess::negative: return "negative";
    case SignGuess::inconclusive: return "inconclusive";
  }
  return "unknown";
}

EstimatorReport vanilla_estimate(std::span<const char> exposures) {
  if (exposures.empty()) throw InputError("estimate needs at least one sample");
  EstimatorReport r;
  r.kind = EstimatorKind::vanilla;
  r.n = exposures.size();
  std::size_t hits = 0;
  for (char f : exposures) hits += f ? 1 : 0;
  r.estimate = static_cast<double>(hits) / static_cast<double>(r.n);
  return r;
}

EstimatorReport vanilla_estimate(const Graph& g, std::span<const NodeId> nodes, const SharingState& s,
                                 const EstimateOptions& opts) {
  if (nodes.empty()) throw InputError("estimate needs at least one sample");
  EstimatorReport r;
  r.kind = EstimatorKind::vanilla;
  r.n = nodes.size();
  r.d_bar = opts.d_bar_override.value_or(average_degree(g));
  std::size_t hits = 0;
  for (NodeId v : nodes) {
    const bool f = exposure(g, s, v);
    hits += f ? 1 : 0;
    if (opts.keep_ledger) r.ledger.push_back({v, f, 0});
  }
  r.estimate = static_cast<double>(hits) / static_cast<double>(r.n);
  return r;
}

EstimatorReport fp_estimate(const Graph& g, std::span<const NodeId> friends, const SharingState& s,
                            const EstimateOptions& opts) {
  if (friends.empty()) throw InputError("estimate needs at least one sample");
  if (g.num_edges() == 0) throw InputError("friendship-paradox estimate needs at least one edge");
  EstimatorReport r;
  r.kind = EstimatorKind::fp;
  r.n = friends.size();
  r.d_bar = opts.d_bar_override.value_or(average_degree(g));
  double acc = 0.0;
  for (NodeId y : friends) {
    const std::size_t d = g.degree(y);
    if (d == 0) throw InputError("sampled friend " + std::to_string(y) + " has no neighbors");
    const bool f = exposure(g, s, y);
    if (f) acc += 1.0 / static_cast<double>(d);
    if (opts.keep_ledger) r.ledger.push_back({y, f, d});
  }
  r.estimate = r.d_bar * acc / static_cast<double>(r.n);
  return r;
}

EstimatorReport directed_estimate(const DiGraph& g, DirectedMode mode, std::span<const NodeId> samples,
                                  const SharingState& s, const EstimateOptions& opts) {
  if (samples.empty()) throw InputError("estimate needs at least one sample");
  if (mode != DirectedMode::node && g.num_edges() == 0) {
    throw InputError("friend and follower estimates need at least one edge");
  }
  EstimatorReport r;
  r.n = samples.size();
  r.d_bar = opts.d_bar_override.value_or(average_degree(g));
  double acc = 0.0;
  for (NodeId v : samples) {
    const bool f = exposure(g, s, v);
    std::size_t d = 0;
    switch (mode) {
      case DirectedMode::node:
        acc += f ? 1.0 : 0.0;
        break;
      case DirectedMode::friends:
        d = g.out_degree(v);
        break;
      case DirectedMode::followers:
        d = g.in_degree(v);
        break;
    }
    if (mode != DirectedMode::node) {
      if (d == 0) throw InputError("sampled node " + std::to_string(v) + " has zero weighting degree");
      if (f) acc += 1.0 / static_cast<double>(d);
    }
    if (opts.keep_ledger) r.ledger.push_back({v, f, d});
  }
  switch (mode) {
    case DirectedMode::node:
      r.kind = EstimatorKind::directed_node;
      r.estimate = acc / static_cast<double>(r.n);
      break;
    case DirectedMode::friends:
      r.kind = EstimatorKind::directed_friend;
      r.estimate = r.d_bar * acc / static_cast<double>(r.n);
      break;
    case DirectedMode::followers:
      r.kind = EstimatorKind::directed_follower;
      r.estimate = r.d_bar * acc / static_cast<double>(r.n);
      break;
  }
  return r;
}

double exact_variance_vanilla(double f_bar, std::size_t n) {
  if (n == 0) throw InputError("sample count must be at least 1");
  if (!(f_bar >= 0.0 && f_bar <= 1.0)) throw InputError("average exposure must lie in [0, 1]");
  return f_bar * (1.0 - f_bar) / static_cast<double>(n);
}

double exact_variance_fp(const Graph& g, const SharingState& s, std::size_t n) {
  if (n == 0) throw InputError("sample count must be at least 1");
  if (g.num_edges() == 0) throw InputError("friendship-paradox variance needs at least one edge");
  const auto f = exposure_vector(g, s);
  const double nodes = static_cast<double>(g.num_nodes());
  double exposed = 0.0, weighted = 0.0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (!f[v]) continue;
    exposed += 1.0;
    weighted += 1.0 / static_cast<double>(g.degree(v));
  }
  const double f_bar = exposed / nodes;
  const double var1 = average_degree(g) * weighted / nodes - f_bar * f_bar;
  return std::max(var1, 0.0) / static_cast<double>(n);
}

ConditionVerdict make_verdict(double lhs) noexcept {
  return {lhs, lhs >= 0.0, std::abs(lhs) <= kTieTolerance};
}

ConditionVerdict condition_empirical(const Graph& g, const SharingState& s) {
  if (g.num_edges() == 0) throw InputError("variance comparison needs at least one edge");
  const auto f = exposure_vector(g, s);
  const double d_bar = average_degree(g);
  double acc = 0.0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    // f(v) first: unexposed (including isolated) nodes never touch 1/d(v).
    if (!f[v]) continue;
    acc += 1.0 - d_bar / static_cast<double>(g.degree(v));
  }
  return make_verdict(acc / static_cast<double>(g.num_nodes()));
}

void MarkovianSpec::validate(double tol) const {
  const std::size_t m = degrees.size();
  if (m == 0) throw InputError("Markovian spec has an empty degree support");
  if (p_k.size() != m || p_cond.size() != m || share_given_k.size() != m) {
    throw InputError("Markovian spec tables disagree with the degree support size");
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (degrees[i] == 0) throw InputError("Markovian spec support must not contain degree 0");
    if (i > 0 && degrees[i] <= degrees[i - 1]) throw InputError("degree support must be strictly increasing");
    if (p_k[i] < 0) throw InputError("P(k) must be non-negative");
    if (!(share_given_k[i] >= 0 && share_given_k[i] <= 1)) throw InputError("rho_S(1|k) must lie in [0, 1]");
    if (p_cond[i].size() != m) throw InputError("P(k'|k) must be square");
    double row = 0;
    for (double q : p_cond[i]) {
      if (q < 0) throw InputError("P(k'|k) must be non-negative");
      row += q;
    }
    if (std::abs(row - 1.0) > tol) throw InputError("each row of P(k'|k) must sum to 1");
  }
  double total = 0;
  for (double p : p_k) total += p;
  if (std::abs(total - 1.0) > tol) throw InputError("P(k) must sum to 1");
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double lhs = static_cast<double>(degrees[i]) * p_k[i] * p_cond[i][j];
      const double rhs = static_cast<double>(degrees[j]) * p_k[j] * p_cond[j][i];
      if (std::abs(lhs - rhs) > tol) {
        throw InputError("Markovian spec violates detailed balance k P(k) P(k'|k) = k' P(k') P(k|k')");
      }
    }
  }
}

double MarkovianSpec::mean_degree() const {
  double d = 0;
  for (std::size_t i = 0; i < degrees.size(); ++i) d += static_cast<double>(degrees[i]) * p_k[i];
  return d;
}

std::size_t MarkovianSpec::index_of(std::size_t k) const {
  auto it = std::lower_bound(degrees.begin(), degrees.end(), k);
  if (it == degrees.end() || *it != k) {
    throw InputError("degree " + std::to_string(k) + " is not in the Markovian support");
  }
  return static_cast<std::size_t>(it - degrees.begin());
}

MarkovianSpec MarkovianSpec::from_graph(const Graph& g, const SharingState& s) {
  std::map<std::size_t, std::size_t> count, sharing;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    const std::size_t d = g.degree(v);
    if (d == 0) continue;
    ++count[d];
    if (s.shares(v)) ++sharing[d];
  }
  if (count.empty()) throw InputError("graph has no edges");

  MarkovianSpec spec;
  double nodes = 0;
  for (const auto& [k, c] : count) {
    spec.degrees.push_back(k);
    nodes += static_cast<double>(c);
  }
  const std::size_t m = spec.degrees.size();
  spec.p_k.resize(m);
  spec.share_given_k.resize(m);
  spec.p_cond.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    const double c = static_cast<double>(count[spec.degrees[i]]);
    spec.p_k[i] = c / nodes;
    spec.share_given_k[i] = static_cast<double>(sharing[spec.degrees[i]]) / c;
  }
  for (const auto& [u, v] : g.edges()) {
    const std::size_t i = spec.index_of(g.degree(u)), j = spec.index_of(g.degree(v));
    spec.p_cond[i][j] += 1.0;
    spec.p_cond[j][i] += 1.0;
  }
  for (std::size_t i = 0; i < m; ++i) {
    // Arcs leaving class i: k_i * count_i.
    const double arcs = static_cast<double>(spec.degrees[i]) * static_cast<double>(count[spec.degrees[i]]);
    for (double& q : spec.p_cond[i]) q /= arcs;
  }
  return spec;
}

double markovian_exposure_prob(const MarkovianSpec& spec, std::size_t k) {
  const std::size_t i = spec.index_of(k);
  double q = 0;
  for (std::size_t j = 0; j < spec.degrees.size(); ++j) q += spec.p_cond[i][j] * (1.0 - spec.share_given_k[j]);
  return 1.0 - std::pow(q, static_cast<double>(k));
}

ConditionVerdict condition_analytic(const MarkovianSpec& spec) {
  spec.validate();
  const double d_bar = spec.mean_degree();
  double lhs = 0;
  for (std::size_t i = 0; i < spec.degrees.size(); ++i) {
    const double k = static_cast<double>(spec.degrees[i]);
    lhs += spec.p_k[i] * (1.0 - d_bar / k) * markovian_exposure_prob(spec, spec.degrees[i]);
  }
  return make_verdict(lhs);
}

IndependentCaseResult condition_independent_case(const DegreeLaw& law, double share_prob_zero) {
  if (!(share_prob_zero >= 0.0 && share_prob_zero <= 1.0)) {
    throw InputError("non-sharing probability must lie in [0, 1]");
  }
  if (law.k_lo < 1 || law.k_hi < law.k_lo) throw InputError("degree range must satisfy 1 <= k_lo <= k_hi");
  const bool powerlaw = law.family == DegreeLaw::Family::powerlaw;
  if (powerlaw && !(law.parameter > 2.0)) throw InputError("power-law exponent must exceed 2");
  if (!powerlaw && !(law.parameter > 0.0)) throw InputError("exponential rate must be positive");

  // Unnormalized weights relative to k_lo to avoid underflow at large rates.
  auto weight = [&](double k) {
    const double lo = static_cast<double>(law.k_lo);
    return powerlaw ? std::pow(k / lo, -law.parameter) : std::exp(-law.parameter * (k - lo));
  };
  double z = 0, zk = 0;
  for (std::size_t k = law.k_lo; k <= law.k_hi; ++k) {
    const double w = weight(static_cast<double>(k));
    z += w;
    zk += w * static_cast<double>(k);
  }
  const double d_bar = zk / z;
  const double log_q = std::log(share_prob_zero);
  double lhs = 0;
  for (std::size_t k = law.k_lo; k <= law.k_hi; ++k) {
    const double kk = static_cast<double>(k);
    // 1 - q^k via expm1 for precision when q is close to 1.
    const double exposed = share_prob_zero == 0.0 ? 1.0 : -std::expm1(kk * log_q);
    lhs += weight(kk) * (1.0 - d_bar / kk) * exposed;
  }
  lhs /= z;

  IndependentCaseResult out;
  out.verdict = make_verdict(lhs);
  const double lo = static_cast<double>(law.k_lo), edge = static_cast<double>(law.k_hi) + 0.5;
  if (powerlaw) {
    // Integral approximation of the neglected tail.
    out.truncation_mass = std::pow(edge / lo, -law.parameter) * edge / (law.parameter - 1.0) / z;
  } else {
    out.truncation_mass = std::exp(-law.parameter * (static_cast<double>(law.k_hi) + 1.0 - lo)) /
                          (-std::expm1(-law.parameter)) / z;
  }
  return out;
}

SignHeuristicResult sharer_degree_sign_heuristic(const Graph& g, const SharingState& s,
                                                 std::size_t sample_size, RngStream& rng) {
  if (sample_size == 0) throw InputError("sample size must be at least 1");
  if (s.num_sharers() == 0) throw InputError("sign heuristic needs a nonempty sharer set");
  const std::size_t n = g.num_nodes();
  if (s.num_sharers() == n) throw InputError("sign heuristic needs at least one non-sharer");

  SignHeuristicResult r;
  double sum = 0;
  for (NodeId v : s.sharers()) sum += static_cast<double>(g.degree(v));
  r.sharer_mean_degree = sum / static_cast<double>(s.num_sharers());

  const std::size_t others = n - s.num_sharers();
  double m1 = 0, m2 = 0, drawn = 0;
  if (sample_size >= others) {
    // Census: the non-sharer mean is exact.
    for (NodeId v = 0; v < n; ++v) {
      if (s.shares(v)) continue;
      m1 += static_cast<double>(g.degree(v));
      drawn += 1;
    }
    r.nonsharer_mean_degree = m1 / drawn;
    r.standard_error = 0.0;
  } else {
    while (drawn < static_cast<double>(sample_size)) {
      NodeId v = sample_uniform_node(g, rng);
      if (s.shares(v)) continue;
      const double d = static_cast<double>(g.degree(v));
      m1 += d;
      m2 += d * d;
      drawn += 1;
    }
    r.nonsharer_mean_degree = m1 / drawn;
    const double var = drawn > 1 ? std::max(0.0, (m2 - m1 * m1 / drawn) / (drawn - 1)) : 0.0;
    r.standard_error = std::sqrt(var / drawn);
  }
  const double gap = r.sharer_mean_degree - r.nonsharer_mean_degree;
  if (gap > 2.0 * r.standard_error && std::abs(gap) > kTieTolerance) {
    r.sign = SignGuess::positive;
  } else if (-gap > 2.0 * r.standard_error && std::abs(gap) > kTieTolerance) {
    r.sign = SignGuess::negative;
  }
  return r;
}

}  // namespace exposure
