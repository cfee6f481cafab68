#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "exposure/cascade.hpp"
#include "exposure/graph.hpp"
#include "exposure/rng.hpp"

namespace exposure {

enum class EstimatorKind { vanilla, fp, directed_node, directed_friend, directed_follower };

std::string_view to_string(EstimatorKind kind) noexcept;

struct SampleRecord {
  NodeId node;
  bool exposed;
  std::size_t degree;  ///< degree used as the importance weight (0 for uniform kinds)
};

/// Result of one estimator call. FP-type estimates are not clamped and can
/// exceed 1.
struct EstimatorReport {
  EstimatorKind kind = EstimatorKind::vanilla;
  double estimate = 0.0;
  std::size_t n = 0;
  double d_bar = 0.0;
  std::vector<SampleRecord> ledger;  ///< filled only when requested
};

struct EstimateOptions {
  std::optional<double> d_bar_override;
  bool keep_ledger = false;
};

/// Mean of observed exposure bits.
EstimatorReport vanilla_estimate(std::span<const char> exposures);
/// Uniform-node estimate from sampled node ids.
EstimatorReport vanilla_estimate(const Graph& g, std::span<const NodeId> nodes, const SharingState& s,
                                 const EstimateOptions& opts = {});

/// (d_bar / n) * sum f(Y_i) / d(Y_i) over sampled friends Y_i.
EstimatorReport fp_estimate(const Graph& g, std::span<const NodeId> friends, const SharingState& s,
                            const EstimateOptions& opts = {});

/// The three directed estimators. d_bar = |E| / |V|; friends divide by
/// d_out, followers by d_in.
EstimatorReport directed_estimate(const DiGraph& g, DirectedMode mode, std::span<const NodeId> samples,
                                  const SharingState& s, const EstimateOptions& opts = {});

/// f_bar (1 - f_bar) / n.
double exact_variance_vanilla(double f_bar, std::size_t n);

/// (d_bar * E{f(X)/d(X)} - f_bar^2) / n, by enumeration over nodes.
double exact_variance_fp(const Graph& g, const SharingState& s, std::size_t n);

struct ConditionVerdict {
  double lhs = 0.0;
  bool fp_preferred = false;
  bool tie = false;
};

inline constexpr double kTieTolerance = 1e-12;

ConditionVerdict make_verdict(double lhs) noexcept;

/// E{f(X)(1 - d_bar/d(X))} over uniform X on a concrete graph. Its sign
/// decides which estimator has the smaller variance.
ConditionVerdict condition_empirical(const Graph& g, const SharingState& s);

/// Degree-class description of a Markovian random network.
struct MarkovianSpec {
  std::vector<std::size_t> degrees;          ///< support, strictly increasing
  std::vector<double> p_k;                   ///< P(k)
  std::vector<std::vector<double>> p_cond;   ///< p_cond[i][j] = P(k_j | k_i)
  std::vector<double> share_given_k;         ///< rho_S(1 | k)

  /// Throws InputError when sizes disagree, rows are not distributions, the
  /// joint is not symmetric (detailed balance) or the support contains 0.
  void validate(double tol = 1e-9) const;
  double mean_degree() const;
  std::size_t index_of(std::size_t k) const;  ///< throws when k is outside the support

  /// Exact P(k), P(k'|k), rho_S(1|k) tabulated from a concrete graph.
  /// Isolated nodes are dropped.
  static MarkovianSpec from_graph(const Graph& g, const SharingState& s);
};

/// 1 - (sum_k' P(k'|k) rho_S(0|k'))^k.
double markovian_exposure_prob(const MarkovianSpec& spec, std::size_t k);

/// sum_k P(k) (1 - d_bar/k) P{f = 1 | k}.
ConditionVerdict condition_analytic(const MarkovianSpec& spec);

struct DegreeLaw {
  enum class Family { powerlaw, exponential } family;
  double parameter;           ///< alpha or lambda
  std::size_t k_lo = 1;
  std::size_t k_hi = 10000;

  static DegreeLaw powerlaw(double alpha, std::size_t k_lo = 1, std::size_t k_hi = 10000) {
    return {Family::powerlaw, alpha, k_lo, k_hi};
  }
  static DegreeLaw exponential(double lambda, std::size_t k_lo = 1, std::size_t k_hi = 10000) {
    return {Family::exponential, lambda, k_lo, k_hi};
  }
};

struct IndependentCaseResult {
  ConditionVerdict verdict;
  /// Probability mass an untruncated law would put above k_hi, relative to
  /// the mass on [k_lo, k_hi]. Zero-width tails report 0.
  double truncation_mass = 0.0;
};

/// E_k{(1 - d_bar/k)(1 - rho_S(0)^k)} under a truncated, renormalized law,
/// for sharing independent of degree.
IndependentCaseResult condition_independent_case(const DegreeLaw& law, double share_prob_zero);

enum class SignGuess { positive, negative, inconclusive };
std::string_view to_string(SignGuess g) noexcept;

struct SignHeuristicResult {
  SignGuess sign = SignGuess::inconclusive;
  double sharer_mean_degree = 0.0;
  double nonsharer_mean_degree = 0.0;  ///< sample estimate
  double standard_error = 0.0;
};

/// Compares the exact mean sharer degree with a sampled mean non-sharer
/// degree; a gap beyond two standard errors decides the sign. With
/// sample_size >= number of non-sharers the non-sharers are enumerated.
SignHeuristicResult sharer_degree_sign_heuristic(const Graph& g, const SharingState& s,
                                                 std::size_t sample_size, RngStream& rng);

}  // namespace exposure
