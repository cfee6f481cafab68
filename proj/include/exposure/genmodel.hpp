#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "exposure/cascade.hpp"
#include "exposure/graph.hpp"
#include "exposure/rng.hpp"

namespace exposure {

/// Positive degrees with an even sum.
struct DegreeSequence {
  std::vector<std::size_t> degrees;
};

struct CorrelationTarget {
  double target = 0.0;
  double tolerance = 0.01;
  std::size_t max_iters = 100000;
};

void validate(const CorrelationTarget& t);

/// Continuous power law on [k_min, inf) with exponent alpha, rounded up and
/// capped at n - 1. An odd total is fixed by changing the first entry by 1.
DegreeSequence powerlaw_degree_sequence(std::size_t n, double alpha, std::size_t k_min, RngStream& rng);

/// Uniform stub matching followed by simplification (self-loops dropped,
/// multi-edges collapsed).
Graph configuration_model(const DegreeSequence& seq, RngStream& rng);

/// Pearson correlation of the degrees at the two ends of an edge, each edge
/// counted in both orientations. Empty when undefined (no edges or zero
/// variance).
std::optional<double> assortativity_coefficient(const Graph& g);

/// Pearson correlation between d(v) and S(v) over all nodes. Empty when either
/// marginal is constant.
std::optional<double> degree_sharing_correlation(const Graph& g, const SharingState& s);

struct RewireResult {
  Graph graph;
  std::optional<double> achieved;
  bool reached = false;
  std::size_t iterations = 0;
  std::size_t rewires = 0;
};

/// Called after every accepted rewire with the coefficient before and after.
using RewireObserver = std::function<void(double before, double after)>;

/// Degree-preserving two-edge rewiring toward an assortativity target.
///
/// Each iteration draws two distinct edges (a,b), (c,d) and evaluates the two
/// alternative pairings {(a,c),(b,d)} and {(a,d),(b,c)}. Pairings that would
/// create a self-loop or a duplicate edge are skipped. The extreme pairing in
/// the direction of the target is taken, falling back to the other pairing if
/// the extreme one overshoots further than the current distance. Stops once
/// within tolerance or after max_iters iterations.
RewireResult rewire_to_assortativity(const Graph& g, const CorrelationTarget& target, RngStream& rng,
                                     const RewireObserver& observer = {});

/// Each node shares independently with probability p.
SharingState bernoulli_sharing(const Graph& g, double p, RngStream& rng);

struct SwapResult {
  SharingState state;
  std::optional<double> achieved;
  bool reached = false;
  std::size_t iterations = 0;
  std::size_t swaps = 0;
};

/// Label swapping toward a degree-sharing correlation target. Draws a sharer
/// u and a non-sharer v uniformly; to raise the correlation the labels are
/// swapped when d(u) < d(v), to lower it when d(u) > d(v). Swaps that would
/// land further from the target than the current value are skipped.
SwapResult swap_to_correlation(const Graph& g, const SharingState& s, const CorrelationTarget& target,
                               RngStream& rng);

}  // namespace exposure
