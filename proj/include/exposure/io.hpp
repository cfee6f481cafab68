#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "exposure/cascade.hpp"
#include "exposure/graph.hpp"

namespace exposure {

/// Edge-list text: one edge per line as two whitespace-separated
/// non-negative integers; blank lines and lines starting with '#' are
/// skipped. A leading "# nodes N" comment fixes the node count (ids must then
/// be < N). Otherwise, when the ids seen are not exactly 0..max they are
/// remapped to a dense range in ascending order of the original id.
struct EdgeListData {
  std::vector<Edge> edges;
  std::size_t num_nodes = 0;
  std::size_t skipped_lines = 0;
  /// original_ids[new_id] = id in the file; empty when no remapping happened.
  std::vector<std::uint64_t> original_ids;

  bool remapped() const noexcept { return !original_ids.empty(); }
  /// Dense id for an id as written in the file, if it appears in the file.
  std::optional<NodeId> dense_id(std::uint64_t original) const;
};

/// Throws InputError naming the 1-based line number of a malformed line.
EdgeListData parse_edge_list(std::istream& in);
EdgeListData read_edge_list(const std::string& path);

struct ParseReport {
  std::size_t nodes = 0;
  std::size_t edges = 0;  ///< after simplification
  std::size_t input_edges = 0;
  std::size_t skipped_lines = 0;
  bool remapped = false;
};

template <typename G>
struct LoadedGraph {
  G graph;
  ParseReport report;
  std::vector<std::uint64_t> original_ids;
};

LoadedGraph<Graph> load_graph(const std::string& path);
LoadedGraph<DiGraph> load_digraph(const std::string& path);

/// One node id per line, '#' comments. Ids are translated through
/// `original_ids` when it is non-empty; unknown ids are an input error.
SharingState read_sharers(const std::string& path, std::size_t num_nodes,
                          const std::vector<std::uint64_t>& original_ids = {});
SharingState parse_sharers(std::istream& in, std::size_t num_nodes,
                           const std::vector<std::uint64_t>& original_ids = {});

void write_edge_list(std::ostream& out, const Graph& g);
void write_sharers(std::ostream& out, const SharingState& s);
/// "new_id original_id" per line.
void write_id_map(std::ostream& out, const std::vector<std::uint64_t>& original_ids);

/// 12 significant digits; "null" for an empty optional.
std::string format_real(double x);
std::string format_real(const std::optional<double>& x);

/// Trajectory dump with columns step,num_sharers,true_exposure.
void write_trajectory_csv(std::ostream& out, const Graph& g, const CascadeTrajectory& traj);

}  // namespace exposure
