#include "exposure/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string_view>

#include "exposure/error.hpp"

namespace exposure {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Splits on whitespace and parses every token as an unsigned integer.
bool parse_ids(std::string_view line, std::vector<std::uint64_t>& out) {
  out.clear();
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(line.data() + i, line.data() + j, value);
    if (ec != std::errc() || ptr != line.data() + j) return false;
    out.push_back(value);
    i = j;
  }
  return true;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

}  // namespace

std::optional<NodeId> EdgeListData::dense_id(std::uint64_t original) const {
  if (original_ids.empty()) {
    if (original < num_nodes) return static_cast<NodeId>(original);
    return std::nullopt;
  }
  auto it = std::lower_bound(original_ids.begin(), original_ids.end(), original);
  if (it == original_ids.end() || *it != original) return std::nullopt;
  return static_cast<NodeId>(it - original_ids.begin());
}

EdgeListData parse_edge_list(std::istream& in) {
  EdgeListData data;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::vector<std::uint64_t> ids;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::uint64_t> declared_nodes;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') {
      ++data.skipped_lines;
      // "# nodes N ..." declares the node count, so isolated nodes survive a
      // write/read round trip.
      if (view.substr(0, 8) == "# nodes ") {
        std::string_view rest = view.substr(8);
        rest = rest.substr(0, rest.find_first_of(" \t"));
        if (parse_ids(rest, ids) && ids.size() == 1) declared_nodes = ids[0];
      }
      continue;
    }
    if (!parse_ids(view, ids) || ids.size() != 2) {
      throw InputError("malformed edge on line " + std::to_string(line_no) + ": '" + line + "'");
    }
    raw.emplace_back(ids[0], ids[1]);
  }

  std::vector<std::uint64_t> seen;
  seen.reserve(2 * raw.size());
  for (const auto& [u, v] : raw) {
    seen.push_back(u);
    seen.push_back(v);
  }
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
  if (declared_nodes && (seen.empty() || seen.back() < *declared_nodes)) {
    if (*declared_nodes >= std::numeric_limits<NodeId>::max()) throw InputError("declared node count too large");
    data.num_nodes = *declared_nodes;
    data.edges.reserve(raw.size());
    for (const auto& [u, v] : raw) data.edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    return data;
  }
  const bool dense = seen.empty() || seen.back() + 1 == seen.size();
  if (!dense) {
    if (seen.size() > std::numeric_limits<NodeId>::max()) throw InputError("too many distinct node ids");
    data.original_ids = seen;
  } else if (!seen.empty() && seen.back() >= std::numeric_limits<NodeId>::max()) {
    throw InputError("node id exceeds the supported range");
  }
  data.num_nodes = seen.size();
  data.edges.reserve(raw.size());
  for (const auto& [u, v] : raw) data.edges.emplace_back(*data.dense_id(u), *data.dense_id(v));
  return data;
}

EdgeListData read_edge_list(const std::string& path) {
  auto in = open_input(path);
  return parse_edge_list(in);
}

namespace {

template <typename G>
LoadedGraph<G> load_any(const std::string& path) {
  EdgeListData data = read_edge_list(path);
  LoadedGraph<G> out;
  out.graph = G::from_edges(data.edges, data.num_nodes);
  out.report.nodes = data.num_nodes;
  out.report.edges = out.graph.num_edges();
  out.report.input_edges = data.edges.size();
  out.report.skipped_lines = data.skipped_lines;
  out.report.remapped = data.remapped();
  out.original_ids = std::move(data.original_ids);
  return out;
}

}  // namespace

LoadedGraph<Graph> load_graph(const std::string& path) { return load_any<Graph>(path); }
LoadedGraph<DiGraph> load_digraph(const std::string& path) { return load_any<DiGraph>(path); }

SharingState parse_sharers(std::istream& in, std::size_t num_nodes,
                           const std::vector<std::uint64_t>& original_ids) {
  std::vector<NodeId> sharers;
  std::vector<std::uint64_t> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    if (!parse_ids(view, ids) || ids.size() != 1) {
      throw InputError("malformed sharer id on line " + std::to_string(line_no) + ": '" + line + "'");
    }
    std::uint64_t id = ids[0];
    if (!original_ids.empty()) {
      auto it = std::lower_bound(original_ids.begin(), original_ids.end(), id);
      if (it == original_ids.end() || *it != id) {
        throw InputError("sharer " + std::to_string(id) + " on line " + std::to_string(line_no) +
                         " does not appear in the graph");
      }
      id = static_cast<std::uint64_t>(it - original_ids.begin());
    }
    if (id >= num_nodes) {
      throw InputError("sharer " + std::to_string(id) + " on line " + std::to_string(line_no) +
                       " is not a node of the graph");
    }
    sharers.push_back(static_cast<NodeId>(id));
  }
  return SharingState::from_sharers(sharers, num_nodes);
}

SharingState read_sharers(const std::string& path, std::size_t num_nodes,
                          const std::vector<std::uint64_t>& original_ids) {
  auto in = open_input(path);
  return parse_sharers(in, num_nodes, original_ids);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes " << g.num_nodes() << " edges " << g.num_edges() << '\n';
  for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

void write_sharers(std::ostream& out, const SharingState& s) {
  for (NodeId v : s.sharers()) out << v << '\n';
}

void write_id_map(std::ostream& out, const std::vector<std::uint64_t>& original_ids) {
  out << "# dense_id original_id\n";
  for (std::size_t i = 0; i < original_ids.size(); ++i) out << i << ' ' << original_ids[i] << '\n';
}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string format_real(const std::optional<double>& x) { return x ? format_real(*x) : "null"; }

void write_trajectory_csv(std::ostream& out, const Graph& g, const CascadeTrajectory& traj) {
  out << "step,num_sharers,true_exposure\n";
  for (std::size_t t = 0; t < traj.states.size(); ++t) {
    out << t << ',' << traj.states[t].num_sharers() << ',' << format_real(true_exposure(g, traj.states[t]))
        << '\n';
  }
}

}  // namespace exposure
