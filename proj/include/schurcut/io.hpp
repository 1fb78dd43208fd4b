#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "schurcut/graph.hpp"

namespace schurcut {

namespace detail {

inline bool parse_index(const std::string& s, std::uint64_t& out) {
  if (s.empty()) return false;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace detail

/// Parses the edge-list text format: one "u v w" per line, '#' starts a
/// comment line, blank lines ignored. Vertex ids are arbitrary tokens. When
/// every id is a non-negative integer, vertices are numbered in increasing
/// numeric order; otherwise in order of first appearance.
inline Graph read_edge_list(std::istream& in) {
  struct RawEdge {
    std::string u;
    std::string v;
    double w;
  };
  std::vector<RawEdge> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream fields(line);
    RawEdge e;
    std::string weight;
    std::string extra;
    if (!(fields >> e.u >> e.v >> weight) || (fields >> extra && extra[0] != '#')) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected \"u v w\"");
    }
    std::size_t used = 0;
    try {
      e.w = std::stod(weight, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != weight.size()) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": bad weight '" + weight + "'");
    }
    raw.push_back(std::move(e));
  }

  std::vector<std::string> order;
  std::unordered_map<std::string, Vertex> index;
  for (const auto& e : raw) {
    for (const auto* id : {&e.u, &e.v}) {
      if (index.emplace(*id, order.size()).second) order.push_back(*id);
    }
  }
  bool numeric = true;
  std::vector<std::uint64_t> values(order.size());
  for (std::size_t i = 0; i < order.size() && numeric; ++i) numeric = detail::parse_index(order[i], values[i]);
  if (numeric) {
    std::vector<std::size_t> perm(order.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::string> sorted;
    sorted.reserve(order.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      sorted.push_back(order[perm[i]]);
      index[order[perm[i]]] = i;
    }
    order = std::move(sorted);
  }

  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& e : raw) edges.push_back({index.at(e.u), index.at(e.v), e.w});
  const std::size_t n = order.size();
  return Graph::from_edges(n, edges, std::move(order));
}

inline Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
  return read_edge_list(in);
}

/// Writes one "u v w" line per edge using vertex labels. Weights are printed
/// with enough digits to re-parse exactly.
inline void write_edge_list(std::ostream& out, const Graph& g) {
  for (const auto& e : g.edges()) {
    std::ostringstream w;
    w << std::setprecision(std::numeric_limits<double>::max_digits10) << e.w;
    out << g.label(e.u) << ' ' << g.label(e.v) << ' ' << w.str() << '\n';
  }
}

}  // namespace schurcut
