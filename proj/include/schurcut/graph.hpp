#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "schurcut/error.hpp"

namespace schurcut {

using Vertex = std::size_t;

/// Undirected weighted edge, stored with u < v.
struct Edge {
  Vertex u;
  Vertex v;
  double w;
};

struct Neighbor {
  Vertex vertex;
  double weight;
};

namespace detail {

class DisjointSets {
public:
  explicit DisjointSets(std::size_t n) : parent_(n), components_(n) {
    std::iota(parent_.begin(), parent_.end(), Vertex{0});
  }

  Vertex find(Vertex x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(Vertex a, Vertex b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[b] = a;
    --components_;
  }

  std::size_t components() const { return components_; }

private:
  std::vector<Vertex> parent_;
  std::size_t components_;
};

}  // namespace detail

/// Immutable simple graph with positive weights. Parallel input edges are
/// merged by adding their weights; the adjacency is stored in CSR form.
class Graph {
public:
  Graph() = default;

  /// Builds a graph on vertices 0..n-1. `labels` (optional) are the external
  /// ids carried through for output; defaults to the decimal index.
  static Graph from_edges(std::size_t n, std::span<const Edge> input,
                          std::vector<std::string> labels = {}) {
    std::map<std::pair<Vertex, Vertex>, double> merged;
    for (const auto& e : input) {
      if (e.u >= n || e.v >= n) {
        throw Error(ErrorKind::InvalidVertex, "edge endpoint out of range for n=" + std::to_string(n));
      }
      if (e.u == e.v) throw Error(ErrorKind::SelfLoop, "self-loop at vertex " + std::to_string(e.u));
      if (!(e.w > 0.0)) {
        throw Error(ErrorKind::NonPositiveWeight,
                    "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) + ") has weight " +
                        std::to_string(e.w));
      }
      merged[{std::min(e.u, e.v), std::max(e.u, e.v)}] += e.w;
    }

    Graph g;
    g.n_ = n;
    g.edges_.reserve(merged.size());
    for (const auto& [key, w] : merged) g.edges_.push_back({key.first, key.second, w});

    std::vector<std::size_t> count(n + 1, 0);
    for (const auto& e : g.edges_) {
      ++count[e.u + 1];
      ++count[e.v + 1];
    }
    std::partial_sum(count.begin(), count.end(), count.begin());
    g.offsets_ = count;
    g.adjacency_.resize(2 * g.edges_.size());
    std::vector<std::size_t> cursor(count.begin(), count.end() - 1);
    for (const auto& e : g.edges_) {
      g.adjacency_[cursor[e.u]++] = {e.v, e.w};
      g.adjacency_[cursor[e.v]++] = {e.u, e.w};
    }

    g.degree_ = g.rebuild_degrees();

    detail::DisjointSets sets(n);
    for (const auto& e : g.edges_) sets.unite(e.u, e.v);
    g.connected_ = n > 0 && sets.components() == 1;

    if (labels.empty()) {
      labels.reserve(n);
      for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    }
    if (labels.size() != n) throw Error(ErrorKind::DimensionMismatch, "label count differs from vertex count");
    g.labels_ = std::move(labels);
    return g;
  }

  std::size_t num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const Edge> edges() const { return edges_; }

  std::span<const Neighbor> neighbors(Vertex v) const {
    return std::span<const Neighbor>(adjacency_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
  }

  double degree(Vertex v) const { return degree_[v]; }
  std::span<const double> degrees() const { return degree_; }

  double total_volume() const {
    double total = 0.0;
    for (double d : degree_) total += d;
    return total;
  }

  bool is_connected() const { return connected_; }

  const std::string& label(Vertex v) const { return labels_[v]; }
  std::span<const std::string> labels() const { return labels_; }

  /// Recomputes degrees from the adjacency in storage order. Equal to
  /// `degrees()` bit for bit.
  std::vector<double> rebuild_degrees() const {
    std::vector<double> d(n_, 0.0);
    for (Vertex v = 0; v < n_; ++v) {
      for (const auto& nb : neighbors(v)) d[v] += nb.weight;
    }
    return d;
  }

  /// Weight of edge {u, v}, or 0 when absent.
  double weight(Vertex u, Vertex v) const {
    for (const auto& nb : neighbors(u)) {
      if (nb.vertex == v) return nb.weight;
    }
    return 0.0;
  }

private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  std::vector<double> degree_;
  std::vector<std::string> labels_;
  bool connected_ = false;
};

inline void require_connected(const Graph& g) {
  if (!g.is_connected()) throw Error(ErrorKind::Disconnected, "graph is not connected");
}

/// Builds a graph from (u, v, w) triples with arbitrary non-negative ids.
/// Ids are compacted to 0..n-1 in increasing order; labels keep the originals.
inline Graph build_graph(std::span<const Edge> triples) {
  std::vector<Vertex> ids;
  ids.reserve(2 * triples.size());
  for (const auto& e : triples) {
    ids.push_back(e.u);
    ids.push_back(e.v);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  auto compact = [&](Vertex x) {
    return static_cast<Vertex>(std::lower_bound(ids.begin(), ids.end(), x) - ids.begin());
  };
  std::vector<Edge> edges;
  edges.reserve(triples.size());
  for (const auto& e : triples) edges.push_back({compact(e.u), compact(e.v), e.w});

  std::vector<std::string> labels;
  labels.reserve(ids.size());
  for (Vertex id : ids) labels.push_back(std::to_string(id));
  return Graph::from_edges(ids.size(), edges, std::move(labels));
}

inline Graph build_graph(std::initializer_list<Edge> triples) {
  return build_graph(std::span<const Edge>(triples.begin(), triples.size()));
}

/// Sorted, duplicate-free subset of 0..universe-1.
class VertexSet {
public:
  VertexSet() = default;

  VertexSet(std::vector<Vertex> members, std::size_t universe) : members_(std::move(members)), universe_(universe) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    if (!members_.empty() && members_.back() >= universe_) {
      throw Error(ErrorKind::InvalidVertex,
                  "vertex " + std::to_string(members_.back()) + " outside universe of size " + std::to_string(universe_));
    }
  }

  VertexSet(std::initializer_list<Vertex> members, std::size_t universe)
      : VertexSet(std::vector<Vertex>(members), universe) {}

  static VertexSet all(std::size_t universe) {
    std::vector<Vertex> m(universe);
    std::iota(m.begin(), m.end(), Vertex{0});
    return VertexSet(std::move(m), universe);
  }

  /// Set of indices i with mask[i] != 0.
  template <typename Mask>
  static VertexSet from_mask(const Mask& mask) {
    std::vector<Vertex> m;
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i]) m.push_back(i);
    }
    return VertexSet(std::move(m), mask.size());
  }

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  std::size_t universe() const { return universe_; }
  std::span<const Vertex> members() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }
  Vertex operator[](std::size_t i) const { return members_[i]; }

  bool contains(Vertex v) const { return std::binary_search(members_.begin(), members_.end(), v); }

  std::vector<char> mask() const {
    std::vector<char> m(universe_, 0);
    for (Vertex v : members_) m[v] = 1;
    return m;
  }

  VertexSet complement() const {
    std::vector<Vertex> out;
    out.reserve(universe_ - members_.size());
    auto it = members_.begin();
    for (Vertex v = 0; v < universe_; ++v) {
      if (it != members_.end() && *it == v) {
        ++it;
      } else {
        out.push_back(v);
      }
    }
    return VertexSet(std::move(out), universe_);
  }

  bool disjoint_from(const VertexSet& other) const {
    auto a = members_.begin();
    auto b = other.members_.begin();
    while (a != members_.end() && b != other.members_.end()) {
      if (*a == *b) return false;
      if (*a < *b) {
        ++a;
      } else {
        ++b;
      }
    }
    return true;
  }

  VertexSet united(const VertexSet& other) const {
    std::vector<Vertex> out;
    std::set_union(members_.begin(), members_.end(), other.members_.begin(), other.members_.end(),
                   std::back_inserter(out));
    return VertexSet(std::move(out), std::max(universe_, other.universe_));
  }

  friend bool operator==(const VertexSet& a, const VertexSet& b) { return a.members_ == b.members_; }

private:
  std::vector<Vertex> members_;
  std::size_t universe_ = 0;
};

/// Two disjoint nonempty vertex sets.
struct CutPair {
  VertexSet a;
  VertexSet b;

  CutPair(VertexSet first, VertexSet second) : a(std::move(first)), b(std::move(second)) {
    if (a.empty() || b.empty()) throw Error(ErrorKind::EmptySet, "cut pair sides must be nonempty");
    if (!a.disjoint_from(b)) throw Error(ErrorKind::OverlappingSets, "cut pair sides overlap");
  }
};

inline void check_universe(const Graph& g, const VertexSet& s) {
  if (s.universe() > g.num_vertices() || (!s.empty() && s.members().back() >= g.num_vertices())) {
    throw Error(ErrorKind::InvalidVertex, "vertex set does not belong to this graph");
  }
}

inline double volume(const Graph& g, const VertexSet& s) {
  check_universe(g, s);
  double total = 0.0;
  for (Vertex v : s) total += g.degree(v);
  return total;
}

/// c(A, B): total weight of edges with one endpoint in A and the other in B.
inline double cut_weight(const Graph& g, const VertexSet& a, const VertexSet& b) {
  check_universe(g, a);
  check_universe(g, b);
  if (!a.disjoint_from(b)) throw Error(ErrorKind::OverlappingSets, "cut_weight requires disjoint sets");
  std::vector<char> side(g.num_vertices(), 0);
  for (Vertex v : a) side[v] = 1;
  for (Vertex v : b) side[v] = 2;
  double total = 0.0;
  for (const auto& e : g.edges()) {
    if ((side[e.u] == 1 && side[e.v] == 2) || (side[e.u] == 2 && side[e.v] == 1)) total += e.w;
  }
  return total;
}

inline std::vector<char> membership(const Graph& g, const VertexSet& s) {
  check_universe(g, s);
  std::vector<char> in(g.num_vertices(), 0);
  for (Vertex v : s) in[v] = 1;
  return in;
}

/// c(∂A) = c(A, V \ A).
inline double boundary_weight(const Graph& g, const VertexSet& a) {
  const auto in = membership(g, a);
  double total = 0.0;
  for (const auto& e : g.edges()) {
    if (in[e.u] != in[e.v]) total += e.w;
  }
  return total;
}

/// Sum of weights of edges with both endpoints in A.
inline double internal_weight(const Graph& g, const VertexSet& a) {
  const auto in = membership(g, a);
  double total = 0.0;
  for (const auto& e : g.edges()) {
    if (in[e.u] && in[e.v]) total += e.w;
  }
  return total;
}

/// Fractional conductance c(∂A) / min(vol A, vol V\A).
inline double phi_set(const Graph& g, const VertexSet& a) {
  check_universe(g, a);
  if (a.empty() || a.size() >= g.num_vertices()) {
    throw Error(ErrorKind::EmptyOrFullSet, "phi_set requires a nonempty proper subset");
  }
  const double vol_a = volume(g, a);
  const double denom = std::min(vol_a, g.total_volume() - vol_a);
  return boundary_weight(g, a) / denom;
}

}  // namespace schurcut
