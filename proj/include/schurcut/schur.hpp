#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "schurcut/graph.hpp"
#include "schurcut/spectral.hpp"

namespace schurcut {

/// Schur(G, X) as a graph on the retained vertices. Vertex i of `graph` is
/// `retained[i]` of the source graph.
struct SchurGraph {
  Graph graph;
  VertexSet retained;

  Vertex compact_id(Vertex original) const {
    const auto m = retained.members();
    const auto it = std::lower_bound(m.begin(), m.end(), original);
    if (it == m.end() || *it != original) {
      throw Error(ErrorKind::InvalidVertex, "vertex " + std::to_string(original) + " was eliminated");
    }
    return static_cast<Vertex>(it - m.begin());
  }

  Vertex original_id(Vertex compact) const { return retained[compact]; }
};

/// rho = schur_cut / min(vol_I_A, vol_I_B); sigma uses the source volumes.
struct ConductanceReport {
  double rho = 0.0;
  double sigma = 0.0;
  double schur_cut = 0.0;
  double vol_I_A = 0.0;
  double vol_I_B = 0.0;
  double vol_G_A = 0.0;
  double vol_G_B = 0.0;
};

namespace detail {

/// Mutable adjacency for star-mesh elimination. Degrees are always the sum of
/// surviving edge weights, so self-loops never appear.
class Eliminator {
public:
  explicit Eliminator(const Graph& g) : adj_(g.num_vertices()), alive_(g.num_vertices(), 1) {
    for (const auto& e : g.edges()) {
      adj_[e.u][e.v] += e.w;
      adj_[e.v][e.u] += e.w;
    }
  }

  std::size_t combinatorial_degree(Vertex v) const { return adj_[v].size(); }
  std::span<const Vertex> touched() const { return touched_; }

  void eliminate(Vertex v) {
    std::vector<std::pair<Vertex, double>> star(adj_[v].begin(), adj_[v].end());
    double cv = 0.0;
    for (const auto& [u, w] : star) cv += w;
    touched_.clear();
    for (const auto& [u, w] : star) {
      adj_[u].erase(v);
      touched_.push_back(u);
    }
    if (cv > 0.0) {
      for (std::size_t i = 0; i < star.size(); ++i) {
        for (std::size_t j = i + 1; j < star.size(); ++j) {
          const double fill = star[i].second * star[j].second / cv;
          adj_[star[i].first][star[j].first] += fill;
          adj_[star[j].first][star[i].first] += fill;
        }
      }
    }
    adj_[v].clear();
    alive_[v] = 0;
  }

  SchurGraph extract(const Graph& source, const VertexSet& retained) const {
    std::vector<Vertex> compact(adj_.size(), 0);
    for (std::size_t i = 0; i < retained.size(); ++i) compact[retained[i]] = i;
    std::vector<Edge> edges;
    std::vector<std::string> labels;
    labels.reserve(retained.size());
    for (Vertex u : retained) {
      labels.push_back(source.label(u));
      for (const auto& [v, w] : adj_[u]) {
        if (u < v && alive_[v]) edges.push_back({compact[u], compact[v], w});
      }
    }
    return {Graph::from_edges(retained.size(), edges, std::move(labels)), retained};
  }

private:
  std::vector<std::map<Vertex, double>> adj_;
  std::vector<char> alive_;
  std::vector<Vertex> touched_;
};

inline void check_vertex(const Graph& g, Vertex v) {
  if (v >= g.num_vertices()) throw Error(ErrorKind::InvalidVertex, "vertex " + std::to_string(v) + " out of range");
}

inline void require_disjoint(const VertexSet& a, const VertexSet& b) {
  if (!a.disjoint_from(b)) throw Error(ErrorKind::OverlappingSets, "vertex sets overlap");
}

}  // namespace detail

/// Star-mesh transform: removes v and adds c_uv c_vw / c_v between every pair
/// of its neighbours.
inline Graph eliminate_vertex(const Graph& g, Vertex v) {
  detail::check_vertex(g, v);
  if (g.num_vertices() == 1) throw Error(ErrorKind::LastVertex, "cannot eliminate the only vertex");
  detail::Eliminator elim(g);
  elim.eliminate(v);
  auto rest = VertexSet({v}, g.num_vertices()).complement();
  return elim.extract(g, rest).graph;
}

/// Schur complement onto X, eliminating V \ X in the given order.
inline SchurGraph schur_complement_in_order(const Graph& g, const VertexSet& retained,
                                            std::span<const Vertex> order) {
  check_universe(g, retained);
  if (retained.empty()) throw Error(ErrorKind::EmptyRetainedSet, "Schur complement onto the empty set");
  require_connected(g);
  const auto keep = membership(g, retained);
  std::vector<char> seen(g.num_vertices(), 0);
  for (Vertex v : order) {
    detail::check_vertex(g, v);
    if (keep[v] || seen[v]) throw Error(ErrorKind::BadParams, "elimination order must list each eliminated vertex once");
    seen[v] = 1;
  }
  if (order.size() + retained.size() != g.num_vertices()) {
    throw Error(ErrorKind::BadParams, "elimination order does not cover V \\ X");
  }
  detail::Eliminator elim(g);
  for (Vertex v : order) elim.eliminate(v);
  return elim.extract(g, retained);
}

/// Schur complement onto X with minimum-degree elimination (current number
/// of neighbours, ties by smallest id).
inline SchurGraph schur_complement(const Graph& g, const VertexSet& retained) {
  check_universe(g, retained);
  if (retained.empty()) throw Error(ErrorKind::EmptyRetainedSet, "Schur complement onto the empty set");
  require_connected(g);
  const auto keep = membership(g, retained);
  detail::Eliminator elim(g);
  std::vector<std::size_t> key(g.num_vertices(), 0);
  std::set<std::pair<std::size_t, Vertex>> queue;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (!keep[v]) {
      key[v] = elim.combinatorial_degree(v);
      queue.insert({key[v], v});
    }
  }
  while (!queue.empty()) {
    const Vertex v = queue.begin()->second;
    queue.erase(queue.begin());
    elim.eliminate(v);
    for (Vertex u : elim.touched()) {
      if (keep[u]) continue;
      queue.erase({key[u], u});
      key[u] = elim.combinatorial_degree(u);
      queue.insert({key[u], u});
    }
  }
  return elim.extract(g, retained);
}

/// G/(A, B): A merged into vertex `a`, B into vertex `b`. Contracted vertices
/// come first (a, then b), the rest follow in original order.
struct Contraction {
  Graph graph;
  std::optional<Vertex> a;
  std::optional<Vertex> b;
  std::vector<Vertex> image;  // original vertex -> contracted vertex
};

inline Contraction contract(const Graph& g, const VertexSet& a, const VertexSet& b) {
  check_universe(g, a);
  check_universe(g, b);
  detail::require_disjoint(a, b);
  const std::size_t n = g.num_vertices();
  Contraction out;
  out.image.assign(n, 0);
  std::vector<std::string> labels;
  auto join = [&](const VertexSet& s) {
    std::string text = "{";
    for (std::size_t i = 0; i < s.size(); ++i) text += (i ? "," : "") + g.label(s[i]);
    return text + "}";
  };
  Vertex next = 0;
  if (!a.empty()) {
    out.a = next++;
    labels.push_back(join(a));
  }
  if (!b.empty()) {
    out.b = next++;
    labels.push_back(join(b));
  }
  const auto in_a = membership(g, a);
  const auto in_b = membership(g, b);
  for (Vertex v = 0; v < n; ++v) {
    if (in_a[v]) {
      out.image[v] = *out.a;
    } else if (in_b[v]) {
      out.image[v] = *out.b;
    } else {
      out.image[v] = next++;
      labels.push_back(g.label(v));
    }
  }
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    const Vertex u = out.image[e.u];
    const Vertex v = out.image[e.v];
    if (u != v) edges.push_back({u, v, e.w});
  }
  out.graph = Graph::from_edges(next, edges, std::move(labels));
  return out;
}

/// Reff(S1, S2) = chi^T L^+ chi in G/(S1, S2), chi = 1_{s1} - 1_{s2}.
inline double effective_resistance(const Graph& g, const VertexSet& s1, const VertexSet& s2,
                                   const SolverOptions& opts = {}) {
  if (s1.empty() || s2.empty()) throw Error(ErrorKind::EmptySet, "effective resistance needs nonempty sets");
  detail::require_disjoint(s1, s2);
  require_connected(g);
  const auto h = contract(g, s1, s2);
  std::vector<double> chi(h.graph.num_vertices(), 0.0);
  chi[*h.a] = 1.0;
  chi[*h.b] = -1.0;
  const auto x = solve_laplacian(h.graph, chi, opts);
  return x[*h.a] - x[*h.b];
}

/// c^I(A, B) for I = Schur(G, A ∪ B), via one Laplacian solve.
inline double schur_cut_weight(const Graph& g, const VertexSet& a, const VertexSet& b) {
  return 1.0 / effective_resistance(g, a, b);
}

/// Schur complement and mixed fractional conductance of (A, B), with every
/// volume that enters them.
inline ConductanceReport conductance_pair(const Graph& g, const VertexSet& a, const VertexSet& b) {
  check_universe(g, a);
  check_universe(g, b);
  const CutPair pair(a, b);
  const auto schur = schur_complement(g, a.united(b));
  std::vector<char> in_a(schur.graph.num_vertices(), 0);
  for (Vertex v : a) in_a[schur.compact_id(v)] = 1;

  ConductanceReport r;
  for (const auto& e : schur.graph.edges()) {
    if (in_a[e.u] != in_a[e.v]) r.schur_cut += e.w;
  }
  for (Vertex v = 0; v < schur.graph.num_vertices(); ++v) {
    (in_a[v] ? r.vol_I_A : r.vol_I_B) += schur.graph.degree(v);
  }
  r.vol_G_A = volume(g, a);
  r.vol_G_B = volume(g, b);
  r.rho = r.schur_cut / std::min(r.vol_I_A, r.vol_I_B);
  r.sigma = r.schur_cut / std::min(r.vol_G_A, r.vol_G_B);
  return r;
}

/// c^I(A, B) summed over the cut edges of the materialised Schur complement.
inline double schur_cut_weight_eliminated(const Graph& g, const VertexSet& a, const VertexSet& b) {
  return conductance_pair(g, a, b).schur_cut;
}

}  // namespace schurcut
