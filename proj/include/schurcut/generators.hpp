#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "schurcut/graph.hpp"

namespace schurcut::gen {

/// Edges in generation order, before canonicalisation into a Graph.
struct EdgeList {
  std::size_t n = 0;
  std::vector<Edge> edges;

  Graph graph() const { return Graph::from_edges(n, edges); }
};

/// Unit-weight cycle 0-1-...-(n-1)-0.
inline EdgeList cycle_edges(std::size_t n) {
  if (n < 3) throw Error(ErrorKind::BadParams, "cycle needs n >= 3");
  EdgeList out{n, {}};
  for (Vertex i = 0; i < n; ++i) out.edges.push_back({i, (i + 1) % n, 1.0});
  return out;
}

inline Graph cycle(std::size_t n) { return cycle_edges(n).graph(); }

/// Unit-weight path 0-1-...-(n-1).
inline EdgeList path_edges(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::BadParams, "path needs n >= 2");
  EdgeList out{n, {}};
  for (Vertex i = 0; i + 1 < n; ++i) out.edges.push_back({i, i + 1, 1.0});
  return out;
}

inline Graph path(std::size_t n) { return path_edges(n).graph(); }

/// rows x cols unit grid, vertex (r, c) has id r*cols + c.
inline EdgeList grid_edges(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0 || rows * cols < 2) throw Error(ErrorKind::BadParams, "grid needs at least 2 vertices");
  EdgeList out{rows * cols, {}};
  auto& edges = out.edges;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const Vertex v = r * cols + c;
      if (c + 1 < cols) edges.push_back({v, v + 1, 1.0});
      if (r + 1 < rows) edges.push_back({v, v + cols, 1.0});
    }
  }
  return out;
}

inline Graph grid(std::size_t rows, std::size_t cols) { return grid_edges(rows, cols).graph(); }

/// Two unit k-cliques {0..k-1} and {k..2k-1} joined by the edge (k-1, k).
inline EdgeList dumbbell_edges(std::size_t k) {
  if (k < 2) throw Error(ErrorKind::BadParams, "dumbbell needs k >= 2");
  EdgeList out{2 * k, {}};
  auto& edges = out.edges;
  for (std::size_t side = 0; side < 2; ++side) {
    const Vertex base = side * k;
    for (Vertex i = 0; i < k; ++i) {
      for (Vertex j = i + 1; j < k; ++j) edges.push_back({base + i, base + j, 1.0});
    }
  }
  edges.push_back({k - 1, k, 1.0});
  return out;
}

inline Graph dumbbell(std::size_t k) { return dumbbell_edges(k).graph(); }

/// Erdos-Renyi G(n, p) with integer weights uniform in 1..max_weight,
/// resampled until connected. Deterministic for a given seed.
inline EdgeList random_connected_edges(std::size_t n, double p, int max_weight, std::uint64_t seed) {
  if (n < 2 || !(p > 0.0) || p > 1.0 || max_weight < 1) {
    throw Error(ErrorKind::BadParams, "random needs n >= 2, 0 < p <= 1, max_weight >= 1");
  }
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(p);
  std::uniform_int_distribution<int> weight(1, max_weight);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    EdgeList out{n, {}};
    for (Vertex i = 0; i < n; ++i) {
      for (Vertex j = i + 1; j < n; ++j) {
        if (keep(rng)) out.edges.push_back({i, j, static_cast<double>(weight(rng))});
      }
    }
    if (out.graph().is_connected()) return out;
  }
  throw Error(ErrorKind::BadParams, "could not sample a connected graph; increase p");
}

inline Graph random_connected(std::size_t n, double p, int max_weight, std::uint64_t seed) {
  return random_connected_edges(n, p, max_weight, seed).graph();
}

}  // namespace schurcut::gen
