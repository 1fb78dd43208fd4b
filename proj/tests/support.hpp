#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "schurcut/schurcut.hpp"

namespace schurcut::testing {

inline constexpr std::uint64_t kSuiteSeed = 20190625;

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Seeded random connected graphs: n uniform in [n_min, n_max], integer
/// weights 1..max_weight, edge probability 0.5.
inline std::vector<Graph> random_suite(std::size_t count, std::size_t n_min, std::size_t n_max,
                                       int max_weight = 4, std::uint64_t seed = kSuiteSeed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(n_min, n_max);
  std::vector<Graph> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(gen::random_connected(size(rng), 0.5, max_weight, rng()));
  return out;
}

/// Uniformly random subset of 0..n-1 with each vertex kept with probability p.
inline VertexSet random_subset(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution keep(p);
  std::vector<Vertex> m;
  for (Vertex v = 0; v < n; ++v) {
    if (keep(rng)) m.push_back(v);
  }
  return VertexSet(std::move(m), n);
}

/// Random disjoint nonempty (A, B); the rest of the vertices stay outside.
inline CutPair random_pair(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> side(0, 2);
  while (true) {
    std::vector<Vertex> a, b;
    for (Vertex v = 0; v < n; ++v) {
      const int s = side(rng);
      if (s == 1) a.push_back(v);
      if (s == 2) b.push_back(v);
    }
    if (!a.empty() && !b.empty()) return CutPair(VertexSet(std::move(a), n), VertexSet(std::move(b), n));
  }
}

/// Largest relative edgewise difference between two graphs on the same
/// vertex set; missing edges count as weight 0. Weights far below the largest
/// edge are compared against 1e-3 of that edge instead of themselves.
inline double edgewise_difference(const Graph& g, const Graph& h) {
  if (g.num_vertices() != h.num_vertices()) return INFINITY;
  double scale = 0.0;
  for (const auto& e : g.edges()) scale = std::max(scale, e.w);
  for (const auto& e : h.edges()) scale = std::max(scale, e.w);
  const double floor = std::max(1e-300, 1e-3 * scale);
  double worst = 0.0;
  const std::size_t n = g.num_vertices();
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) {
      const double a = g.weight(u, v);
      const double b = h.weight(u, v);
      worst = std::max(worst, std::abs(a - b) / std::max({floor, std::abs(a), std::abs(b)}));
    }
  }
  return worst;
}

}  // namespace schurcut::testing
