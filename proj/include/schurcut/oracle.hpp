#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "schurcut/graph.hpp"

// Brute-force references. Everything here is dense linear algebra or
// enumeration and deliberately shares no code path with the elimination,
// CG and sweep modules it is used to check.
namespace schurcut::oracle {

inline constexpr std::size_t kMaxPairVertices = 9;
inline constexpr std::size_t kMaxSubsetVertices = 20;
inline constexpr std::size_t kMaxDenseVertices = 200;

inline Eigen::MatrixXd laplacian_matrix(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    l(e.u, e.u) += e.w;
    l(e.v, e.v) += e.w;
    l(e.u, e.v) -= e.w;
    l(e.v, e.u) -= e.w;
  }
  return l;
}

/// L^+ of a connected graph as (L + J/n)^{-1} - J/n.
inline Eigen::MatrixXd pseudoinverse(const Graph& g) {
  require_connected(g);
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  const Eigen::MatrixXd j = Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  return (laplacian_matrix(g) + j).inverse() - j;
}

/// Smallest nonzero eigenvalue of L x = λ D x (equivalently of N).
inline double dense_lambda(const Graph& g) {
  require_connected(g);
  if (g.num_vertices() < 2) throw Error(ErrorKind::BadParams, "spectral gap needs at least two vertices");
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Vertex v = 0; v < g.num_vertices(); ++v) d(v, v) = g.degree(v);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian_matrix(g), d);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "dense generalized eigensolver failed");
  return solver.eigenvalues()(1);
}

/// Dense L_I = L[X,X] - L[X,E] L[E,E]^{-1} L[E,X] with E = V \ X.
inline Eigen::MatrixXd dense_schur_matrix(const Eigen::MatrixXd& l, const std::vector<Vertex>& keep,
                                          const std::vector<Vertex>& drop) {
  const auto k = static_cast<Eigen::Index>(keep.size());
  const auto e = static_cast<Eigen::Index>(drop.size());
  Eigen::MatrixXd lxx(k, k), lxe(k, e), lee(e, e);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) lxx(i, j) = l(keep[i], keep[j]);
    for (Eigen::Index j = 0; j < e; ++j) lxe(i, j) = l(keep[i], drop[j]);
  }
  for (Eigen::Index i = 0; i < e; ++i) {
    for (Eigen::Index j = 0; j < e; ++j) lee(i, j) = l(drop[i], drop[j]);
  }
  if (e == 0) return lxx;
  Eigen::LLT<Eigen::MatrixXd> chol(lee);
  if (chol.info() != Eigen::Success) {
    throw Error(ErrorKind::SingularBlock, "eliminated block is singular (a component misses the retained set)");
  }
  return lxx - lxe * chol.solve(lxe.transpose());
}

/// Schur(G, X) by the block formula, as a graph in X order.
inline Graph dense_schur(const Graph& g, const VertexSet& x) {
  if (g.num_vertices() > kMaxDenseVertices) {
    throw Error(ErrorKind::TooLarge, "dense_schur is limited to " + std::to_string(kMaxDenseVertices) + " vertices");
  }
  check_universe(g, x);
  if (x.empty()) throw Error(ErrorKind::EmptyRetainedSet, "Schur complement onto the empty set");
  const auto in = membership(g, x);
  std::vector<Vertex> keep(x.begin(), x.end()), drop;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    if (!in[v]) drop.push_back(v);
  }
  const auto li = dense_schur_matrix(laplacian_matrix(g), keep, drop);
  std::vector<Edge> edges;
  std::vector<std::string> labels;
  for (Vertex i = 0; i < keep.size(); ++i) {
    labels.push_back(g.label(keep[i]));
    for (Vertex j = i + 1; j < keep.size(); ++j) {
      const double w = -li(i, j);
      if (w > 0.0) edges.push_back({i, j, w});
    }
  }
  return Graph::from_edges(keep.size(), edges, std::move(labels));
}

/// Effective resistance between the contractions of S1 and S2, from the
/// dense pseudoinverse of the contracted Laplacian.
inline double dense_resistance(const Graph& g, const VertexSet& s1, const VertexSet& s2) {
  require_connected(g);
  if (s1.empty() || s2.empty()) throw Error(ErrorKind::EmptySet, "effective resistance needs nonempty sets");
  if (!s1.disjoint_from(s2)) throw Error(ErrorKind::OverlappingSets, "sets overlap");
  const std::size_t n = g.num_vertices();
  std::vector<Vertex> image(n);
  const auto in1 = membership(g, s1);
  const auto in2 = membership(g, s2);
  Vertex next = 2;
  for (Vertex v = 0; v < n; ++v) image[v] = in1[v] ? 0 : in2[v] ? 1 : next++;
  const auto m = static_cast<Eigen::Index>(next);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(m, m);
  for (const auto& e : g.edges()) {
    const auto u = static_cast<Eigen::Index>(image[e.u]);
    const auto v = static_cast<Eigen::Index>(image[e.v]);
    if (u == v) continue;
    l(u, u) += e.w;
    l(v, v) += e.w;
    l(u, v) -= e.w;
    l(v, u) -= e.w;
  }
  const Eigen::MatrixXd j = Eigen::MatrixXd::Constant(m, m, 1.0 / static_cast<double>(m));
  const Eigen::MatrixXd pinv = (l + j).inverse() - j;
  return pinv(0, 0) + pinv(1, 1) - 2.0 * pinv(0, 1);
}

struct PhiResult {
  double phi = std::numeric_limits<double>::infinity();
  VertexSet set;
};

/// min over nonempty proper A of φ_A, by enumerating subsets that exclude
/// the last vertex (one representative per complementary pair).
inline PhiResult phi_exact(const Graph& g) {
  const std::size_t n = g.num_vertices();
  if (n > kMaxSubsetVertices) {
    throw Error(ErrorKind::TooLarge, "phi_exact is limited to " + std::to_string(kMaxSubsetVertices) + " vertices");
  }
  require_connected(g);
  if (n < 2) throw Error(ErrorKind::BadParams, "phi needs at least two vertices");
  const double total = g.total_volume();
  PhiResult best;
  std::uint32_t best_mask = 0;
  const std::uint32_t limit = std::uint32_t{1} << (n - 1);
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    double vol = 0.0;
    for (Vertex v = 0; v + 1 < n; ++v) {
      if (mask >> v & 1u) vol += g.degree(v);
    }
    double cut = 0.0;
    for (const auto& e : g.edges()) {
      if ((mask >> e.u & 1u) != (mask >> e.v & 1u)) cut += e.w;
    }
    const double phi = cut / std::min(vol, total - vol);
    if (phi < best.phi) {
      best.phi = phi;
      best_mask = mask;
    }
  }
  std::vector<Vertex> members;
  for (Vertex v = 0; v + 1 < n; ++v) {
    if (best_mask >> v & 1u) members.push_back(v);
  }
  best.set = VertexSet(std::move(members), n);
  return best;
}

/// Dense Schur-complement quantities of a single pair.
struct PairConductance {
  double schur_cut = 0.0;
  double vol_I_A = 0.0;
  double vol_I_B = 0.0;
  double vol_G_A = 0.0;
  double vol_G_B = 0.0;
  double rho = 0.0;
  double sigma = 0.0;
};

inline PairConductance dense_pair(const Graph& g, const Eigen::MatrixXd& l, const std::vector<int>& side) {
  std::vector<Vertex> keep, drop;
  for (Vertex v = 0; v < side.size(); ++v) (side[v] ? keep : drop).push_back(v);
  const auto li = dense_schur_matrix(l, keep, drop);
  PairConductance r;
  for (Vertex i = 0; i < keep.size(); ++i) {
    const bool in_a = side[keep[i]] == 1;
    (in_a ? r.vol_I_A : r.vol_I_B) += li(i, i);
    (in_a ? r.vol_G_A : r.vol_G_B) += g.degree(keep[i]);
    if (!in_a) continue;
    for (Vertex j = 0; j < keep.size(); ++j) {
      if (side[keep[j]] == 2) r.schur_cut -= li(i, j);
    }
  }
  r.rho = r.schur_cut / std::min(r.vol_I_A, r.vol_I_B);
  r.sigma = r.schur_cut / std::min(r.vol_G_A, r.vol_G_B);
  return r;
}

inline PairConductance dense_pair(const Graph& g, const VertexSet& a, const VertexSet& b) {
  const CutPair pair(a, b);
  check_universe(g, a);
  check_universe(g, b);
  require_connected(g);
  std::vector<int> side(g.num_vertices(), 0);
  for (Vertex v : a) side[v] = 1;
  for (Vertex v : b) side[v] = 2;
  return dense_pair(g, laplacian_matrix(g), side);
}

struct PairMinimum {
  double value = std::numeric_limits<double>::infinity();
  VertexSet a;
  VertexSet b;
};

struct PairEnumeration {
  PairMinimum rho;
  PairMinimum sigma;
  std::size_t pairs = 0;
  /// min over pairs of 2 σ_{A,B} − λ; only filled when λ is supplied.
  double min_lower_slack = std::numeric_limits<double>::infinity();
  std::size_t lower_violations = 0;
  /// max over pairs of |Reff·min vol_G − 1/σ| / (1/σ); only when requested.
  double max_resistance_error = 0.0;
};

struct EnumerationOptions {
  std::size_t threads = 1;  // 0 = hardware concurrency
  std::optional<double> lambda;
  bool check_resistance = false;
  double lower_tolerance = 1e-9;
};

/// Exhaustive ρ_G and σ_G over every disjoint nonempty (A, B), one of (A, B)
/// and (B, A) each (min A < min B). Work is split across threads; the
/// reduction breaks ties by the smallest assignment code, so the result does
/// not depend on the schedule.
inline PairEnumeration rho_sigma_exact(const Graph& g, const EnumerationOptions& opts = {}) {
  const std::size_t n = g.num_vertices();
  if (n > kMaxPairVertices) {
    throw Error(ErrorKind::TooLarge, "pair enumeration is limited to " + std::to_string(kMaxPairVertices) + " vertices");
  }
  require_connected(g);
  if (n < 2) throw Error(ErrorKind::BadParams, "pairs need at least two vertices");
  const auto l = laplacian_matrix(g);
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 3;

  struct Local {
    double rho = std::numeric_limits<double>::infinity();
    double sigma = std::numeric_limits<double>::infinity();
    std::uint64_t rho_code = 0;
    std::uint64_t sigma_code = 0;
    std::size_t pairs = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    std::size_t violations = 0;
    double max_res_error = 0.0;
  };
  auto decode = [n](std::uint64_t code) {
    std::vector<int> side(n);
    for (std::size_t v = 0; v < n; ++v) {
      side[v] = static_cast<int>(code % 3);
      code /= 3;
    }
    return side;
  };
  auto admissible = [n](const std::vector<int>& side) {
    bool has_b = false;
    for (std::size_t v = 0; v < n; ++v) {
      if (side[v] == 2) has_b = true;
    }
    const auto first = std::find_if(side.begin(), side.end(), [](int s) { return s != 0; });
    return first != side.end() && *first == 1 && has_b;
  };
  auto work = [&](std::uint64_t begin, std::uint64_t end, Local& out) {
    for (std::uint64_t code = begin; code < end; ++code) {
      const auto side = decode(code);
      if (!admissible(side)) continue;
      const auto r = dense_pair(g, l, side);
      ++out.pairs;
      if (r.rho < out.rho) {
        out.rho = r.rho;
        out.rho_code = code;
      }
      if (r.sigma < out.sigma) {
        out.sigma = r.sigma;
        out.sigma_code = code;
      }
      if (opts.lambda) {
        const double slack = 2.0 * r.sigma - *opts.lambda;
        out.min_slack = std::min(out.min_slack, slack);
        if (slack < -opts.lower_tolerance) ++out.violations;
      }
      if (opts.check_resistance) {
        std::vector<Vertex> a, b;
        for (Vertex v = 0; v < n; ++v) {
          if (side[v] == 1) a.push_back(v);
          if (side[v] == 2) b.push_back(v);
        }
        const double reff = dense_resistance(g, VertexSet(a, n), VertexSet(b, n));
        const double lhs = reff * std::min(r.vol_G_A, r.vol_G_B);
        const double rhs = 1.0 / r.sigma;
        out.max_res_error = std::max(out.max_res_error, std::abs(lhs - rhs) / rhs);
      }
    }
  };

  std::size_t threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::max<std::size_t>(1, std::min<std::size_t>(threads, total));
  std::vector<Local> locals(threads);
  if (threads == 1) {
    work(0, total, locals[0]);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (total + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::uint64_t begin = std::min<std::uint64_t>(total, t * chunk);
      const std::uint64_t end = std::min<std::uint64_t>(total, begin + chunk);
      pool.emplace_back(work, begin, end, std::ref(locals[t]));
    }
    for (auto& th : pool) th.join();
  }

  Local merged;
  merged.rho_code = merged.sigma_code = std::numeric_limits<std::uint64_t>::max();
  for (const auto& loc : locals) {
    if (loc.rho < merged.rho || (loc.rho == merged.rho && loc.rho_code < merged.rho_code)) {
      merged.rho = loc.rho;
      merged.rho_code = loc.rho_code;
    }
    if (loc.sigma < merged.sigma || (loc.sigma == merged.sigma && loc.sigma_code < merged.sigma_code)) {
      merged.sigma = loc.sigma;
      merged.sigma_code = loc.sigma_code;
    }
    merged.pairs += loc.pairs;
    merged.min_slack = std::min(merged.min_slack, loc.min_slack);
    merged.violations += loc.violations;
    merged.max_res_error = std::max(merged.max_res_error, loc.max_res_error);
  }

  auto to_sets = [&](std::uint64_t code, PairMinimum& out) {
    const auto side = decode(code);
    std::vector<Vertex> a, b;
    for (Vertex v = 0; v < n; ++v) {
      if (side[v] == 1) a.push_back(v);
      if (side[v] == 2) b.push_back(v);
    }
    out.a = VertexSet(std::move(a), n);
    out.b = VertexSet(std::move(b), n);
  };
  PairEnumeration result;
  result.rho.value = merged.rho;
  result.sigma.value = merged.sigma;
  to_sets(merged.rho_code, result.rho);
  to_sets(merged.sigma_code, result.sigma);
  result.pairs = merged.pairs;
  result.min_lower_slack = merged.min_slack;
  result.lower_violations = merged.violations;
  result.max_resistance_error = merged.max_res_error;
  return result;
}

/// One checked inequality: `slack` >= 0 means it holds; `tolerance` is the
/// amount of negative slack still accepted.
struct Check {
  std::string name;
  double slack = 0.0;
  double tolerance = 0.0;
  bool holds() const { return slack >= -tolerance; }
};

struct VerificationReport {
  double lambda = 0.0;
  PhiResult phi;
  PairMinimum rho;
  PairMinimum sigma;
  std::size_t pairs = 0;
  double max_resistance_error = 0.0;
  std::vector<Check> checks;

  bool all_hold() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.holds(); });
  }
};

/// Exact λ, φ_G, ρ_G, σ_G and every inequality relating them.
inline VerificationReport verify_graph(const Graph& g, std::size_t threads = 1) {
  if (g.num_vertices() > kMaxPairVertices) {
    throw Error(ErrorKind::TooLarge, "verify is limited to " + std::to_string(kMaxPairVertices) + " vertices, got " +
                                         std::to_string(g.num_vertices()));
  }
  require_connected(g);
  VerificationReport rep;
  rep.lambda = dense_lambda(g);
  rep.phi = phi_exact(g);
  EnumerationOptions opts;
  opts.threads = threads;
  opts.lambda = rep.lambda;
  opts.check_resistance = true;
  const auto pairs = rho_sigma_exact(g, opts);
  rep.rho = pairs.rho;
  rep.sigma = pairs.sigma;
  rep.pairs = pairs.pairs;
  rep.max_resistance_error = pairs.max_resistance_error;

  const double lambda = rep.lambda;
  const double reff = dense_resistance(g, rep.sigma.a, rep.sigma.b);
  const double min_vol = std::min(volume(g, rep.sigma.a), volume(g, rep.sigma.b));
  rep.checks = {
      {"lambda/2 <= rho_G", rep.rho.value - lambda / 2.0, 1e-9},
      {"rho_G <= 25600*lambda", 25600.0 * lambda - rep.rho.value, 1e-6},
      {"lambda <= 2*sigma_G", 2.0 * rep.sigma.value - lambda, 1e-9},
      {"sigma_G <= rho_G", rep.rho.value - rep.sigma.value, 1e-12},
      {"lambda <= 2*sigma_AB for every pair", pairs.min_lower_slack, 1e-9},
      {"lambda/2 <= phi_G", rep.phi.phi - lambda / 2.0, 1e-9},
      {"phi_G <= sqrt(2*lambda)", std::sqrt(2.0 * lambda) - rep.phi.phi, 1e-9},
      {"Reff*min(vol) = 1/sigma_AB for every pair", 1e-7 - pairs.max_resistance_error, 0.0},
      {"Reff(S1,S2) >= 1/(25600*lambda*min(vol)) at the sigma argmin", reff - 1.0 / (25600.0 * lambda * min_vol),
       1e-9},
  };
  return rep;
}

namespace detail {

inline double kappa_clamp(double q, double y) {
  if (q > 0.0) return std::min(q, std::max(q / 2.0, y));
  return std::min(q / 2.0, std::max(q, y));
}

inline double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                      double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double eps) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, b, fa, fm, fb, whole, eps, 48);
}

}  // namespace detail

/// ∫_0^∞ (κ_q(a) − κ_q(b))² / q dq by adaptive Simpson on the compact support
/// [δ, 2 max(a, b, 0)], split at the kinks a, 2a, b, 2b.
inline double kappa_integral_numeric(double a, double b) {
  const double top = 2.0 * std::max({a, b, 0.0});
  if (top <= 0.0 || a == b) return 0.0;
  const double delta = 1e-9 * std::max({std::abs(a), std::abs(b), 1.0});
  auto f = [a, b](double q) {
    const double d = detail::kappa_clamp(q, a) - detail::kappa_clamp(q, b);
    return d * d / q;
  };
  std::vector<double> knots{delta, top};
  for (double k : {a, 2.0 * a, b, 2.0 * b}) {
    if (k > delta && k < top) knots.push_back(k);
  }
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  const double eps = 1e-12 * (1.0 + (a - b) * (a - b));
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    total += detail::adaptive_simpson(f, knots[i], knots[i + 1], eps / static_cast<double>(knots.size()));
  }
  return total;
}

}  // namespace schurcut::oracle
