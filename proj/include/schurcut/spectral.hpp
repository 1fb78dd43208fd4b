#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "schurcut/graph.hpp"

namespace schurcut {

enum class LambdaMethod { Dense, Iterative, ClosedForm };

inline std::string_view to_string(LambdaMethod m) {
  switch (m) {
    case LambdaMethod::Dense: return "dense";
    case LambdaMethod::Iterative: return "iterative";
    case LambdaMethod::ClosedForm: return "closed-form";
  }
  return "unknown";
}

/// Spectral gap estimate with the test vector z that certifies it.
/// `rayleigh` is z^T N z / z^T z recomputed from z.
struct SpectralResult {
  double lambda = 0.0;
  std::vector<double> vector;
  double rayleigh = 0.0;
  double residual = 0.0;  // ||N z - lambda z|| / ||z||
  std::size_t rounds = 0;
  LambdaMethod method = LambdaMethod::Dense;
};

struct SolverOptions {
  double rel_tol = 1e-10;       // CG stopping tolerance on the recursive residual
  double required_tol = 1e-8;   // contract on the true residual ||Lx - b|| / ||b||
  std::size_t max_iterations = 0;  // 0 = max(1000, 20 n)
};

struct LambdaOptions {
  std::size_t dense_threshold = 512;
  double residual_tol = 1e-7;
  std::size_t max_rounds = 300;
  std::size_t block_size = 4;
  std::uint64_t seed = 0x5eed;
};

struct FiedlerOptions {
  double decrease_tol = 1e-3;
  std::uint64_t seed = 0xf1ed1e7;
};

/// Closed-form spectral gaps of the unit cycle and path.
inline double cycle_gap(std::size_t n) { return 1.0 - std::cos(2.0 * std::numbers::pi / static_cast<double>(n)); }
inline double path_gap(std::size_t n) { return 1.0 - std::cos(std::numbers::pi / static_cast<double>(n - 1)); }

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline void check_dimension(const Graph& g, std::span<const double> x) {
  if (x.size() != g.num_vertices()) {
    throw Error(ErrorKind::DimensionMismatch,
                "vector has length " + std::to_string(x.size()) + ", graph has " + std::to_string(g.num_vertices()) +
                    " vertices");
  }
}

inline void remove_mean(std::span<double> x) {
  if (x.empty()) return;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  for (double& v : x) v -= mean;
}

/// Unit vector D^{1/2} 1 / ||D^{1/2} 1||, the kernel of N.
inline std::vector<double> kernel_direction(const Graph& g) {
  std::vector<double> k(g.num_vertices());
  for (Vertex v = 0; v < g.num_vertices(); ++v) k[v] = std::sqrt(g.degree(v));
  const double nk = norm(k);
  for (double& v : k) v /= nk;
  return k;
}

inline void deflate(std::span<double> z, std::span<const double> kernel) {
  const double c = dot(z, kernel);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] -= c * kernel[i];
}

}  // namespace detail

/// x^T L x = sum over edges of c_e (x_u - x_v)^2.
inline double laplacian_quadratic(const Graph& g, std::span<const double> x) {
  detail::check_dimension(g, x);
  double total = 0.0;
  for (const auto& e : g.edges()) {
    const double d = x[e.u] - x[e.v];
    total += e.w * d * d;
  }
  return total;
}

inline void apply_laplacian(const Graph& g, std::span<const double> x, std::span<double> out) {
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    double acc = g.degree(v) * x[v];
    for (const auto& nb : g.neighbors(v)) acc -= nb.weight * x[nb.vertex];
    out[v] = acc;
  }
}

inline std::vector<double> apply_laplacian(const Graph& g, std::span<const double> x) {
  detail::check_dimension(g, x);
  std::vector<double> out(x.size());
  apply_laplacian(g, x, out);
  return out;
}

/// N z with N = D^{-1/2} L D^{-1/2}.
inline std::vector<double> apply_normalized(const Graph& g, std::span<const double> z) {
  detail::check_dimension(g, z);
  const std::size_t n = g.num_vertices();
  std::vector<double> x(n);
  for (Vertex v = 0; v < n; ++v) x[v] = z[v] / std::sqrt(g.degree(v));
  std::vector<double> lx(n);
  apply_laplacian(g, x, lx);
  for (Vertex v = 0; v < n; ++v) lx[v] /= std::sqrt(g.degree(v));
  return lx;
}

/// z^T N z / z^T z, evaluated through the edge sum so it is never negative.
inline double normalized_rayleigh(const Graph& g, std::span<const double> z) {
  detail::check_dimension(g, z);
  std::vector<double> x(z.size());
  for (Vertex v = 0; v < z.size(); ++v) x[v] = z[v] / std::sqrt(g.degree(v));
  return laplacian_quadratic(g, x) / detail::dot(z, z);
}

/// x = L^+ b by Jacobi-preconditioned conjugate gradients on the complement
/// of the constant vector. Requires a connected graph and b orthogonal to 1.
inline std::vector<double> solve_laplacian(const Graph& g, std::span<const double> b, const SolverOptions& opts = {}) {
  detail::check_dimension(g, b);
  require_connected(g);
  const std::size_t n = g.num_vertices();
  const double b_norm = detail::norm(b);
  double b_sum = 0.0;
  for (double v : b) b_sum += v;
  if (std::abs(b_sum) > 1e-10 * b_norm) {
    throw Error(ErrorKind::NotInRange, "right-hand side is not orthogonal to the constant vector");
  }
  std::vector<double> x(n, 0.0);
  if (b_norm == 0.0 || n == 1) return x;

  std::vector<double> rhs(b.begin(), b.end());
  detail::remove_mean(rhs);

  const std::size_t max_iter = opts.max_iterations ? opts.max_iterations : std::max<std::size_t>(1000, 20 * n);
  std::vector<double> r(n), z(n), p(n), ap(n);

  for (int restart = 0; restart < 3; ++restart) {
    apply_laplacian(g, x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
    detail::remove_mean(r);
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / g.degree(i);
    p = z;
    double rz = detail::dot(r, z);

    for (std::size_t it = 0; it < max_iter; ++it) {
      if (detail::norm(r) <= opts.rel_tol * b_norm) break;
      apply_laplacian(g, p, ap);
      const double pap = detail::dot(p, ap);
      if (!(pap > 0.0)) break;
      const double alpha = rz / pap;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / g.degree(i);
      const double rz_next = detail::dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }

    detail::remove_mean(x);
    apply_laplacian(g, x, ap);
    double true_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) true_res += (ap[i] - rhs[i]) * (ap[i] - rhs[i]);
    true_res = std::sqrt(true_res);
    if (true_res <= opts.rel_tol * b_norm) return x;
  }
  apply_laplacian(g, x, ap);
  double true_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) true_res += (ap[i] - rhs[i]) * (ap[i] - rhs[i]);
  if (std::sqrt(true_res) <= opts.required_tol * b_norm) return x;
  throw Error(ErrorKind::NoConvergence, "conjugate gradients did not reach the required residual");
}

namespace detail {

/// w = N^+ v for v orthogonal to the kernel of N: L u = D^{1/2} v, w = D^{1/2} u.
inline std::vector<double> apply_normalized_pinv(const Graph& g, std::span<const double> v,
                                                 std::span<const double> kernel, const SolverOptions& opts) {
  const std::size_t n = g.num_vertices();
  std::vector<double> rhs(n);
  for (Vertex i = 0; i < n; ++i) rhs[i] = std::sqrt(g.degree(i)) * v[i];
  detail::remove_mean(rhs);
  auto u = solve_laplacian(g, rhs, opts);
  for (Vertex i = 0; i < n; ++i) u[i] *= std::sqrt(g.degree(i));
  deflate(u, kernel);
  return u;
}

inline std::vector<double> random_start(std::size_t n, std::span<const double> kernel, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> z(n);
  for (double& v : z) v = gauss(rng);
  deflate(z, kernel);
  const double nz = norm(z);
  for (double& v : z) v /= nz;
  return z;
}

inline SpectralResult finish(const Graph& g, std::vector<double> z, std::span<const double> kernel, double lambda,
                             std::size_t rounds, LambdaMethod method) {
  deflate(z, kernel);
  const double nz = detail::norm(z);
  for (double& v : z) v /= nz;
  SpectralResult out;
  out.rayleigh = normalized_rayleigh(g, z);
  out.lambda = lambda;
  const auto nzv = apply_normalized(g, z);
  double res = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) res += (nzv[i] - lambda * z[i]) * (nzv[i] - lambda * z[i]);
  out.residual = std::sqrt(res);
  out.vector = std::move(z);
  out.rounds = rounds;
  out.method = method;
  return out;
}

inline Eigen::MatrixXd dense_normalized_laplacian(const Graph& g) {
  const std::size_t n = g.num_vertices();
  Eigen::MatrixXd nl = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Vertex v = 0; v < n; ++v) nl(v, v) = 1.0;
  for (const auto& e : g.edges()) {
    const double s = e.w / std::sqrt(g.degree(e.u) * g.degree(e.v));
    nl(e.u, e.v) -= s;
    nl(e.v, e.u) -= s;
  }
  return nl;
}

inline SpectralResult lambda_dense(const Graph& g) {
  const auto kernel = kernel_direction(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense_normalized_laplacian(g));
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "dense eigensolver failed");
  const Eigen::VectorXd col = solver.eigenvectors().col(1);
  std::vector<double> z(col.data(), col.data() + col.size());
  return finish(g, std::move(z), kernel, solver.eigenvalues()(1), 1, LambdaMethod::Dense);
}

/// Appends the columns of w to the orthonormal columns of q (two passes of
/// Gram-Schmidt, kernel deflated); columns that collapse are dropped.
inline void extend_basis(Eigen::MatrixXd& q, Eigen::Index& used, const Eigen::MatrixXd& w,
                         std::span<const double> kernel) {
  const auto rows = q.rows();
  const Eigen::Map<const Eigen::VectorXd> k(kernel.data(), rows);
  for (Eigen::Index j = 0; j < w.cols() && used < q.cols(); ++j) {
    Eigen::VectorXd v = w.col(j);
    const double before = v.norm();
    if (!(before > 0.0)) continue;
    for (int pass = 0; pass < 2; ++pass) {
      v -= k * k.dot(v);
      if (used > 0) v -= q.leftCols(used) * (q.leftCols(used).transpose() * v);
    }
    const double after = v.norm();
    if (after <= 1e-10 * before) continue;
    q.col(used++) = v / after;
  }
}

/// Thick-restart block Krylov iteration on N^+ (equivalently block Lanczos
/// on N restricted to the complement of its kernel) with a Rayleigh-Ritz step
/// on N after every restart cycle.
inline SpectralResult lambda_iterative(const Graph& g, const LambdaOptions& opts) {
  const std::size_t n = g.num_vertices();
  const auto kernel = kernel_direction(g);
  const auto rows = static_cast<Eigen::Index>(n);
  const auto k = static_cast<Eigen::Index>(std::min(opts.block_size, n - 1));
  const auto width = static_cast<Eigen::Index>(std::min<std::size_t>(n - 1, 8 * static_cast<std::size_t>(k)));
  SolverOptions solve_opts;
  solve_opts.rel_tol = 1e-12;

  std::mt19937_64 rng(opts.seed);
  Eigen::MatrixXd start(rows, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto z = random_start(n, kernel, rng);
    start.col(j) = Eigen::Map<const Eigen::VectorXd>(z.data(), rows);
  }

  auto apply_block = [&](const Eigen::MatrixXd& x, bool inverse) {
    Eigen::MatrixXd out(rows, x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const Eigen::VectorXd col = x.col(j);
      const std::span<const double> v(col.data(), n);
      const auto w = inverse ? apply_normalized_pinv(g, v, kernel, solve_opts) : apply_normalized(g, v);
      out.col(j) = Eigen::Map<const Eigen::VectorXd>(w.data(), rows);
    }
    return out;
  };

  double best_residual = std::numeric_limits<double>::infinity();
  std::vector<double> best;
  double best_lambda = 0.0;
  std::size_t stalled = 0;
  for (std::size_t round = 1; round <= opts.max_rounds; ++round) {
    Eigen::MatrixXd q(rows, width);
    Eigen::Index used = 0;
    extend_basis(q, used, start, kernel);
    Eigen::Index block_begin = 0;
    while (used < width) {
      const Eigen::Index block_end = used;
      if (block_end == block_begin) break;
      const auto w = apply_block(q.middleCols(block_begin, block_end - block_begin), true);
      extend_basis(q, used, w, kernel);
      block_begin = block_end;
      if (used == block_end) break;
    }
    const Eigen::MatrixXd basis = q.leftCols(used);
    const Eigen::MatrixXd nq = apply_block(basis, false);
    Eigen::MatrixXd projected = basis.transpose() * nq;
    projected = 0.5 * (projected + projected.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(projected);
    const auto keep = std::min(k, used);
    start = basis * ritz.eigenvectors().leftCols(keep);

    const double theta = ritz.eigenvalues()(0);
    const Eigen::VectorXd v = start.col(0);
    const Eigen::VectorXd nv = nq * ritz.eigenvectors().col(0);
    const double residual = (nv - theta * v).norm() / v.norm();

    if (residual < 0.5 * best_residual) {
      stalled = 0;
    } else {
      ++stalled;
    }
    if (residual < best_residual) {
      best_residual = residual;
      best.assign(v.data(), v.data() + n);
      best_lambda = theta;
    }
    if (best_residual <= 1e-3 * opts.residual_tol || (best_residual <= opts.residual_tol && stalled >= 2)) {
      return finish(g, std::move(best), kernel, best_lambda, round, LambdaMethod::Iterative);
    }
  }
  if (best_residual <= opts.residual_tol) {
    return finish(g, std::move(best), kernel, best_lambda, opts.max_rounds, LambdaMethod::Iterative);
  }
  throw Error(ErrorKind::NoConvergence, "block Krylov iteration did not reach the eigen residual");
}

}  // namespace detail

/// Smallest nonzero eigenvalue of the normalized Laplacian with its
/// eigenvector. Dense decomposition up to `dense_threshold` vertices,
/// block inverse iteration above.
inline SpectralResult lambda_gap(const Graph& g, const LambdaOptions& opts = {}) {
  require_connected(g);
  if (g.num_vertices() < 2) throw Error(ErrorKind::BadParams, "spectral gap needs at least two vertices");
  if (g.num_vertices() <= opts.dense_threshold) return detail::lambda_dense(g);
  return detail::lambda_iterative(g, opts);
}

/// Approximate Fiedler vector: z orthogonal to D^{1/2} 1 with
/// z^T N z <= 2 lambda_G z^T z. Single-vector inverse power iteration from a
/// random start, stopped once the Rayleigh quotient improves by less than
/// `decrease_tol` relative or after 10 ceil(ln n) rounds.
inline SpectralResult apx_fiedler(const Graph& g, const FiedlerOptions& opts = {}) {
  require_connected(g);
  const std::size_t n = g.num_vertices();
  if (n < 2) throw Error(ErrorKind::BadParams, "Fiedler vector needs at least two vertices");
  const auto kernel = detail::kernel_direction(g);
  const auto cap = std::max<std::size_t>(
      10, 10 * static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n)))));

  std::mt19937_64 rng(opts.seed);
  auto z = detail::random_start(n, kernel, rng);
  double rq = normalized_rayleigh(g, z);
  const SolverOptions solve_opts;
  std::size_t round = 1;
  for (; round <= cap; ++round) {
    auto w = detail::apply_normalized_pinv(g, z, kernel, solve_opts);
    const double nw = detail::norm(w);
    if (!(nw > 0.0) || !std::isfinite(nw)) throw Error(ErrorKind::NoConvergence, "inverse iterate vanished");
    for (double& v : w) v /= nw;
    const double next = normalized_rayleigh(g, w);
    // Exact inverse iteration never raises the Rayleigh quotient.
    if (next > rq * (1.0 + 1e-6) + 1e-14) {
      throw Error(ErrorKind::NoConvergence, "Rayleigh quotient increased; inner solves are too inaccurate");
    }
    z = std::move(w);
    const bool settled = rq - next < opts.decrease_tol * rq;
    rq = next;
    if (settled) break;
  }
  return detail::finish(g, std::move(z), kernel, rq, std::min(round, cap), LambdaMethod::Iterative);
}

}  // namespace schurcut
