#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "schurcut/graph.hpp"
#include "schurcut/schur.hpp"
#include "schurcut/spectral.hpp"

namespace schurcut {

/// Constants of the SweepCut guarantee.
inline constexpr double kProxyFactor = 640.0;
inline constexpr double kInteriorFraction = 0.25;
inline constexpr double kLambdaCeiling = 1.0 / 25600.0;

/// κ_q(y): clamp of y to [q/2, q] for q > 0, to [q, q/2] for q <= 0.
inline double kappa(double q, double y) {
  if (q > 0.0) return std::min(q, std::max(q / 2.0, y));
  return std::min(q / 2.0, std::max(q, y));
}

/// Embedding swept by SweepCut: x = D^{-1/2} z and y = x - alpha 1, with
/// alpha a degree-weighted median of x.
struct SweepVector {
  std::vector<double> x;
  std::vector<double> y;
  double alpha = 0.0;
};

/// Lower degree-weighted median of x: the value at which the cumulative
/// degree (in increasing x order) first reaches vol(V)/2.
inline double shift_alpha(const Graph& g, std::span<const double> x) {
  if (x.size() != g.num_vertices()) throw Error(ErrorKind::DimensionMismatch, "shift_alpha: vector length");
  if (x.empty()) return 0.0;
  std::vector<Vertex> order(x.size());
  std::iota(order.begin(), order.end(), Vertex{0});
  std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return x[a] < x[b]; });
  const double half = g.total_volume() / 2.0;
  double cumulative = 0.0;
  for (Vertex v : order) {
    cumulative += g.degree(v);
    if (cumulative >= half) return x[v];
  }
  return x[order.back()];
}

inline SweepVector make_sweep_vector(const Graph& g, std::span<const double> z) {
  if (z.size() != g.num_vertices()) throw Error(ErrorKind::DimensionMismatch, "sweep vector length");
  SweepVector sv;
  sv.x.resize(z.size());
  for (Vertex v = 0; v < z.size(); ++v) sv.x[v] = z[v] / std::sqrt(g.degree(v));
  sv.alpha = shift_alpha(g, sv.x);
  sv.y.resize(z.size());
  for (Vertex v = 0; v < z.size(); ++v) sv.y[v] = sv.x[v] - sv.alpha;
  return sv;
}

/// ĉ(q) = (4/q²) Σ_e c_e (κ_q(y_u) − κ_q(y_v))², the upper bound on the Schur
/// cut weight between the two level sets of threshold q.
inline double proxy_value(const Graph& g, std::span<const double> y, double q) {
  if (y.size() != g.num_vertices()) throw Error(ErrorKind::DimensionMismatch, "proxy_value: vector length");
  if (q == 0.0) throw Error(ErrorKind::ZeroThreshold, "proxy is undefined at q = 0");
  double inner = 0.0;
  for (const auto& e : g.edges()) {
    const double d = kappa(q, y[e.u]) - kappa(q, y[e.v]);
    inner += e.w * d * d;
  }
  return 4.0 * inner / (q * q);
}

/// Breakpoints {y_u, 2 y_u} of the proxy, split by sign. `positive` ascends;
/// `negative` is ordered by increasing magnitude. Zeros are skipped.
struct Breakpoints {
  std::vector<double> positive;
  std::vector<double> negative;
};

namespace detail {

inline constexpr double kBreakpointTolerance = 1e-12;

/// Sorted positive breakpoints of y, deduplicated within the tolerance.
inline std::vector<double> positive_breakpoints(std::span<const double> y) {
  std::vector<double> pts;
  for (double v : y) {
    if (v > 0.0) {
      pts.push_back(v);
      pts.push_back(2.0 * v);
    }
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double p : pts) {
    if (out.empty() || p - out.back() > kBreakpointTolerance) out.push_back(p);
  }
  return out;
}

inline std::vector<double> negated(std::span<const double> y) {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = -y[i];
  return out;
}

/// Running sum with Neumaier compensation.
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace detail

inline Breakpoints sweep_breakpoints(std::span<const double> y) {
  Breakpoints b;
  b.positive = detail::positive_breakpoints(y);
  for (double p : detail::positive_breakpoints(detail::negated(y))) b.negative.push_back(-p);
  return b;
}

/// On (lo, hi) the inner sum Σ c_e (κ_q(y_u) − κ_q(y_v))² equals
/// a q² + b q + c, so h(q) = 4 (a + b/q + c/q²).
struct ProxyPiece {
  double lo = 0.0;
  double hi = 0.0;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double inner(double q) const { return (a * q + b) * q + c; }
  double value(double q) const { return 4.0 * (a + b / q + c / (q * q)); }

  /// Interior zero of h'(q) = -4 (b/q² + 2c/q³), if any.
  std::optional<double> stationary_point() const {
    if (b == 0.0) return std::nullopt;
    const double q = -2.0 * c / b;
    if (q > lo && q < hi) return q;
    return std::nullopt;
  }
};

/// Piecewise representation of h on both sides of zero. Pieces are ordered by
/// increasing |q|; a negative piece spans (lo, hi) with hi <= 0.
struct PiecewiseProxy {
  std::vector<ProxyPiece> positive;
  std::vector<ProxyPiece> negative;

  const ProxyPiece& piece_at(double q) const {
    if (q == 0.0) throw Error(ErrorKind::ZeroThreshold, "proxy is undefined at q = 0");
    if (q > 0.0) {
      auto it = std::upper_bound(positive.begin(), positive.end(), q,
                                 [](double t, const ProxyPiece& p) { return t <= p.hi; });
      return it == positive.end() ? positive.back() : *it;
    }
    auto it = std::upper_bound(negative.begin(), negative.end(), q,
                               [](double t, const ProxyPiece& p) { return t >= p.lo; });
    return it == negative.end() ? negative.back() : *it;
  }

  double evaluate(double q) const { return piece_at(q).value(q); }
};

namespace detail {

/// Coefficients for q > 0, one piece per gap between consecutive breakpoints,
/// accumulated edge by edge through difference arrays.
inline std::vector<ProxyPiece> positive_pieces(const Graph& g, std::span<const double> y) {
  const auto bp = positive_breakpoints(y);
  const std::size_t pieces = bp.size() + 1;
  auto index_of = [&](double t) {
    // nearest deduplicated representative of a breakpoint value
    auto it = std::lower_bound(bp.begin(), bp.end(), t - kBreakpointTolerance);
    return static_cast<std::size_t>(it - bp.begin());
  };

  // For vertex u with y_u > 0: κ = q on pieces [0, i1], y_u on (i1, i2],
  // q/2 beyond i2, where i1, i2 index the breakpoints y_u and 2 y_u.
  struct State {
    std::size_t first = 0;
    std::size_t second = 0;
    bool positive = false;
  };
  std::vector<State> state(y.size());
  for (Vertex v = 0; v < y.size(); ++v) {
    if (y[v] > 0.0) state[v] = {index_of(y[v]) + 1, index_of(2.0 * y[v]) + 1, true};
  }
  auto form = [&](Vertex v, std::size_t piece) -> std::pair<double, double> {
    const auto& s = state[v];
    if (!s.positive || piece >= s.second) return {0.5, 0.0};
    if (piece < s.first) return {1.0, 0.0};
    return {0.0, y[v]};
  };

  std::vector<double> da(pieces + 1, 0.0), db(pieces + 1, 0.0), dc(pieces + 1, 0.0);
  std::vector<std::size_t> cuts;
  for (const auto& e : g.edges()) {
    cuts.assign({0, pieces});
    for (Vertex v : {e.u, e.v}) {
      if (state[v].positive) {
        cuts.push_back(state[v].first);
        cuts.push_back(state[v].second);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const auto [au, bu] = form(e.u, cuts[k]);
      const auto [av, bv] = form(e.v, cuts[k]);
      const double dalpha = au - av;
      const double dbeta = bu - bv;
      if (dalpha == 0.0 && dbeta == 0.0) continue;
      const double qa = e.w * dalpha * dalpha;
      const double qb = 2.0 * e.w * dalpha * dbeta;
      const double qc = e.w * dbeta * dbeta;
      da[cuts[k]] += qa;
      db[cuts[k]] += qb;
      dc[cuts[k]] += qc;
      da[cuts[k + 1]] -= qa;
      db[cuts[k + 1]] -= qb;
      dc[cuts[k + 1]] -= qc;
    }
  }

  std::vector<ProxyPiece> out(pieces);
  CompensatedSum sa, sb, sc;
  for (std::size_t j = 0; j < pieces; ++j) {
    sa.add(da[j]);
    sb.add(db[j]);
    sc.add(dc[j]);
    out[j].lo = j == 0 ? 0.0 : bp[j - 1];
    out[j].hi = j < bp.size() ? bp[j] : std::numeric_limits<double>::infinity();
    out[j].a = sa.value();
    out[j].b = sb.value();
    out[j].c = sc.value();
  }
  return out;
}

}  // namespace detail

/// h(q) as quadratic-in-q inner sums between consecutive breakpoints. The
/// negative side is the positive side of −y reflected: S(q) = S'(−q).
inline PiecewiseProxy piecewise_proxy(const Graph& g, std::span<const double> y) {
  if (y.size() != g.num_vertices()) throw Error(ErrorKind::DimensionMismatch, "piecewise_proxy: vector length");
  PiecewiseProxy out;
  out.positive = detail::positive_pieces(g, y);
  for (const auto& p : detail::positive_pieces(g, detail::negated(y))) {
    out.negative.push_back({-p.hi, -p.lo, p.a, -p.b, p.c});
  }
  return out;
}

namespace detail {

/// Level-set statistics of an embedding, each query O(log n).
class LevelSets {
public:
  LevelSets(const Graph& g, std::span<const double> y) : total_volume_(g.total_volume()) {
    std::vector<Vertex> order(y.size());
    std::iota(order.begin(), order.end(), Vertex{0});
    std::sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return y[a] < y[b]; });
    values_.reserve(y.size());
    prefix_volume_.assign(1, 0.0);
    for (Vertex v : order) {
      values_.push_back(y[v]);
      prefix_volume_.push_back(prefix_volume_.back() + g.degree(v));
    }
    std::vector<std::pair<double, double>> lows, highs;
    for (const auto& e : g.edges()) {
      lows.emplace_back(std::min(y[e.u], y[e.v]), e.w);
      highs.emplace_back(std::max(y[e.u], y[e.v]), e.w);
    }
    fill(lows, low_values_, low_prefix_);
    fill(highs, high_values_, high_prefix_);
  }

  double total_volume() const { return total_volume_; }
  double volume_at_least(double t) const { return prefix_volume_.back() - prefix_volume_[count_below(values_, t)]; }
  double volume_at_most(double t) const { return prefix_volume_[count_at_most(values_, t)]; }
  std::size_t size_at_least(double t) const { return values_.size() - count_below(values_, t); }
  std::size_t size_at_most(double t) const { return count_at_most(values_, t); }

  /// c(∂ S_{≥t}): edges with min endpoint < t <= max endpoint.
  double boundary_at_least(double t) const {
    return weight_at_least(high_values_, high_prefix_, t) - weight_at_least(low_values_, low_prefix_, t);
  }

  /// c(∂ S_{≤t}): edges with min endpoint <= t < max endpoint.
  double boundary_at_most(double t) const {
    return weight_at_most(low_values_, low_prefix_, t) - weight_at_most(high_values_, high_prefix_, t);
  }

private:
  static void fill(std::vector<std::pair<double, double>>& items, std::vector<double>& values,
                   std::vector<double>& prefix) {
    std::sort(items.begin(), items.end());
    prefix.assign(1, 0.0);
    for (const auto& [v, w] : items) {
      values.push_back(v);
      prefix.push_back(prefix.back() + w);
    }
  }
  static std::size_t count_below(const std::vector<double>& v, double t) {
    return static_cast<std::size_t>(std::lower_bound(v.begin(), v.end(), t) - v.begin());
  }
  static std::size_t count_at_most(const std::vector<double>& v, double t) {
    return static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), t) - v.begin());
  }
  static double weight_at_least(const std::vector<double>& v, const std::vector<double>& p, double t) {
    return p.back() - p[count_below(v, t)];
  }
  static double weight_at_most(const std::vector<double>& v, const std::vector<double>& p, double t) {
    return p[count_at_most(v, t)];
  }

  double total_volume_;
  std::vector<double> values_;
  std::vector<double> prefix_volume_;
  std::vector<double> low_values_, low_prefix_;
  std::vector<double> high_values_, high_prefix_;
};

}  // namespace detail

/// One sampled threshold of the sweep.
struct SweepCandidate {
  double q = 0.0;
  double proxy = 0.0;
  double vol_far = 0.0;   // vol S_{≥q} (q > 0) or vol S_{≤q} (q < 0)
  double vol_near = 0.0;  // vol S_{≤q/2} (q > 0) or vol S_{≥q/2} (q < 0)
  bool low_proxy = false;       // condition (1)
  bool small_boundary = false;  // condition (2)
  bool interior = false;        // condition (3)

  bool satisfied() const { return low_proxy && small_boundary && interior; }
  double certificate() const { return proxy / std::min(vol_far, vol_near); }
};

struct SweepResult {
  VertexSet A;
  VertexSet B;
  double q = 0.0;
  double proxy = 0.0;
  ConductanceReport report;
  double phi_A = 0.0;
  double phi_B = 0.0;
  bool low_proxy = false;
  bool small_boundary = false;
  bool interior = false;
  bool satisfied = false;
  double lambda_hat = 0.0;  // λ used in condition (1)
  double rayleigh = 0.0;    // Rayleigh quotient of the Fiedler estimate
  double alpha = 0.0;
  std::vector<SweepCandidate> curve;
};

struct SweepOptions {
  /// Overrides the λ used in condition (1); defaults to rayleigh / 2.
  std::optional<double> lambda;
  FiedlerOptions fiedler;
  double perturbation = 1e-12;
};

namespace detail {

/// Evaluates the SweepCut conditions at q > 0 for embedding y (the negative
/// side is handled by calling this on −y).
inline std::optional<SweepCandidate> evaluate_candidate(const LevelSets& sets, const PiecewiseProxy& proxy,
                                                        double q, double lambda) {
  if (sets.size_at_least(q) == 0 || sets.size_at_most(q / 2.0) == 0) return std::nullopt;
  SweepCandidate c;
  c.q = q;
  c.vol_far = sets.volume_at_least(q);
  c.vol_near = sets.volume_at_most(q / 2.0);
  c.proxy = proxy.evaluate(q);
  c.low_proxy = c.proxy <= kProxyFactor * lambda * std::min(c.vol_near, c.vol_far);
  // ∂S_{≥q/2} and ∂S_{≤q/2} differ only when some y equals q/2; both must pass.
  const double bound = kInteriorFraction * c.vol_far;
  c.small_boundary = sets.boundary_at_least(q / 2.0) <= bound && sets.boundary_at_most(q / 2.0) <= bound;
  auto phi = [&](double boundary, double vol) {
    const double denom = std::min(vol, sets.total_volume() - vol);
    return denom > 0.0 ? boundary / denom : std::numeric_limits<double>::infinity();
  };
  const double phi_far = phi(sets.boundary_at_least(q), c.vol_far);
  const double phi_near = phi(sets.boundary_at_most(q / 2.0), c.vol_near);
  c.interior = phi_far <= kInteriorFraction && phi_near <= kInteriorFraction;
  return c;
}

inline std::vector<double> candidate_thresholds(std::span<const ProxyPiece> pieces, std::span<const double> bp,
                                                double perturbation) {
  std::vector<double> qs;
  for (double b : bp) {
    qs.push_back(b);
    qs.push_back(b * (1.0 - perturbation));
    qs.push_back(b * (1.0 + perturbation));
  }
  for (const auto& p : pieces) {
    if (auto s = p.stationary_point()) qs.push_back(*s);
  }
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  qs.erase(std::remove_if(qs.begin(), qs.end(), [](double q) { return !(q > 0.0); }), qs.end());
  return qs;
}

}  // namespace detail

/// Runs the threshold sweep over a given Fiedler estimate z with the λ used by
/// condition (1). Throws NoQualifyingThreshold when no threshold passes.
inline SweepResult sweep_cut_from(const Graph& g, std::span<const double> z, double lambda, double rayleigh,
                                  const SweepOptions& opts = {}) {
  require_connected(g);
  const auto sv = make_sweep_vector(g, z);
  const auto flipped = detail::negated(sv.y);

  SweepResult result;
  result.lambda_hat = lambda;
  result.rayleigh = rayleigh;
  result.alpha = sv.alpha;

  std::optional<SweepCandidate> best;
  bool best_negative = false;
  for (int side = 0; side < 2; ++side) {
    const bool negative = side == 1;
    const auto& y = negative ? flipped : sv.y;
    const PiecewiseProxy pp{detail::positive_pieces(g, y), {}};
    const detail::LevelSets sets(g, y);
    const auto bp = detail::positive_breakpoints(y);
    for (double q : detail::candidate_thresholds(pp.positive, bp, opts.perturbation)) {
      auto found = detail::evaluate_candidate(sets, pp, q, lambda);
      if (!found) continue;
      auto c = *found;
      if (negative) c.q = -q;
      result.curve.push_back(c);
      if (!c.satisfied()) continue;
      const bool better = !best || c.certificate() < best->certificate() ||
                          (c.certificate() == best->certificate() && std::abs(c.q) < std::abs(best->q));
      if (better) {
        best = c;
        best_negative = negative;
      }
    }
  }
  std::sort(result.curve.begin(), result.curve.end(),
            [](const SweepCandidate& a, const SweepCandidate& b) { return a.q < b.q; });
  if (!best) {
    throw Error(ErrorKind::NoQualifyingThreshold,
                "no threshold satisfies the sweep conditions (lambda estimate " + std::to_string(lambda) + ")");
  }

  // Positive q returns (S_{≤q/2}, S_{≥q}); negative q returns (S_{≤q}, S_{≥q/2}).
  const double q = best->q;
  std::vector<Vertex> a, b;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    const double yv = sv.y[v];
    if (!best_negative) {
      if (yv <= q / 2.0) a.push_back(v);
      if (yv >= q) b.push_back(v);
    } else {
      if (yv <= q) a.push_back(v);
      if (yv >= q / 2.0) b.push_back(v);
    }
  }
  result.A = VertexSet(std::move(a), g.num_vertices());
  result.B = VertexSet(std::move(b), g.num_vertices());
  result.q = q;
  result.proxy = proxy_value(g, sv.y, q);
  result.report = conductance_pair(g, result.A, result.B);
  result.phi_A = phi_set(g, result.A);
  result.phi_B = phi_set(g, result.B);
  result.low_proxy = best->low_proxy;
  result.small_boundary = best->small_boundary;
  result.interior = best->interior;
  result.satisfied = best->satisfied();
  return result;
}

/// SweepCut: approximate Fiedler vector, shift to a weighted median, sweep
/// both signs of the threshold. Condition (1) uses λ̂ = rayleigh / 2 unless
/// overridden.
inline SweepResult sweep_cut(const Graph& g, const SweepOptions& opts = {}) {
  require_connected(g);
  const auto fiedler = apx_fiedler(g, opts.fiedler);
  const double lambda = opts.lambda.value_or(fiedler.rayleigh / 2.0);
  return sweep_cut_from(g, fiedler.vector, lambda, fiedler.rayleigh, opts);
}

/// Best fractional conductance over the prefix level sets of x (the classic
/// Cheeger sweep), with the attaining set.
struct CheegerSweep {
  double phi = std::numeric_limits<double>::infinity();
  VertexSet set;
};

inline CheegerSweep cheeger_sweep(const Graph& g, std::span<const double> x) {
  if (x.size() != g.num_vertices()) throw Error(ErrorKind::DimensionMismatch, "cheeger_sweep: vector length");
  const std::size_t n = g.num_vertices();
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), Vertex{0});
  std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return x[a] < x[b]; });
  std::vector<char> inside(n, 0);
  const double total = g.total_volume();
  double vol = 0.0;
  double boundary = 0.0;
  CheegerSweep best;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Vertex v = order[k];
    double to_inside = 0.0;
    for (const auto& nb : g.neighbors(v)) {
      if (inside[nb.vertex]) to_inside += nb.weight;
    }
    inside[v] = 1;
    vol += g.degree(v);
    boundary += g.degree(v) - 2.0 * to_inside;
    const double phi = boundary / std::min(vol, total - vol);
    if (phi < best.phi) {
      best.phi = phi;
      best_k = k + 1;
    }
  }
  best.set = VertexSet(std::vector<Vertex>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best_k)), n);
  return best;
}

}  // namespace schurcut
