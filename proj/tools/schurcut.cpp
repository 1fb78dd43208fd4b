#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "schurcut/schurcut.hpp"

namespace {

using nlohmann::json;
using namespace schurcut;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitOutOfRange = 2;

struct RunConfig {
  std::string input;
  std::string generator;
  std::string format = "json";
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::size_t dense_threshold = LambdaOptions{}.dense_threshold;
  std::vector<std::string> gen_args;
  std::string s1;
  std::string s2;
  std::size_t samples = 200;
};

struct LoadedGraph {
  Graph graph;
  std::optional<double> closed_form;  // exact λ for cycle and path generators
  std::string source;
};

std::vector<std::string> split_spec(const std::string& spec) {
  std::vector<std::string> out;
  std::string token;
  for (char ch : spec) {
    if (ch == ' ' || ch == ':' || ch == ',' || ch == 'x' || ch == '\t') {
      if (!token.empty()) out.push_back(token);
      token.clear();
    } else {
      token += ch;
    }
  }
  if (!token.empty()) out.push_back(token);
  return out;
}

std::size_t parse_count(const std::string& s, const char* what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || s[0] == '-') {
    throw Error(ErrorKind::BadParams, std::string("expected a non-negative integer for ") + what + ", got '" + s + "'");
  }
  return static_cast<std::size_t>(v);
}

double parse_real(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw Error(ErrorKind::BadParams, std::string("expected a number for ") + what + ", got '" + s + "'");
  return v;
}

/// Generator spec: family followed by its parameters, e.g. "cycle 2000",
/// "grid 3x4", "dumbbell 5", "random 30 0.2 4".
gen::EdgeList generate(const std::vector<std::string>& args, std::uint64_t seed, std::optional<double>& closed_form) {
  if (args.empty()) throw Error(ErrorKind::BadParams, "empty generator spec");
  const std::string& family = args[0];
  auto need = [&](std::size_t count) {
    if (args.size() != count + 1) {
      throw Error(ErrorKind::BadParams, family + " expects " + std::to_string(count) + " parameter(s)");
    }
  };
  if (family == "cycle") {
    need(1);
    const auto n = parse_count(args[1], "n");
    auto out = gen::cycle_edges(n);
    closed_form = cycle_gap(n);
    return out;
  }
  if (family == "path") {
    need(1);
    const auto n = parse_count(args[1], "n");
    auto out = gen::path_edges(n);
    closed_form = path_gap(n);
    return out;
  }
  if (family == "grid") {
    need(2);
    return gen::grid_edges(parse_count(args[1], "rows"), parse_count(args[2], "cols"));
  }
  if (family == "dumbbell") {
    need(1);
    return gen::dumbbell_edges(parse_count(args[1], "k"));
  }
  if (family == "random") {
    need(3);
    const double wmax = parse_real(args[3], "w_max");
    if (wmax != static_cast<double>(static_cast<int>(wmax))) throw Error(ErrorKind::BadParams, "w_max must be an integer");
    return gen::random_connected_edges(parse_count(args[1], "n"), parse_real(args[2], "p"), static_cast<int>(wmax),
                                       seed);
  }
  throw Error(ErrorKind::BadParams, "unknown generator family '" + family + "'");
}

LoadedGraph load(const RunConfig& cfg) {
  LoadedGraph out;
  if (!cfg.generator.empty()) {
    if (!cfg.input.empty()) throw Error(ErrorKind::BadParams, "give either an input file or --gen, not both");
    out.graph = generate(split_spec(cfg.generator), cfg.seed, out.closed_form).graph();
    out.source = "gen " + cfg.generator;
    return out;
  }
  if (cfg.input.empty()) throw Error(ErrorKind::BadParams, "no input: pass an edge-list file or --gen SPEC");
  out.graph = cfg.input == "-" ? read_edge_list(std::cin) : read_edge_list_file(cfg.input);
  out.source = cfg.input;
  return out;
}

json labels_of(const Graph& g, const VertexSet& s) {
  json arr = json::array();
  for (Vertex v : s) arr.push_back(g.label(v));
  return arr;
}

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json lambda_json(double value, LambdaMethod method) {
  return {{"value", number(value)}, {"method", std::string(to_string(method))}};
}

std::size_t thread_count() {
  const char* env = std::getenv("SCHUR_CHEEGER_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  return parse_count(env, "SCHUR_CHEEGER_THREADS");
}

VertexSet parse_set(const Graph& g, const std::string& text, const char* name) {
  std::unordered_map<std::string, Vertex> index;
  for (Vertex v = 0; v < g.num_vertices(); ++v) index.emplace(g.label(v), v);
  std::vector<Vertex> members;
  std::stringstream in(text);
  std::string id;
  while (std::getline(in, id, ',')) {
    if (id.empty()) continue;
    const auto it = index.find(id);
    if (it == index.end()) throw Error(ErrorKind::InvalidVertex, std::string("unknown vertex id '") + id + "' in " + name);
    members.push_back(it->second);
  }
  return VertexSet(std::move(members), g.num_vertices());
}

json base_report(const std::string& command, const LoadedGraph& in) {
  return {{"schema", 1},
          {"command", command},
          {"source", in.source},
          {"n", in.graph.num_vertices()},
          {"m", in.graph.num_edges()}};
}

void emit(const json& report, const std::string& format) {
  if (format == "json") {
    std::cout << report.dump(2) << '\n';
    return;
  }
  for (const auto& [key, value] : report.items()) {
    std::cout << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
  }
}

LambdaOptions lambda_options(const RunConfig& cfg) {
  LambdaOptions opts;
  opts.dense_threshold = cfg.dense_threshold;
  opts.seed = cfg.seed;
  if (cfg.tol) opts.residual_tol = *cfg.tol;
  return opts;
}

int cmd_gen(const RunConfig& cfg) {
  std::vector<std::string> args;
  for (const auto& a : cfg.gen_args) {
    for (auto& t : split_spec(a)) args.push_back(std::move(t));
  }
  std::optional<double> unused;
  const auto list = generate(args, cfg.seed, unused);
  std::ostringstream out;
  out.precision(17);
  for (const auto& e : list.edges) out << e.u << ' ' << e.v << ' ' << e.w << '\n';
  std::cout << out.str();
  return kExitOk;
}

int cmd_lambda(const RunConfig& cfg) {
  const auto in = load(cfg);
  const auto r = lambda_gap(in.graph, lambda_options(cfg));
  auto report = base_report("lambda", in);
  report["lambda"] = lambda_json(r.lambda, r.method);
  report["residual"] = number(r.residual);
  report["rounds"] = r.rounds;
  if (in.closed_form) {
    report["closed_form"] = lambda_json(*in.closed_form, LambdaMethod::ClosedForm);
    report["closed_form_error"] = number(std::abs(r.lambda - *in.closed_form));
  }
  report["trivial_regime"] = r.lambda > kLambdaCeiling;
  emit(report, cfg.format);
  return kExitOk;
}

int cmd_phi(const RunConfig& cfg) {
  const auto in = load(cfg);
  const auto& g = in.graph;
  auto report = base_report("phi", in);
  const auto fiedler = apx_fiedler(g, {FiedlerOptions{}.decrease_tol, cfg.seed});
  std::vector<double> x(g.num_vertices());
  for (Vertex v = 0; v < x.size(); ++v) x[v] = fiedler.vector[v] / std::sqrt(g.degree(v));
  const auto sweep = cheeger_sweep(g, x);
  report["sweep"] = {{"phi", number(sweep.phi)}, {"set", labels_of(g, sweep.set)}};
  if (g.num_vertices() <= oracle::kMaxSubsetVertices) {
    const auto exact = oracle::phi_exact(g);
    report["phi_G"] = number(exact.phi);
    report["set"] = labels_of(g, exact.set);
    report["phi_method"] = "exact";
  } else {
    report["phi_G"] = number(sweep.phi);
    report["set"] = labels_of(g, sweep.set);
    report["phi_method"] = "sweep-upper-bound";
  }
  const auto lambda = lambda_gap(g, lambda_options(cfg));
  report["lambda"] = lambda_json(lambda.lambda, lambda.method);
  report["cheeger_lower"] = number(lambda.lambda / 2);
  report["cheeger_upper"] = number(std::sqrt(2 * lambda.lambda));
  emit(report, cfg.format);
  return kExitOk;
}

int cmd_sweepcut(const RunConfig& cfg) {
  const auto in = load(cfg);
  const auto& g = in.graph;
  auto report = base_report("sweepcut", in);
  SweepOptions opts;
  opts.fiedler.seed = cfg.seed;
  try {
    const auto r = sweep_cut(g, opts);
    report["A"] = labels_of(g, r.A);
    report["B"] = labels_of(g, r.B);
    report["q"] = number(r.q);
    report["proxy"] = number(r.proxy);
    report["sigma"] = number(r.report.sigma);
    report["rho"] = number(r.report.rho);
    report["schur_cut"] = number(r.report.schur_cut);
    report["phi_A"] = number(r.phi_A);
    report["phi_B"] = number(r.phi_B);
    report["lambda_hat"] = lambda_json(r.lambda_hat, LambdaMethod::Iterative);
    report["rayleigh"] = number(r.rayleigh);
    report["alpha"] = number(r.alpha);
    report["conditions"] = {{"low_proxy", r.low_proxy}, {"small_boundary", r.small_boundary}, {"interior", r.interior}};
    report["satisfied"] = r.satisfied;
    if (in.closed_form) report["lambda"] = lambda_json(*in.closed_form, LambdaMethod::ClosedForm);
    json curve = json::array();
    const std::size_t stride = std::max<std::size_t>(1, (r.curve.size() + cfg.samples - 1) / std::max<std::size_t>(1, cfg.samples));
    for (std::size_t i = 0; i < r.curve.size(); i += stride) {
      const auto& c = r.curve[i];
      curve.push_back({{"q", number(c.q)}, {"h", number(c.proxy)}, {"ok", c.satisfied()}});
    }
    report["curve_candidates"] = r.curve.size();
    report["curve"] = std::move(curve);
    emit(report, cfg.format);
    return r.satisfied ? kExitOk : kExitOutOfRange;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoQualifyingThreshold) throw;
    const auto lambda = lambda_gap(g, lambda_options(cfg));
    report["error"] = std::string(to_string(e.kind()));
    report["message"] = e.what();
    report["lambda"] = lambda_json(lambda.lambda, lambda.method);
    if (lambda.lambda > kLambdaCeiling) report["regime"] = "trivial (lambda > 1/25600)";
    report["satisfied"] = false;
    emit(report, cfg.format);
    return kExitOutOfRange;
  }
}

json pair_json(const Graph& g, const oracle::PairMinimum& p) {
  return {{"value", number(p.value)}, {"A", labels_of(g, p.a)}, {"B", labels_of(g, p.b)}};
}

int cmd_rho_exact(const RunConfig& cfg) {
  const auto in = load(cfg);
  const auto& g = in.graph;
  oracle::EnumerationOptions opts;
  opts.threads = thread_count();
  const auto r = oracle::rho_sigma_exact(g, opts);
  const double lambda = oracle::dense_lambda(g);
  auto report = base_report("rho-exact", in);
  report["rho_G"] = pair_json(g, r.rho);
  report["sigma_G"] = pair_json(g, r.sigma);
  report["pairs"] = r.pairs;
  report["lambda"] = lambda_json(lambda, LambdaMethod::Dense);
  report["rho_over_lambda"] = number(r.rho.value / lambda);
  emit(report, cfg.format);
  return kExitOk;
}

int cmd_reff(const RunConfig& cfg) {
  const auto in = load(cfg);
  const auto& g = in.graph;
  const auto s1 = parse_set(g, cfg.s1, "--s1");
  const auto s2 = parse_set(g, cfg.s2, "--s2");
  SolverOptions opts;
  if (cfg.tol) opts.required_tol = *cfg.tol;
  const double reff = effective_resistance(g, s1, s2, opts);
  const double min_vol = std::min(volume(g, s1), volume(g, s2));
  auto report = base_report("reff", in);
  report["S1"] = labels_of(g, s1);
  report["S2"] = labels_of(g, s2);
  report["reff"] = number(reff);
  report["min_volume"] = number(min_vol);
  report["sigma"] = number(1.0 / (reff * min_vol));
  report["schur_cut"] = number(1.0 / reff);
  emit(report, cfg.format);
  return kExitOk;
}

int cmd_verify(const RunConfig& cfg) {
  const auto in = load(cfg);
  const auto& g = in.graph;
  const auto rep = oracle::verify_graph(g, thread_count());
  auto report = base_report("verify", in);
  report["lambda"] = lambda_json(rep.lambda, LambdaMethod::Dense);
  report["phi_G"] = number(rep.phi.phi);
  report["phi_set"] = labels_of(g, rep.phi.set);
  report["rho_G"] = number(rep.rho.value);
  report["rho_pair"] = {{"A", labels_of(g, rep.rho.a)}, {"B", labels_of(g, rep.rho.b)}};
  report["sigma_G"] = number(rep.sigma.value);
  report["sigma_pair"] = {{"A", labels_of(g, rep.sigma.a)}, {"B", labels_of(g, rep.sigma.b)}};
  report["pairs"] = rep.pairs;
  report["max_resistance_error"] = number(rep.max_resistance_error);
  json checks = json::array();
  json violated = json::array();
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name}, {"slack", number(c.slack)}, {"tolerance", c.tolerance}, {"holds", c.holds()}});
    if (!c.holds()) violated.push_back(c.name);
  }
  report["checks"] = std::move(checks);
  report["violated"] = violated;
  report["all_hold"] = violated.empty();
  emit(report, cfg.format);
  if (!violated.empty()) {
    for (const auto& name : violated) std::cerr << "violated: " << name.get<std::string>() << '\n';
    return kExitError;
  }
  return kExitOk;
}

/// Proxy dominance and piecewise consistency on the graph's own sweep vector.
int cmd_proxy_check(const RunConfig& cfg) {
  const auto in = load(cfg);
  const auto& g = in.graph;
  const auto fiedler = apx_fiedler(g, {FiedlerOptions{}.decrease_tol, cfg.seed});
  const auto sv = make_sweep_vector(g, fiedler.vector);
  const auto pp = piecewise_proxy(g, sv.y);

  double lo = 0.0;
  double hi = 0.0;
  for (double y : sv.y) {
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> pick(2.0 * lo, 2.0 * hi);
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;
  double worst_consistency = 0.0;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    const double q = pick(rng);
    if (q == 0.0) continue;
    const double direct = proxy_value(g, sv.y, q);
    const double piecewise = pp.evaluate(q);
    worst_consistency =
        std::max(worst_consistency, std::abs(direct - piecewise) / std::max({1.0, std::abs(direct), std::abs(piecewise)}));
    std::vector<Vertex> near, far;
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
      if (q > 0 ? sv.y[v] <= q / 2 : sv.y[v] >= q / 2) near.push_back(v);
      if (q > 0 ? sv.y[v] >= q : sv.y[v] <= q) far.push_back(v);
    }
    if (near.empty() || far.empty()) continue;
    const double cut = schur_cut_weight(g, VertexSet(near, g.num_vertices()), VertexSet(far, g.num_vertices()));
    ++checked;
    if (cut > direct + 1e-7 * (1.0 + direct)) ++violations;
    if (direct > 0.0) worst_ratio = std::max(worst_ratio, cut / direct);
  }
  auto report = base_report("proxy-check", in);
  report["samples"] = cfg.samples;
  report["checked"] = checked;
  report["violations"] = violations;
  report["max_cut_over_proxy"] = number(worst_ratio);
  report["max_piecewise_error"] = number(worst_consistency);
  report["ok"] = violations == 0 && worst_consistency <= 1e-9;
  emit(report, cfg.format);
  return violations == 0 && worst_consistency <= 1e-9 ? kExitOk : kExitError;
}

void report_error(const std::string& command, const std::string& format, const std::string& kind,
                  const std::string& message) {
  std::cerr << "error: " << message << '\n';
  if (format == "json") {
    json out = {{"schema", 1}, {"command", command}, {"error", kind}, {"message", message}};
    std::cout << out.dump(2) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schur-complement cuts and spectral-gap certificates for weighted graphs"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub, bool with_input) {
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--seed", cfg.seed, "Seed for generators and randomized starts");
    sub->add_option("--tol", cfg.tol, "Residual tolerance override");
    sub->add_option("--dense-threshold", cfg.dense_threshold, "Largest n solved by dense eigendecomposition");
    if (with_input) {
      sub->add_option("input", cfg.input, "Edge-list file ('-' for stdin)");
      sub->add_option("--gen", cfg.generator, "Generator spec, e.g. \"cycle 2000\" or \"grid 3x4\"");
    }
  };

  auto* gen_cmd = app.add_subcommand("gen", "Write a generated graph in edge-list format");
  gen_cmd->add_option("family", cfg.gen_args, "cycle N | path N | grid R C | dumbbell K | random N P WMAX")
      ->required();
  add_common(gen_cmd, false);

  auto* lambda_cmd = app.add_subcommand("lambda", "Spectral gap of the normalized Laplacian");
  add_common(lambda_cmd, true);
  auto* phi_cmd = app.add_subcommand("phi", "Fractional conductance of the graph");
  add_common(phi_cmd, true);
  auto* sweep_cmd = app.add_subcommand("sweepcut", "Run SweepCut and report the certified pair");
  add_common(sweep_cmd, true);
  sweep_cmd->add_option("--curve-points", cfg.samples, "Maximum number of proxy-curve samples in the output");
  auto* rho_cmd = app.add_subcommand("rho-exact", "Exhaustive rho_G and sigma_G (n <= 9)");
  add_common(rho_cmd, true);
  auto* reff_cmd = app.add_subcommand("reff", "Effective resistance between two vertex sets");
  add_common(reff_cmd, true);
  reff_cmd->add_option("--s1", cfg.s1, "Comma-separated vertex ids")->required();
  reff_cmd->add_option("--s2", cfg.s2, "Comma-separated vertex ids")->required();
  auto* verify_cmd = app.add_subcommand("verify", "Check every inequality exactly (n <= 9)");
  add_common(verify_cmd, true);
  auto* proxy_cmd = app.add_subcommand("proxy-check", "Check proxy dominance on sampled thresholds");
  add_common(proxy_cmd, true);
  proxy_cmd->add_option("--samples", cfg.samples, "Number of sampled thresholds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (command == "gen") return cmd_gen(cfg);
    if (command == "lambda") return cmd_lambda(cfg);
    if (command == "phi") return cmd_phi(cfg);
    if (command == "sweepcut") return cmd_sweepcut(cfg);
    if (command == "rho-exact") return cmd_rho_exact(cfg);
    if (command == "reff") return cmd_reff(cfg);
    if (command == "verify") return cmd_verify(cfg);
    if (command == "proxy-check") return cmd_proxy_check(cfg);
  } catch (const Error& e) {
    report_error(command, cfg.format, std::string(to_string(e.kind())), e.what());
    return kExitError;
  } catch (const std::exception& e) {
    report_error(command, cfg.format, "Internal", e.what());
    return kExitError;
  }
  return kExitError;
}
