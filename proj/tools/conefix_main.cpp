// conefix CLI: batch analysis of cone metrics, min/max-affine operators and
// coin-toss stochastic games. Subcommands:
//   solve     game JSON -> additive eigenpair report
//   certify   solve + bias-uniqueness certificate and rate bound
//   rate      certify + empirical convergence rates from random starts
//   metric    pair of vectors -> Hilbert/Thompson metrics and seminorms
//   semidiff  operator + anchor -> symbolic semidifferential
//   spectral  homogeneous operator -> Bonsall estimate
//
// Exit codes: 0 success, 1 input error, 2 non-convergence.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "conefix/cone_metrics.hpp"
#include "conefix/games.hpp"
#include "conefix/minmax.hpp"
#include "conefix/semidiff.hpp"
#include "conefix/spectral.hpp"

namespace {

using nlohmann::json;
using namespace conefix;

constexpr const char* kSchemaVersion = "1";

struct RunConfig {
  std::string subcommand;
  std::string input_path;
  std::string output_path;  // empty: stdout
  double tol = 1e-10;
  int max_iter = 10000;
  int depth = 3;
  std::uint64_t seed = 0x5EED;
  std::string psi = "avg";
  double theta = 0.5;
  std::string norm = "osc";
  int starts = 100;
  int rate_depth = 40;
};

json load_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

void emit(const RunConfig& cfg, const json& report) {
  const std::string text = report.dump(2) + "\n";
  if (cfg.output_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.output_path);
    if (!out) throw std::runtime_error("cannot open output file: " + cfg.output_path);
    out << text;
  }
}

Psi make_psi(const RunConfig& cfg, std::size_t n) {
  if (cfg.psi == "avg") return Psi::uniform(n);
  if (cfg.psi.rfind("coord:", 0) == 0) {
    const std::size_t i = std::stoul(cfg.psi.substr(6));
    return Psi::coordinate(n, i);
  }
  throw std::runtime_error("bad --psi value '" + cfg.psi +
                           "' (expected avg or coord:<i>)");
}

NormSpec make_norm(const RunConfig& cfg, std::size_t n) {
  if (cfg.norm == "sup") return NormSpec::sup();
  if (cfg.norm == "osc") return NormSpec::osc_e(n);
  if (cfg.norm == "local") return NormSpec::local(Vec(n, 1.0));
  throw std::runtime_error("bad --norm value '" + cfg.norm + "'");
}

int run_metric(const RunConfig& cfg) {
  const json in = load_input(cfg.input_path);
  const auto x = ConeVector::positive(in.at("x").get<std::vector<double>>());
  const auto y = ConeVector::positive(in.at("y").get<std::vector<double>>());
  const auto u = in.contains("u")
                     ? ConeVector::positive(in.at("u").get<std::vector<double>>())
                     : ConeVector::positive(Vec(x.dim(), 1.0));
  const ConeVector diff = ConeVector::of(sub(x.entries(), y.entries()));
  json rep{{"schema_version", kSchemaVersion},
           {"scale_upper", scale_upper(y, x)},
           {"scale_lower", scale_lower(y, x)},
           {"hilbert", hilbert_metric(x, y)},
           {"thompson", thompson_metric(x, y)},
           {"local_norm_diff", local_norm(diff, u)},
           {"oscillation_diff", oscillation(diff, u)}};
  emit(cfg, rep);
  return 0;
}

json solve_game(const RunConfig& cfg, const json& in, MinMaxAffineOp& f,
                EigenReport& rep, GameGraph& g, Psi& psi) {
  g = game_from_json(in);
  f = shapley_operator(g);
  psi = make_psi(cfg, f.input_dim);
  SolveOptions opts;
  opts.theta = cfg.theta;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  rep = solve_additive_eigenpair(f, psi, opts);
  if (rep.converged) rep.active = active_successors(g, rep.u);
  json j = eigen_report_to_json(rep);
  j["schema_version"] = kSchemaVersion;
  return j;
}

int run_solve(const RunConfig& cfg, bool certify, bool rate) {
  const json in = load_input(cfg.input_path);
  MinMaxAffineOp f;
  EigenReport rep;
  GameGraph g;
  Psi psi;
  json j = solve_game(cfg, in, f, rep, g, psi);
  if (!rep.converged) {
    emit(cfg, j);
    return 2;
  }
  if (certify) {
    SamplePlan plan;
    plan.seed = cfg.seed;
    certify_bias_uniqueness(f, rep, cfg.depth, plan);
    j = eigen_report_to_json(rep);
    j["schema_version"] = kSchemaVersion;
  }
  if (rate) {
    const ConvergenceReport cr =
        convergence_report(f, rep, psi, cfg.starts, cfg.rate_depth, cfg.seed);
    json starts = json::array();
    for (const auto& st : cr.starts) {
      starts.push_back({{"root_rate", st.root_rate},
                        {"drift", st.drift},
                        {"sup_err", st.sup_err}});
    }
    j["convergence"] = {{"depth", cfg.rate_depth},
                        {"max_root_rate", cr.max_root_rate},
                        {"starts", starts}};
  }
  emit(cfg, j);
  return 0;
}

int run_semidiff(const RunConfig& cfg) {
  const json in = load_input(cfg.input_path);
  const MinMaxAffineOp f = op_from_json(in.at("op"));
  const Vec v = in.at("v").get<Vec>();
  const Semidifferential sd = semidifferential(f, v);
  json active = json::array();
  for (const auto& coord : sd.active.per_coord) {
    json nodes = json::array();
    for (const auto& node : coord) {
      nodes.push_back({{"is_max", node.is_max}, {"active", node.active}});
    }
    active.push_back(nodes);
  }
  emit(cfg, json{{"schema_version", kSchemaVersion},
                 {"derivative", op_to_json(sd.op)},
                 {"active_sets", active}});
  return 0;
}

int run_spectral(const RunConfig& cfg) {
  const json in = load_input(cfg.input_path);
  const MinMaxAffineOp h = op_from_json(in.contains("op") ? in.at("op") : in);
  SamplePlan plan;
  plan.seed = cfg.seed;
  const SpectralEstimate est =
      bonsall_estimate(h, cfg.depth, make_norm(cfg, h.input_dim), plan);
  json j = estimate_to_json(est);
  j["schema_version"] = kSchemaVersion;
  emit(cfg, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonexpansive-map analysis on cones: metrics, "
               "semidifferentials, spectral bounds, stochastic games"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input_path, "input JSON path")->required();
    sub->add_option("--output", cfg.output_path, "output path (default stdout)");
    sub->add_option("--tol", cfg.tol, "solver tolerance");
    sub->add_option("--max-iter", cfg.max_iter, "iteration cap");
    sub->add_option("--depth", cfg.depth,
                    "power depth K for spectral estimates and certification");
    sub->add_option("--seed", cfg.seed, "sampling seed");
    sub->add_option("--psi", cfg.psi, "normalizer: avg or coord:<i>");
    sub->add_option("--theta", cfg.theta, "damping in (0,1]");
    return sub;
  };
  auto* solve = add_common(app.add_subcommand("solve", "additive eigenpair"));
  auto* certify =
      add_common(app.add_subcommand("certify", "solve + uniqueness"));
  auto* rate = add_common(app.add_subcommand("rate", "certify + rates"));
  rate->add_option("--starts", cfg.starts, "random starts");
  rate->add_option("--rate-depth", cfg.rate_depth,
                   "iterations per start for the empirical rate");
  auto* metric = add_common(app.add_subcommand("metric", "cone metrics"));
  auto* semidiff =
      add_common(app.add_subcommand("semidiff", "symbolic semidifferential"));
  auto* spectral =
      add_common(app.add_subcommand("spectral", "Bonsall estimate"));
  spectral->add_option("--norm", cfg.norm, "sup | osc | local");

  CLI11_PARSE(app, argc, argv);

  if (const char* env_seed = std::getenv("CONEFIX_SEED")) {
    cfg.seed = std::strtoull(env_seed, nullptr, 10);
  }
  if (!(cfg.tol > 0.0)) {
    std::cerr << "error: --tol must be > 0\n";
    return 1;
  }
  if (cfg.depth < 1) {
    std::cerr << "error: --depth must be >= 1\n";
    return 1;
  }

  try {
    if (solve->parsed()) return run_solve(cfg, false, false);
    if (certify->parsed()) return run_solve(cfg, true, false);
    if (rate->parsed()) return run_solve(cfg, true, true);
    if (metric->parsed()) return run_metric(cfg);
    if (semidiff->parsed()) return run_semidiff(cfg);
    if (spectral->parsed()) return run_spectral(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
