#include "conefix/games.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

#include "conefix/cone_metrics.hpp"

namespace conefix {

void GameGraph::validate() const {
  if (n < 1) throw std::invalid_argument("GameGraph: n must be >= 1");
  std::vector<bool> has_out(static_cast<std::size_t>(n), false);
  std::set<std::pair<int, int>> seen;
  for (const Arc& a : arcs) {
    if (a.from < 0 || a.from >= n || a.to < 0 || a.to >= n) {
      throw std::invalid_argument("GameGraph: arc endpoint out of range");
    }
    if (!std::isfinite(a.payoff)) {
      throw std::invalid_argument("GameGraph: payoff must be finite");
    }
    if (!seen.insert({a.from, a.to}).second) {
      throw std::invalid_argument("GameGraph: duplicate arc");
    }
    has_out[static_cast<std::size_t>(a.from)] = true;
  }
  for (int i = 0; i < n; ++i) {
    if (!has_out[static_cast<std::size_t>(i)]) {
      throw std::invalid_argument("GameGraph: node " + std::to_string(i) +
                                  " has no successor");
    }
  }
}

Psi Psi::uniform(std::size_t n) {
  return Psi{Vec(n, 1.0 / static_cast<double>(n))};
}

Psi Psi::coordinate(std::size_t n, std::size_t i) {
  if (i >= n) throw std::invalid_argument("Psi::coordinate: index out of range");
  return Psi{basis_vec(n, i, 1.0)};
}

MinMaxAffineOp shapley_operator(const GameGraph& g) {
  g.validate();
  const std::size_t n = static_cast<std::size_t>(g.n);
  std::vector<std::vector<ExprPtr>> succ(n);
  for (const GameGraph::Arc& a : g.arcs) {
    succ[static_cast<std::size_t>(a.from)].push_back(
        Expr::leaf(basis_vec(n, static_cast<std::size_t>(a.to)), a.payoff));
  }
  std::vector<ExprPtr> coords;
  coords.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    coords.push_back(Expr::weighted_sum(
        {0.5, 0.5}, {Expr::max_of(succ[i]), Expr::min_of(succ[i])}));
  }
  return make_op(n, std::move(coords));
}

std::vector<Vec> value_iteration(const MinMaxAffineOp& f, const Vec& x0,
                                 int k) {
  if (k < 0) throw std::invalid_argument("value_iteration: k must be >= 0");
  std::vector<Vec> traj;
  traj.reserve(static_cast<std::size_t>(k) + 1);
  traj.push_back(x0);
  for (int i = 0; i < k; ++i) traj.push_back(f.evaluate(traj.back()));
  return traj;
}

MeanPayoff mean_payoff(const MinMaxAffineOp& f, int k_max, double tol) {
  if (k_max < 1) throw std::invalid_argument("mean_payoff: k_max must be >= 1");
  const int half = k_max / 2;
  const int quarter = half / 2;
  Vec x(f.input_dim, 0.0);
  Vec x_half(f.input_dim, 0.0);
  Vec x_quarter(f.input_dim, 0.0);
  for (int k = 0; k < k_max; ++k) {
    if (k == quarter) x_quarter = x;
    if (k == half) x_half = x;
    x = f.evaluate(x);
  }
  MeanPayoff mp;
  mp.average = scale(1.0 / k_max, x);
  if (half > 0) {
    mp.chi = scale(1.0 / (k_max - half), sub(x, x_half));
    const Vec prev = (half > quarter)
                         ? scale(1.0 / (half - quarter), sub(x_half, x_quarter))
                         : mp.average;
    mp.converged = sup_norm(sub(mp.chi, prev)) <= tol;
  } else {
    mp.chi = mp.average;
    mp.converged = false;
  }
  return mp;
}

GameActiveSets active_successors(const GameGraph& g, const Vec& u,
                                 double tau_scale) {
  g.validate();
  require_same_dim(u.size(), static_cast<std::size_t>(g.n),
                   "active_successors");
  const std::size_t n = static_cast<std::size_t>(g.n);
  std::vector<std::vector<std::pair<int, double>>> vals(n);
  for (const GameGraph::Arc& a : g.arcs) {
    vals[static_cast<std::size_t>(a.from)].push_back(
        {a.to, a.payoff + u[static_cast<std::size_t>(a.to)]});
  }
  GameActiveSets as;
  as.e_plus.resize(n);
  as.e_minus.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double hi = vals[i].front().second;
    double lo = hi;
    for (const auto& [j, v] : vals[i]) {
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    const double tau_hi = tau_scale * (1.0 + std::abs(hi));
    const double tau_lo = tau_scale * (1.0 + std::abs(lo));
    for (const auto& [j, v] : vals[i]) {
      if (v >= hi - tau_hi) as.e_plus[i].push_back(j);
      if (v <= lo + tau_lo) as.e_minus[i].push_back(j);
    }
    std::sort(as.e_plus[i].begin(), as.e_plus[i].end());
    std::sort(as.e_minus[i].begin(), as.e_minus[i].end());
  }
  return as;
}

namespace {

void spot_check_monotone_homogeneous(const MinMaxAffineOp& f) {
  const std::size_t n = f.input_dim;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    Vec x(n), d(n);
    for (double& v : x) v = dist(rng);
    for (double& v : d) v = 0.5 * (1.0 + dist(rng));  // nonnegative bump
    const Vec fx = f.evaluate(x);
    const Vec fy = f.evaluate(add(x, d));
    for (std::size_t i = 0; i < fx.size(); ++i) {
      if (fy[i] < fx[i] - 1e-9) {
        throw std::invalid_argument("operator is not order preserving");
      }
    }
    const double t = 0.75;
    const Vec ft = f.evaluate(add_const(x, t));
    const Vec expect = add_const(fx, t);
    for (std::size_t i = 0; i < fx.size(); ++i) {
      if (std::abs(ft[i] - expect[i]) > 1e-9 * (1.0 + std::abs(expect[i]))) {
        throw std::invalid_argument("operator is not additively homogeneous");
      }
    }
  }
}

}  // namespace

EigenReport solve_additive_eigenpair(const MinMaxAffineOp& f, const Psi& psi,
                                     const SolveOptions& opts) {
  require_same_dim(f.input_dim, f.output_dim(), "solve_additive_eigenpair");
  require_same_dim(psi.weights.size(), f.input_dim,
                   "solve_additive_eigenpair(psi)");
  if (!(opts.theta > 0.0) || opts.theta > 1.0) {
    throw std::invalid_argument("solve_additive_eigenpair: theta in (0,1]");
  }
  spot_check_monotone_homogeneous(f);

  const std::size_t n = f.input_dim;
  EigenReport rep;
  Vec x(n, 0.0);
  double prev_resid = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Vec fx = f.evaluate(x);
    const double resid = omega_e(sub(fx, x));
    rep.iterations = it;
    rep.residual = resid;
    if (resid <= opts.tol && std::abs(resid - prev_resid) <= opts.tol) {
      rep.converged = true;
      break;
    }
    prev_resid = resid;
    const Vec normalized = add_const(fx, -psi(fx));
    x = add(scale(1.0 - opts.theta, x), scale(opts.theta, normalized));
  }
  rep.u = add_const(x, -psi(x));
  rep.mu = psi(f.evaluate(rep.u));
  rep.residual = omega_e(sub(f.evaluate(rep.u), rep.u));
  return rep;
}

void certify_bias_uniqueness(const MinMaxAffineOp& f, EigenReport& report,
                             int depth, const SamplePlan& plan) {
  const Semidifferential sd = semidifferential(f, report.u);
  const NormSpec osc = NormSpec::osc_e(f.input_dim);
  const SpectralEstimate est = bonsall_estimate(sd.op, depth, osc, plan);
  report.uniqueness =
      certify_contraction(sd.op, osc, 1.0 - 1e-9, depth, plan);
  if (est.exact) report.rate_bound = est.upper;
}

ConvergenceReport convergence_report(const MinMaxAffineOp& f,
                                     const EigenReport& report, const Psi& psi,
                                     int starts, int depth,
                                     std::uint64_t seed) {
  if (!report.converged) {
    throw std::invalid_argument("convergence_report: eigenpair not converged");
  }
  // Polish the anchor with plain normalized iteration: the solver stops at
  // its tolerance, and any slack in u floors the measured decay of
  // omega(F^k(x0) - u), inflating the reported root rates.
  Vec u = report.u;
  double best_resid = omega_e(sub(f.evaluate(u), u));
  for (int it = 0; it < 200 && best_resid > 1e-15; ++it) {
    const Vec fu = f.evaluate(u);
    const Vec next = add_const(fu, -psi(fu));
    const double resid = omega_e(sub(f.evaluate(next), next));
    if (resid >= best_resid) break;
    best_resid = resid;
    u = next;
  }
  const std::size_t n = f.input_dim;
  ConvergenceReport out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::uniform_real_distribution<double> amp(0.1, 10.0);
  for (int s = 0; s < starts; ++s) {
    Vec d(n, 0.0);
    double w = 0.0;
    while (w < 1e-6) {  // reject near-constant perturbations
      for (double& v : d) v = dist(rng);
      w = omega_e(d);
    }
    const double target_osc = amp(rng);
    const Vec x0 = axpy(u, target_osc / w, d);

    Vec x = x0;
    for (int k = 0; k < depth; ++k) x = f.evaluate(x);
    const Vec err = sub(x, u);
    ConvergenceReport::Start st;
    st.x0 = x0;
    st.root_rate =
        std::pow(omega_e(err) / omega_e(sub(x0, u)), 1.0 / depth);
    st.drift = psi(err);
    st.sup_err = sup_norm(add_const(err, -st.drift));
    out.max_root_rate = std::max(out.max_root_rate, st.root_rate);
    out.starts.push_back(std::move(st));
  }
  return out;
}

nlohmann::json game_to_json(const GameGraph& g) {
  nlohmann::json arcs = nlohmann::json::array();
  for (const GameGraph::Arc& a : g.arcs) {
    arcs.push_back({{"from", a.from}, {"to", a.to}, {"payoff", a.payoff}});
  }
  return nlohmann::json{{"n", g.n}, {"arcs", arcs}};
}

GameGraph game_from_json(const nlohmann::json& j) {
  GameGraph g;
  g.n = j.at("n").get<int>();
  for (const auto& aj : j.at("arcs")) {
    g.arcs.push_back({aj.at("from").get<int>(), aj.at("to").get<int>(),
                      aj.at("payoff").get<double>()});
  }
  g.validate();
  return g;
}

nlohmann::json eigen_report_to_json(const EigenReport& r) {
  nlohmann::json j{{"u", r.u},
                   {"mu", r.mu},
                   {"residual", r.residual},
                   {"iterations", r.iterations},
                   {"converged", r.converged}};
  if (r.active) {
    j["active_sets"] = {{"e_plus", r.active->e_plus},
                        {"e_minus", r.active->e_minus}};
  }
  if (r.uniqueness) {
    j["uniqueness"] = {{"status", to_string(r.uniqueness->status)},
                       {"factor", r.uniqueness->factor},
                       {"depth", r.uniqueness->depth_used}};
  }
  if (r.rate_bound) j["rate_bound"] = *r.rate_bound;
  return j;
}

}  // namespace conefix
