#pragma once

// Shapley operators of coin-toss stochastic games on finite digraphs:
// construction, value iteration, mean payoff, additive eigenpair solving by
// damped (Krasnoselskii) iteration of the normalized operator, active sets,
// bias-uniqueness certification and empirical convergence rates.

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "conefix/minmax.hpp"
#include "conefix/semidiff.hpp"
#include "conefix/spectral.hpp"
#include "conefix/vec.hpp"

namespace conefix {

/// Directed weighted graph (V, E, A_ij). Every node needs at least one
/// outgoing arc; duplicate (from, to) arcs are rejected.
struct GameGraph {
  struct Arc {
    int from = 0;
    int to = 0;
    double payoff = 0.0;
  };

  int n = 0;
  std::vector<Arc> arcs;

  void validate() const;  // throws std::invalid_argument on violations
};

/// Linear positive normalizer, represented as a probability vector in the
/// e-basis (nonnegative weights summing to 1, so psi(e) = 1).
struct Psi {
  Vec weights;

  static Psi uniform(std::size_t n);
  static Psi coordinate(std::size_t n, std::size_t i);
  double operator()(const Vec& x) const { return dot(weights, x); }
};

/// F_i(x) = 1/2 ( max_{(i,j) in E} (A_ij + x_j) + min_{(i,j) in E} (A_ij + x_j) ).
/// The result is order preserving and additively homogeneous.
MinMaxAffineOp shapley_operator(const GameGraph& g);

/// (F^0(x0), ..., F^k(x0)).
std::vector<Vec> value_iteration(const MinMaxAffineOp& f, const Vec& x0, int k);

struct MeanPayoff {
  // Tail-difference estimate (F^{k_max}(0) - F^{k_max/2}(0)) / (k_max/2);
  // the transient cancels, so this converges geometrically whenever the
  // game has an additive eigenpair. The plain average F^{k_max}(0) / k_max
  // only converges at rate O(1/k) and is kept as a cross-check.
  Vec chi;
  Vec average;
  bool converged = false;  // chi agrees with the half-depth estimate (tol)
};

MeanPayoff mean_payoff(const MinMaxAffineOp& f, int k_max, double tol = 1e-6);

/// Successor index sets attaining the max (E+) and min (E-) per node.
struct GameActiveSets {
  std::vector<std::vector<int>> e_plus;
  std::vector<std::vector<int>> e_minus;
};

GameActiveSets active_successors(const GameGraph& g, const Vec& u,
                                 double tau_scale = kActiveTolScale);

struct EigenReport {
  Vec u;                 // bias, normalized to psi(u) = 0
  double mu = 0.0;       // additive eigenvalue
  double residual = 0.0; // omega_e(F(u) - u)
  int iterations = 0;
  bool converged = false;
  std::optional<GameActiveSets> active;       // set when built from a game
  std::optional<ContractionCert> uniqueness;  // set by certify_bias_uniqueness
  std::optional<double> rate_bound;           // Bonsall upper bound for F'_u
};

struct SolveOptions {
  double theta = 0.5;   // damping; theta = 1 is plain normalized iteration
  double tol = 1e-10;
  int max_iter = 10000;
};

/// Damped fixed-point iteration x <- (1-theta) x + theta (F(x) - psi(F(x)) e)
/// from x0 = 0. Non-convergence is a reported outcome, not an error. F is
/// spot-checked for order preservation and additive homogeneity.
EigenReport solve_additive_eigenpair(const MinMaxAffineOp& f, const Psi& psi,
                                     const SolveOptions& opts = {});

/// Builds F'_u, runs the oscillation-seminorm contraction certificate, and
/// records the uniqueness status and Bonsall rate bound on the report.
void certify_bias_uniqueness(const MinMaxAffineOp& f, EigenReport& report,
                             int depth = 3, const SamplePlan& plan = {});

struct ConvergenceReport {
  struct Start {
    Vec x0;
    double root_rate = 0.0;  // (omega(F^k(x0) - u) / omega(x0 - u))^{1/k}
    double drift = 0.0;      // lambda(x0) = psi(F^k(x0) - u)
    double sup_err = 0.0;    // ||F^k(x0) - drift e - u||_inf
  };
  std::vector<Start> starts;
  double max_root_rate = 0.0;
};

/// Empirical geometric-rate check from seeded random starts with
/// omega(x0 - u) in [0.1, 10].
ConvergenceReport convergence_report(const MinMaxAffineOp& f,
                                     const EigenReport& report, const Psi& psi,
                                     int starts, int depth,
                                     std::uint64_t seed = 0x5EED);

// JSON: GameGraph {"n": ..., "arcs": [{"from","to","payoff"}, ...]};
// EigenReport mirrors its fields.
nlohmann::json game_to_json(const GameGraph& g);
GameGraph game_from_json(const nlohmann::json& j);
nlohmann::json eigen_report_to_json(const EigenReport& r);

}  // namespace conefix
