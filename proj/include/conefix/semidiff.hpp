#pragma once

// Semidifferential calculus for min/max-affine operators: the symbolic
// directional-derivative operator f'_v (derivative-of-sup rule for finite
// index families plus the chain rule), active-set extraction, breakpoint
// radii, and a finite-difference oracle used only for validation.

#include <functional>
#include <vector>

#include "conefix/minmax.hpp"
#include "conefix/vec.hpp"

namespace conefix {

/// Active children of every max/min node, per output coordinate, recorded in
/// DFS preorder over the coordinate's max/min nodes. Leaves and sum nodes do
/// not select, so they carry no entry.
struct ActiveSets {
  struct Node {
    bool is_max = false;
    std::vector<int> active;  // child indices within tolerance of node value
  };
  std::vector<std::vector<Node>> per_coord;
};

/// Relative-absolute active-set tolerance: tau_scale * (1 + |node value|).
inline constexpr double kActiveTolScale = 1e-9;

struct Semidifferential {
  MinMaxAffineOp op;  // f'_v: homogeneous (all leaves linear)
  ActiveSets active;
};

/// Symbolic semidifferential of f at v: evaluate every node at v, prune max
/// nodes to children within tau of the node value (min nodes symmetrically),
/// and drop leaf offsets. The result h = f'_v is positively homogeneous and
/// satisfies f(v + t x) = f(v) + t h(x) for 0 <= t below the breakpoint
/// radius of (v, x).
Semidifferential semidifferential(const MinMaxAffineOp& f, const Vec& v,
                                  double tau_scale = kActiveTolScale);

/// Largest t* such that f(v + t x) = f(v) + t f'_v(x) for all t in [0, t*],
/// computed from node values and rates: the first t at which an inactive
/// sibling overtakes an active child. +inf when nothing overtakes.
double breakpoint_radius(const MinMaxAffineOp& f, const Vec& v, const Vec& x,
                         double tau_scale = kActiveTolScale);

/// Chain rule composition g'_{f(v)} o f'_v. Both arguments must be
/// homogeneous; the composition is syntactic and evaluates extensionally as
/// evaluate(g_prime, evaluate(f_prime, x)).
MinMaxAffineOp compose_semidiff(const MinMaxAffineOp& g_prime,
                                const MinMaxAffineOp& f_prime);

struct FdResult {
  Vec quotient;      // (f(v + t x) - f(v)) / t at the smallest t
  bool stabilized;   // successive quotients within rtol 1e-6
};

/// Finite-difference directional derivative of an arbitrary black-box map.
/// Validation tool only; the production path is the symbolic
/// semidifferential.
FdResult directional_derivative_fd(
    const std::function<Vec(const Vec&)>& f, const Vec& v, const Vec& x,
    const std::vector<double>& t_schedule = {1e-3, 1e-5, 1e-7});

}  // namespace conefix
