#pragma once

// Shared fixtures and generators for the unit and acceptance suites:
// the worked 3-node game, hand-built reference operators, and seeded
// random instances (positive vectors, min/max-affine operators, strongly
// connected games).

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "conefix/games.hpp"
#include "conefix/minmax.hpp"
#include "conefix/vec.hpp"

namespace conefix::testing {

inline GameGraph fig1_game() {
  GameGraph g;
  g.n = 3;
  g.arcs = {{0, 0, 3.0}, {0, 1, 4.0}, {0, 2, 0.0}, {1, 0, 0.0}, {1, 1, 3.0},
            {1, 2, -7.0}, {2, 0, 3.0}, {2, 1, 2.0}};
  return g;
}

/// The worked operator written out coordinate by coordinate, independent of
/// shapley_operator:
///   F1 = 1/2 (max(3+x1, 4+x2, x3) + min(3+x1, 4+x2, x3))
///   F2 = 1/2 (max(x1, 3+x2, -7+x3) + min(x1, 3+x2, -7+x3))
///   F3 = 1/2 (max(3+x1, 2+x2) + min(3+x1, 2+x2))
inline Vec fig1_reference(const Vec& x) {
  auto avg_minmax = [](std::vector<double> t) {
    double hi = t[0], lo = t[0];
    for (double v : t) {
      hi = std::max(hi, v);
      lo = std::min(lo, v);
    }
    return 0.5 * (hi + lo);
  };
  return {avg_minmax({3 + x[0], 4 + x[1], x[2]}),
          avg_minmax({x[0], 3 + x[1], -7 + x[2]}),
          avg_minmax({3 + x[0], 2 + x[1]})};
}

/// The semidifferential at the bias (5,0,4), written out by hand:
///   (1/2 (x1 + min(x2,x3)), 1/2 (x1 + x3), 1/2 (x1 + x2)).
inline Vec fig1_bias_derivative(const Vec& x) {
  return {0.5 * (x[0] + std::min(x[1], x[2])), 0.5 * (x[0] + x[2]),
          0.5 * (x[0] + x[1])};
}

inline Vec random_vec(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                      double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vec x(n);
  for (double& v : x) v = dist(rng);
  return x;
}

inline Vec random_positive_vec(std::mt19937_64& rng, std::size_t n,
                               double log_range = 1.5) {
  Vec x = random_vec(rng, n, -log_range, log_range);
  for (double& v : x) v = std::exp(v);
  return x;
}

/// A random operator R^n -> R^n whose coordinates are max nodes, min nodes,
/// or 1/2 (max + min) combinations of <= max_terms affine leaves.
inline MinMaxAffineOp random_minmax_op(std::mt19937_64& rng, std::size_t n,
                                       int max_terms = 4,
                                       bool linear_only = false) {
  std::uniform_int_distribution<int> nterms(2, max_terms);
  std::uniform_int_distribution<int> shape(0, 2);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  auto leaves = [&]() {
    std::vector<ExprPtr> ls;
    const int k = nterms(rng);
    for (int t = 0; t < k; ++t) {
      Vec p(n);
      for (double& v : p) v = coef(rng);
      ls.push_back(Expr::leaf(std::move(p), linear_only ? 0.0 : coef(rng)));
    }
    return ls;
  };
  std::vector<ExprPtr> coords;
  for (std::size_t i = 0; i < n; ++i) {
    switch (shape(rng)) {
      case 0:
        coords.push_back(Expr::max_of(leaves()));
        break;
      case 1:
        coords.push_back(Expr::min_of(leaves()));
        break;
      default:
        coords.push_back(Expr::weighted_sum(
            {0.5, 0.5}, {Expr::max_of(leaves()), Expr::min_of(leaves())}));
        break;
    }
  }
  return make_op(n, std::move(coords));
}

/// A sparse homogeneous operator kept small enough for exact sign-pattern
/// enumeration of its syntactic powers: each coordinate is a max or min of
/// two linear leaves with a single nonzero weight each.
inline MinMaxAffineOp random_sparse_homogeneous_op(std::mt19937_64& rng,
                                                   std::size_t n) {
  std::uniform_int_distribution<int> pick(0, static_cast<int>(n) - 1);
  std::uniform_real_distribution<double> mag(0.25, 1.5);
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<ExprPtr> coords;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<ExprPtr> ls;
    for (int t = 0; t < 2; ++t) {
      const double w = (coin(rng) ? 1.0 : -1.0) * mag(rng);
      ls.push_back(
          Expr::leaf(basis_vec(n, static_cast<std::size_t>(pick(rng)), w), 0.0));
    }
    coords.push_back(coin(rng) ? Expr::max_of(std::move(ls))
                               : Expr::min_of(std::move(ls)));
  }
  return make_op(n, std::move(coords));
}

/// Strongly connected random game: a Hamiltonian cycle plus extra arcs.
inline GameGraph random_strongly_connected_game(std::mt19937_64& rng, int n,
                                                int extra_arcs) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::uniform_real_distribution<double> payoff(-5.0, 5.0);
  std::uniform_int_distribution<int> node(0, n - 1);
  GameGraph g;
  g.n = n;
  std::set<std::pair<int, int>> seen;
  for (int i = 0; i < n; ++i) {
    const int from = perm[static_cast<std::size_t>(i)];
    const int to = perm[static_cast<std::size_t>((i + 1) % n)];
    seen.insert({from, to});
    g.arcs.push_back({from, to, payoff(rng)});
  }
  for (int t = 0; t < extra_arcs; ++t) {
    const int from = node(rng);
    const int to = node(rng);
    if (seen.insert({from, to}).second) {
      g.arcs.push_back({from, to, payoff(rng)});
    }
  }
  return g;
}

}  // namespace conefix::testing
