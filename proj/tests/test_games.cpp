#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "conefix/games.hpp"
#include "conefix/semidiff.hpp"
#include "test_support.hpp"

using namespace conefix;
namespace ct = conefix::testing;

namespace {

const Vec kBias = {5.0, 0.0, 4.0};

GameGraph two_node_cycle(double a, double b) {
  GameGraph g;
  g.n = 2;
  g.arcs = {{0, 1, a}, {1, 0, b}};
  return g;
}

}  // namespace

TEST_CASE("graph validation") {
  GameGraph g;
  g.n = 2;
  g.arcs = {{0, 1, 1.0}};
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);  // node 1 has no arc
  g.arcs.push_back({1, 0, 2.0});
  CHECK_NOTHROW(g.validate());
  g.arcs.push_back({1, 0, 3.0});
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);  // duplicate arc
  g.arcs.back() = {1, 2, 3.0};
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);  // out of range
  g.arcs.back() = {1, 1, std::nan("")};
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("shapley operator construction") {
  const MinMaxAffineOp f = shapley_operator(ct::fig1_game());
  std::mt19937_64 rng(41);
  for (int t = 0; t < 50; ++t) {
    const Vec x = ct::random_vec(rng, 3, -6, 6);
    CHECK(sup_norm(sub(f.evaluate(x), ct::fig1_reference(x))) ==
          doctest::Approx(0.0));
  }

  GameGraph loop;
  loop.n = 1;
  loop.arcs = {{0, 0, 4.5}};
  const MinMaxAffineOp fl = shapley_operator(loop);
  CHECK(fl.evaluate({2.0})[0] == doctest::Approx(6.5));

  const MinMaxAffineOp f2 = shapley_operator(two_node_cycle(3.0, -1.0));
  const Vec y = f2.evaluate({10.0, 20.0});
  CHECK(y[0] == doctest::Approx(23.0));
  CHECK(y[1] == doctest::Approx(9.0));
}

TEST_CASE("value iteration") {
  const MinMaxAffineOp f = shapley_operator(ct::fig1_game());
  const auto traj = value_iteration(f, {0, 0, 0}, 1);
  CHECK(traj[1][0] == doctest::Approx(2.0));
  CHECK(traj[1][1] == doctest::Approx(-2.0));
  CHECK(traj[1][2] == doctest::Approx(2.5));

  const auto idtraj = value_iteration(identity_op(2), {1.0, -1.0}, 5);
  for (const Vec& x : idtraj) {
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(-1.0));
  }

  // From the bias the iteration advances by mu e each step.
  const auto btraj = value_iteration(f, kBias, 3);
  for (int k = 1; k <= 3; ++k) {
    const Vec expect = add_const(kBias, static_cast<double>(k));
    CHECK(sup_norm(sub(btraj[static_cast<std::size_t>(k)], expect)) <= 1e-9);
  }
}

TEST_CASE("mean payoff") {
  const MinMaxAffineOp f = shapley_operator(ct::fig1_game());
  const MeanPayoff mp = mean_payoff(f, 200);
  CHECK(mp.converged);
  for (double c : mp.chi) CHECK(c == doctest::Approx(1.0).epsilon(1e-6));

  GameGraph loop;
  loop.n = 1;
  loop.arcs = {{0, 0, -2.25}};
  const MeanPayoff mpl = mean_payoff(shapley_operator(loop), 50);
  CHECK(mpl.chi[0] == doctest::Approx(-2.25));

  // Period-2 cycle averages (a+b)/2; value iteration to k = 400 confirms.
  const MeanPayoff mpc = mean_payoff(shapley_operator(two_node_cycle(2, 0)), 400);
  CHECK(mpc.chi[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(mpc.chi[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("additive eigenpair solving") {
  const MinMaxAffineOp f = shapley_operator(ct::fig1_game());

  const EigenReport r1 = solve_additive_eigenpair(f, Psi::coordinate(3, 1));
  REQUIRE(r1.converged);
  CHECK(r1.mu == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(omega_e(sub(r1.u, kBias)) <= 1e-8);
  CHECK(r1.residual <= 1e-9);
  CHECK(std::abs(dot(Psi::coordinate(3, 1).weights, r1.u)) <= 1e-12);

  const EigenReport r2 = solve_additive_eigenpair(f, Psi::uniform(3));
  REQUIRE(r2.converged);
  CHECK(r2.mu == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sup_norm(sub(r2.u, {2.0, -3.0, 1.0})) <= 1e-7);

  GameGraph loop;
  loop.n = 1;
  loop.arcs = {{0, 0, 7.0}};
  const EigenReport rl =
      solve_additive_eigenpair(shapley_operator(loop), Psi::uniform(1));
  REQUIRE(rl.converged);
  CHECK(rl.mu == doctest::Approx(7.0));
  CHECK(rl.u[0] == doctest::Approx(0.0));

  // Eigen-residual identity: F^k(u) = u + k mu e.
  const auto traj = value_iteration(f, r2.u, 10);
  for (int k = 1; k <= 10; ++k) {
    const Vec expect = add_const(r2.u, k * r2.mu);
    CHECK(sup_norm(sub(traj[static_cast<std::size_t>(k)], expect)) <= 1e-9);
  }

  // Mean payoff equals mu e when the eigenpair exists.
  const MeanPayoff mp = mean_payoff(f, 200);
  for (double c : mp.chi) CHECK(c == doctest::Approx(r2.mu).epsilon(1e-6));
}

TEST_CASE("non-convergence is reported, not thrown") {
  // Two disconnected self-loops with different payoffs admit no additive
  // eigenvector; the residual oscillation stays at |1 - 0| = 1.
  GameGraph g;
  g.n = 2;
  g.arcs = {{0, 0, 0.0}, {1, 1, 1.0}};
  SolveOptions opts;
  opts.max_iter = 500;
  const EigenReport r =
      solve_additive_eigenpair(shapley_operator(g), Psi::uniform(2), opts);
  CHECK(!r.converged);
  CHECK(r.iterations == 500);
  CHECK(r.residual >= 0.5);
}

TEST_CASE("solver rejects non-monotone input") {
  const auto neg = make_op(1, {Expr::leaf({-1.0}, 0.0)});
  CHECK_THROWS_AS(solve_additive_eigenpair(neg, Psi::uniform(1)),
                  std::invalid_argument);
}

TEST_CASE("bias uniqueness certification") {
  const MinMaxAffineOp f = shapley_operator(ct::fig1_game());
  EigenReport r = solve_additive_eigenpair(f, Psi::uniform(3));
  REQUIRE(r.converged);
  certify_bias_uniqueness(f, r);
  REQUIRE(r.uniqueness.has_value());
  CHECK(r.uniqueness->status == Certificate::holds);
  REQUIRE(r.rate_bound.has_value());
  CHECK(*r.rate_bound == doctest::Approx(0.5).epsilon(1e-9));

  // Single self-loop: omega on R^1 vanishes identically, so the certificate
  // holds vacuously.
  GameGraph loop;
  loop.n = 1;
  loop.arcs = {{0, 0, 7.0}};
  const MinMaxAffineOp fl = shapley_operator(loop);
  EigenReport rl = solve_additive_eigenpair(fl, Psi::uniform(1));
  certify_bias_uniqueness(fl, rl);
  CHECK(rl.uniqueness->status == Certificate::holds);
  CHECK(*rl.rate_bound == doctest::Approx(0.0));

  // Deterministic two-node cycle: F'_u is an omega isometry, so this
  // sufficient condition fails even though the bias happens to be unique.
  const MinMaxAffineOp fc = shapley_operator(two_node_cycle(2.0, 0.0));
  EigenReport rc = solve_additive_eigenpair(fc, Psi::uniform(2));
  REQUIRE(rc.converged);
  certify_bias_uniqueness(fc, rc);
  CHECK(rc.uniqueness->status == Certificate::fails);
  CHECK((!rc.rate_bound.has_value() || *rc.rate_bound >= 1.0));
}

TEST_CASE("active successors at the bias") {
  const GameActiveSets as = active_successors(ct::fig1_game(), kBias);
  CHECK(as.e_plus[0] == std::vector<int>{0});
  CHECK(as.e_minus[0] == std::vector<int>{1, 2});
  CHECK(as.e_plus[1] == std::vector<int>{0});
  CHECK(as.e_minus[1] == std::vector<int>{2});
  CHECK(as.e_plus[2] == std::vector<int>{0});
  CHECK(as.e_minus[2] == std::vector<int>{1});
}

TEST_CASE("convergence report") {
  const MinMaxAffineOp f = shapley_operator(ct::fig1_game());
  const Psi psi = Psi::uniform(3);
  EigenReport r = solve_additive_eigenpair(f, psi);
  REQUIRE(r.converged);
  certify_bias_uniqueness(f, r);

  const ConvergenceReport cr = convergence_report(f, r, psi, 50, 40);
  CHECK(cr.max_root_rate <= 0.55);
  for (const auto& st : cr.starts) {
    const double o = omega_e(sub(st.x0, r.u));
    CHECK(o >= 0.1 - 1e-9);
    CHECK(o <= 10.0 + 1e-9);
  }

  // Eigen-direction start: error identically zero.
  Vec x = add_const(r.u, 2.7);
  for (int k = 0; k < 5; ++k) {
    const Vec expect = add_const(r.u, 2.7 + (k)*r.mu);
    CHECK(sup_norm(sub(x, expect)) <= 1e-9);
    x = f.evaluate(x);
  }

  // One-step halving from u + (0,1,0).
  const Vec x0 = add(r.u, Vec{0, 1, 0});
  const double w0 = omega_e(sub(x0, r.u));
  const double w1 = omega_e(sub(f.evaluate(x0), f.evaluate(r.u)));
  CHECK(w1 == doctest::Approx(0.5 * w0).epsilon(1e-9));
}

TEST_CASE("structural invariants of Shapley operators") {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 25; ++t) {
    const int n = 2 + t % 5;
    const GameGraph g = ct::random_strongly_connected_game(rng, n, n);
    const MinMaxAffineOp f = shapley_operator(g);
    for (int k = 0; k < 40; ++k) {
      const Vec x = ct::random_vec(rng, static_cast<std::size_t>(n), -5, 5);
      const Vec y = add(x, ct::random_vec(rng, static_cast<std::size_t>(n), 0, 3));
      const Vec fx = f.evaluate(x);
      const Vec fy = f.evaluate(y);
      for (int i = 0; i < n; ++i) {
        CHECK(fx[static_cast<std::size_t>(i)] <=
              fy[static_cast<std::size_t>(i)] + 1e-12);
      }
      const double s = 1.3;
      CHECK(sup_norm(sub(f.evaluate(add_const(x, s)), add_const(fx, s))) <= 1e-12);
      CHECK(sup_norm(sub(fx, fy)) <= sup_norm(sub(x, y)) + 1e-12);
      CHECK(omega_e(sub(fx, fy)) <= omega_e(sub(x, y)) + 1e-12);
    }
  }
}

TEST_CASE("fixed-point displacement bounds at the bias derivative") {
  // With S containing 0, the displacement x - h(x) of an order-preserving
  // additively homogeneous h with h(0) = 0 obeys
  //   min(x - h(x)) <= max(min(x), 0) and max(x - h(x)) >= min(max(x), 0).
  std::mt19937_64 rng(47);
  const MinMaxAffineOp f = shapley_operator(ct::fig1_game());
  const EigenReport r = solve_additive_eigenpair(f, Psi::uniform(3));
  const MinMaxAffineOp h = semidifferential(f, r.u).op;
  for (int t = 0; t < 200; ++t) {
    const Vec x = ct::random_vec(rng, 3, -4, 4);
    const Vec z = sub(x, h.evaluate(x));
    const double mz = *std::min_element(z.begin(), z.end());
    const double Mz = *std::max_element(z.begin(), z.end());
    const double mx = *std::min_element(x.begin(), x.end());
    const double Mx = *std::max_element(x.begin(), x.end());
    CHECK(mz <= std::max(mx, 0.0) + 1e-12);
    CHECK(Mz >= std::min(Mx, 0.0) - 1e-12);
  }
}

TEST_CASE("game JSON round trip") {
  const GameGraph g = ct::fig1_game();
  const GameGraph h = game_from_json(game_to_json(g));
  CHECK(h.n == g.n);
  REQUIRE(h.arcs.size() == g.arcs.size());
  for (std::size_t i = 0; i < g.arcs.size(); ++i) {
    CHECK(h.arcs[i].from == g.arcs[i].from);
    CHECK(h.arcs[i].to == g.arcs[i].to);
    CHECK(h.arcs[i].payoff == g.arcs[i].payoff);
  }
}
