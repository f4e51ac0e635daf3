#include "conefix/semidiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "conefix/cone_metrics.hpp"

namespace conefix {

namespace {

double active_tol(double node_value, double tau_scale) {
  return tau_scale * (1.0 + std::abs(node_value));
}

// Prunes one subtree at v, recording active sets along the way.
ExprPtr prune_at(const ExprPtr& e, const Vec& v, double tau_scale,
                 std::vector<ActiveSets::Node>& nodes) {
  switch (e->kind()) {
    case Expr::Kind::leaf:
      return Expr::leaf(e->term().weights, 0.0);
    case Expr::Kind::max_node:
    case Expr::Kind::min_node: {
      const bool is_max = e->kind() == Expr::Kind::max_node;
      const double val = e->evaluate(v);
      const double tau = active_tol(val, tau_scale);
      ActiveSets::Node rec;
      rec.is_max = is_max;
      // Reserve this node's preorder slot before descending.
      const std::size_t slot = nodes.size();
      nodes.emplace_back();
      std::vector<ExprPtr> kept;
      for (std::size_t c = 0; c < e->children().size(); ++c) {
        const double cv = e->children()[c]->evaluate(v);
        const bool active = is_max ? cv >= val - tau : cv <= val + tau;
        if (active) {
          rec.active.push_back(static_cast<int>(c));
          kept.push_back(prune_at(e->children()[c], v, tau_scale, nodes));
        }
      }
      nodes[slot] = std::move(rec);
      if (kept.size() == 1) return kept.front();
      return is_max ? Expr::max_of(std::move(kept))
                    : Expr::min_of(std::move(kept));
    }
    case Expr::Kind::sum_node: {
      std::vector<ExprPtr> cs;
      cs.reserve(e->children().size());
      for (const auto& c : e->children()) {
        cs.push_back(prune_at(c, v, tau_scale, nodes));
      }
      return Expr::weighted_sum(e->weights(), std::move(cs));
    }
  }
  throw std::logic_error("prune_at: bad kind");
}

struct NodeRay {
  double value;  // node value at v
  double rate;   // one-sided derivative along x
  double tstar;  // exact-expansion radius of the subtree
};

NodeRay ray_of(const ExprPtr& e, const Vec& v, const Vec& x,
               double tau_scale) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (e->kind()) {
    case Expr::Kind::leaf:
      return {dot(e->term().weights, v) + e->term().offset,
              dot(e->term().weights, x), inf};
    case Expr::Kind::sum_node: {
      NodeRay acc{0.0, 0.0, inf};
      for (std::size_t i = 0; i < e->children().size(); ++i) {
        const NodeRay c = ray_of(e->children()[i], v, x, tau_scale);
        acc.value += e->weights()[i] * c.value;
        acc.rate += e->weights()[i] * c.rate;
        acc.tstar = std::min(acc.tstar, c.tstar);
      }
      return acc;
    }
    case Expr::Kind::max_node:
    case Expr::Kind::min_node: {
      const bool is_max = e->kind() == Expr::Kind::max_node;
      std::vector<NodeRay> cs;
      cs.reserve(e->children().size());
      double val = is_max ? -inf : inf;
      double tstar = inf;
      for (const auto& c : e->children()) {
        cs.push_back(ray_of(c, v, x, tau_scale));
        val = is_max ? std::max(val, cs.back().value)
                     : std::min(val, cs.back().value);
        tstar = std::min(tstar, cs.back().tstar);
      }
      const double tau = active_tol(val, tau_scale);
      double rate = is_max ? -inf : inf;
      for (const NodeRay& c : cs) {
        const bool active = is_max ? c.value >= val - tau : c.value <= val + tau;
        if (active) rate = is_max ? std::max(rate, c.rate)
                                  : std::min(rate, c.rate);
      }
      for (const NodeRay& c : cs) {
        const bool active = is_max ? c.value >= val - tau : c.value <= val + tau;
        if (active) continue;
        // Inactive sibling c overtakes when val + t*rate and c.value + t*c.rate
        // cross; only approaching siblings constrain.
        const double gap = is_max ? val - c.value : c.value - val;
        const double closing = is_max ? c.rate - rate : rate - c.rate;
        if (closing > 0.0) tstar = std::min(tstar, gap / closing);
      }
      return {val, rate, tstar};
    }
  }
  throw std::logic_error("ray_of: bad kind");
}

}  // namespace

Semidifferential semidifferential(const MinMaxAffineOp& f, const Vec& v,
                                  double tau_scale) {
  require_same_dim(v.size(), f.input_dim, "semidifferential");
  Semidifferential out;
  out.active.per_coord.resize(f.coords.size());
  std::vector<ExprPtr> coords;
  coords.reserve(f.coords.size());
  for (std::size_t i = 0; i < f.coords.size(); ++i) {
    coords.push_back(
        prune_at(f.coords[i], v, tau_scale, out.active.per_coord[i]));
  }
  out.op = make_op(f.input_dim, std::move(coords));
  return out;
}

double breakpoint_radius(const MinMaxAffineOp& f, const Vec& v, const Vec& x,
                         double tau_scale) {
  require_same_dim(v.size(), f.input_dim, "breakpoint_radius");
  require_same_dim(x.size(), f.input_dim, "breakpoint_radius");
  double tstar = std::numeric_limits<double>::infinity();
  for (const auto& c : f.coords) {
    tstar = std::min(tstar, ray_of(c, v, x, tau_scale).tstar);
  }
  return tstar;
}

MinMaxAffineOp compose_semidiff(const MinMaxAffineOp& g_prime,
                                const MinMaxAffineOp& f_prime) {
  if (!g_prime.linear_leaves() || !f_prime.linear_leaves()) {
    throw std::invalid_argument(
        "compose_semidiff: both operators must be homogeneous");
  }
  require_homogeneous(g_prime);
  require_homogeneous(f_prime);
  return compose(g_prime, f_prime);
}

FdResult directional_derivative_fd(const std::function<Vec(const Vec&)>& f,
                                   const Vec& v, const Vec& x,
                                   const std::vector<double>& t_schedule) {
  if (t_schedule.empty()) {
    throw std::invalid_argument("directional_derivative_fd: empty schedule");
  }
  for (std::size_t i = 1; i < t_schedule.size(); ++i) {
    if (!(t_schedule[i] < t_schedule[i - 1]) || !(t_schedule[i] > 0.0)) {
      throw std::invalid_argument(
          "directional_derivative_fd: schedule must decrease to 0");
    }
  }
  const Vec fv = f(v);
  FdResult res;
  res.stabilized = true;
  Vec prev;
  for (double t : t_schedule) {
    const Vec fvt = f(axpy(v, t, x));
    Vec q(fv.size());
    for (std::size_t i = 0; i < fv.size(); ++i) q[i] = (fvt[i] - fv[i]) / t;
    if (!prev.empty()) {
      for (std::size_t i = 0; i < q.size(); ++i) {
        if (std::abs(q[i] - prev[i]) > 1e-6 * (1.0 + std::abs(q[i]))) {
          res.stabilized = false;
        }
      }
    }
    prev = std::move(q);
  }
  res.quotient = std::move(prev);
  return res;
}

}  // namespace conefix
