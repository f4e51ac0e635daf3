#include "conefix/minmax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

#include "conefix/cone_metrics.hpp"

namespace conefix {

namespace {

std::size_t common_input_dim(const std::vector<ExprPtr>& children,
                             const char* what) {
  if (children.empty()) {
    throw std::invalid_argument(std::string(what) +
                                ": node must have at least one child");
  }
  for (const auto& c : children) {
    if (!c) throw std::invalid_argument(std::string(what) + ": null child");
    require_same_dim(c->input_dim(), children.front()->input_dim(), what);
  }
  return children.front()->input_dim();
}

}  // namespace

ExprPtr Expr::leaf(Vec weights, double offset) {
  if (weights.empty()) {
    throw std::invalid_argument("Expr::leaf: empty weight vector");
  }
  require_finite(weights, "Expr::leaf");
  if (!std::isfinite(offset)) {
    throw std::invalid_argument("Expr::leaf: offset must be finite");
  }
  auto e = std::shared_ptr<Expr>(new Expr());
  e->kind_ = Kind::leaf;
  e->input_dim_ = weights.size();
  e->linear_leaves_ = offset == 0.0;
  e->term_ = AffineTerm{std::move(weights), offset};
  return e;
}

ExprPtr Expr::max_of(std::vector<ExprPtr> children) {
  auto e = std::shared_ptr<Expr>(new Expr());
  e->kind_ = Kind::max_node;
  e->input_dim_ = common_input_dim(children, "Expr::max_of");
  e->linear_leaves_ = std::all_of(children.begin(), children.end(),
                                  [](const auto& c) { return c->linear_leaves(); });
  e->children_ = std::move(children);
  return e;
}

ExprPtr Expr::min_of(std::vector<ExprPtr> children) {
  auto e = std::shared_ptr<Expr>(new Expr());
  e->kind_ = Kind::min_node;
  e->input_dim_ = common_input_dim(children, "Expr::min_of");
  e->linear_leaves_ = std::all_of(children.begin(), children.end(),
                                  [](const auto& c) { return c->linear_leaves(); });
  e->children_ = std::move(children);
  return e;
}

ExprPtr Expr::weighted_sum(std::vector<double> weights,
                           std::vector<ExprPtr> children) {
  if (weights.size() != children.size()) {
    throw std::invalid_argument(
        "Expr::weighted_sum: weights/children size mismatch");
  }
  require_finite(weights, "Expr::weighted_sum");
  for (double w : weights) {
    if (w < 0.0) {
      throw std::invalid_argument(
          "Expr::weighted_sum: weights must be nonnegative");
    }
  }
  auto e = std::shared_ptr<Expr>(new Expr());
  e->kind_ = Kind::sum_node;
  e->input_dim_ = common_input_dim(children, "Expr::weighted_sum");
  e->linear_leaves_ = std::all_of(children.begin(), children.end(),
                                  [](const auto& c) { return c->linear_leaves(); });
  e->children_ = std::move(children);
  e->weights_ = std::move(weights);
  return e;
}

double Expr::evaluate(const Vec& x) const {
  switch (kind_) {
    case Kind::leaf:
      require_same_dim(x.size(), input_dim_, "Expr::evaluate");
      return dot(term_.weights, x) + term_.offset;
    case Kind::max_node: {
      double v = -std::numeric_limits<double>::infinity();
      for (const auto& c : children_) v = std::max(v, c->evaluate(x));
      return v;
    }
    case Kind::min_node: {
      double v = std::numeric_limits<double>::infinity();
      for (const auto& c : children_) v = std::min(v, c->evaluate(x));
      return v;
    }
    case Kind::sum_node: {
      double v = 0.0;
      for (std::size_t i = 0; i < children_.size(); ++i) {
        v += weights_[i] * children_[i]->evaluate(x);
      }
      return v;
    }
  }
  throw std::logic_error("Expr::evaluate: bad kind");
}

ExprPtr Expr::negate(const ExprPtr& e) {
  switch (e->kind()) {
    case Kind::leaf: {
      Vec p = e->term().weights;
      for (double& w : p) w = -w;
      return leaf(std::move(p), -e->term().offset);
    }
    case Kind::max_node: {
      std::vector<ExprPtr> cs;
      cs.reserve(e->children().size());
      for (const auto& c : e->children()) cs.push_back(negate(c));
      return min_of(std::move(cs));
    }
    case Kind::min_node: {
      std::vector<ExprPtr> cs;
      cs.reserve(e->children().size());
      for (const auto& c : e->children()) cs.push_back(negate(c));
      return max_of(std::move(cs));
    }
    case Kind::sum_node: {
      std::vector<ExprPtr> cs;
      cs.reserve(e->children().size());
      for (const auto& c : e->children()) cs.push_back(negate(c));
      return weighted_sum(e->weights(), std::move(cs));
    }
  }
  throw std::logic_error("Expr::negate: bad kind");
}

ExprPtr Expr::substitute(const ExprPtr& e, const std::vector<ExprPtr>& inner) {
  require_same_dim(e->input_dim(), inner.size(), "Expr::substitute");
  const std::size_t new_dim = inner.front()->input_dim();
  switch (e->kind()) {
    case Kind::leaf: {
      // p.inner(x) + r, split into nonnegative weights on inner_i and on
      // negate(inner_i) so the sum-node invariant is preserved.
      std::vector<double> ws;
      std::vector<ExprPtr> cs;
      for (std::size_t i = 0; i < inner.size(); ++i) {
        const double w = e->term().weights[i];
        if (w > 0.0) {
          ws.push_back(w);
          cs.push_back(inner[i]);
        } else if (w < 0.0) {
          ws.push_back(-w);
          cs.push_back(negate(inner[i]));
        }
      }
      const double r = e->term().offset;
      if (cs.empty()) return leaf(Vec(new_dim, 0.0), r);
      if (r != 0.0) {
        ws.push_back(1.0);
        cs.push_back(leaf(Vec(new_dim, 0.0), r));
      }
      return weighted_sum(std::move(ws), std::move(cs));
    }
    case Kind::max_node:
    case Kind::min_node:
    case Kind::sum_node: {
      std::vector<ExprPtr> cs;
      cs.reserve(e->children().size());
      for (const auto& c : e->children()) cs.push_back(substitute(c, inner));
      if (e->kind() == Kind::max_node) return max_of(std::move(cs));
      if (e->kind() == Kind::min_node) return min_of(std::move(cs));
      return weighted_sum(e->weights(), std::move(cs));
    }
  }
  throw std::logic_error("Expr::substitute: bad kind");
}

Vec MinMaxAffineOp::evaluate(const Vec& x) const {
  require_same_dim(x.size(), input_dim, "MinMaxAffineOp::evaluate");
  Vec out(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) out[i] = coords[i]->evaluate(x);
  return out;
}

bool MinMaxAffineOp::linear_leaves() const {
  return std::all_of(coords.begin(), coords.end(),
                     [](const auto& c) { return c->linear_leaves(); });
}

MinMaxAffineOp make_op(std::size_t input_dim, std::vector<ExprPtr> coords) {
  if (coords.empty()) {
    throw std::invalid_argument("make_op: operator needs >= 1 coordinate");
  }
  for (const auto& c : coords) {
    if (!c) throw std::invalid_argument("make_op: null coordinate");
    require_same_dim(c->input_dim(), input_dim, "make_op");
  }
  return MinMaxAffineOp{input_dim, std::move(coords)};
}

MinMaxAffineOp identity_op(std::size_t n) {
  std::vector<ExprPtr> coords;
  coords.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    coords.push_back(Expr::leaf(basis_vec(n, i), 0.0));
  }
  return make_op(n, std::move(coords));
}

MinMaxAffineOp compose(const MinMaxAffineOp& g, const MinMaxAffineOp& f) {
  require_same_dim(g.input_dim, f.output_dim(), "compose");
  std::vector<ExprPtr> coords;
  coords.reserve(g.coords.size());
  for (const auto& c : g.coords) {
    coords.push_back(Expr::substitute(c, f.coords));
  }
  return make_op(f.input_dim, std::move(coords));
}

MinMaxAffineOp op_power(const MinMaxAffineOp& h, int k) {
  if (k < 1) throw std::invalid_argument("op_power: k must be >= 1");
  require_same_dim(h.input_dim, h.output_dim(), "op_power");
  MinMaxAffineOp acc = h;
  for (int i = 1; i < k; ++i) acc = compose(h, acc);
  return acc;
}

void require_homogeneous(const MinMaxAffineOp& h) {
  const std::size_t n = h.input_dim;
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = 0.3 + 0.7 * static_cast<double>((i * 2654435761u) % 97) / 97.0;
    if (i % 2 == 1) x[i] = -x[i];
  }
  const Vec hx = h.evaluate(x);
  const Vec h2x = h.evaluate(scale(2.0, x));
  for (std::size_t i = 0; i < hx.size(); ++i) {
    if (std::abs(h2x[i] - 2.0 * hx[i]) > 1e-9 * (1.0 + std::abs(hx[i]))) {
      throw std::invalid_argument("operator is not homogeneous");
    }
  }
}

nlohmann::json expr_to_json(const ExprPtr& e) {
  using nlohmann::json;
  switch (e->kind()) {
    case Expr::Kind::leaf:
      return json{{"p", e->term().weights}, {"r", e->term().offset}};
    case Expr::Kind::max_node:
    case Expr::Kind::min_node: {
      json cs = json::array();
      for (const auto& c : e->children()) cs.push_back(expr_to_json(c));
      return json{{"op", e->kind() == Expr::Kind::max_node ? "max" : "min"},
                  {"children", cs}};
    }
    case Expr::Kind::sum_node: {
      json cs = json::array();
      for (const auto& c : e->children()) cs.push_back(expr_to_json(c));
      return json{{"op", "sum"}, {"weights", e->weights()}, {"children", cs}};
    }
  }
  throw std::logic_error("expr_to_json: bad kind");
}

ExprPtr expr_from_json(const nlohmann::json& j, std::size_t input_dim) {
  if (j.contains("p")) {
    Vec p = j.at("p").get<Vec>();
    require_same_dim(p.size(), input_dim, "expr_from_json leaf");
    return Expr::leaf(std::move(p), j.at("r").get<double>());
  }
  const std::string op = j.at("op").get<std::string>();
  std::vector<ExprPtr> cs;
  for (const auto& cj : j.at("children")) {
    cs.push_back(expr_from_json(cj, input_dim));
  }
  if (op == "max") return Expr::max_of(std::move(cs));
  if (op == "min") return Expr::min_of(std::move(cs));
  if (op == "sum") {
    return Expr::weighted_sum(j.at("weights").get<std::vector<double>>(),
                              std::move(cs));
  }
  throw std::invalid_argument("expr_from_json: unknown op '" + op + "'");
}

nlohmann::json op_to_json(const MinMaxAffineOp& op) {
  nlohmann::json coords = nlohmann::json::array();
  for (const auto& c : op.coords) coords.push_back(expr_to_json(c));
  return nlohmann::json{{"dim", op.input_dim}, {"coords", coords}};
}

MinMaxAffineOp op_from_json(const nlohmann::json& j) {
  const std::size_t dim = j.at("dim").get<std::size_t>();
  std::vector<ExprPtr> coords;
  for (const auto& cj : j.at("coords")) {
    coords.push_back(expr_from_json(cj, dim));
  }
  return make_op(dim, std::move(coords));
}

}  // namespace conefix
