#pragma once

// Min/max-affine expression trees: operators R^n -> R^m whose coordinates
// are finite max / min / nonnegative-weighted-sum combinations of affine
// terms x |-> p.x + r. The class is closed under negation, syntactic
// composition and semidifferentiation, which is what the spectral and game
// modules rely on.
//
// Trees are immutable and shared; extensional equality is checked by
// evaluation on sample sets, never structurally.

#include <cstddef>
#include <memory>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "conefix/vec.hpp"

namespace conefix {

/// x |-> weights . x + offset.
struct AffineTerm {
  Vec weights;
  double offset = 0.0;
};

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

class Expr {
 public:
  enum class Kind { leaf, max_node, min_node, sum_node };

  // Factories validate: finite data, nonempty children, consistent input
  // dimension, sum weights >= 0.
  static ExprPtr leaf(Vec weights, double offset);
  static ExprPtr max_of(std::vector<ExprPtr> children);
  static ExprPtr min_of(std::vector<ExprPtr> children);
  static ExprPtr weighted_sum(std::vector<double> weights,
                              std::vector<ExprPtr> children);

  Kind kind() const { return kind_; }
  const AffineTerm& term() const { return term_; }
  const std::vector<ExprPtr>& children() const { return children_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t input_dim() const { return input_dim_; }
  /// True when every leaf in the subtree has zero offset.
  bool linear_leaves() const { return linear_leaves_; }

  double evaluate(const Vec& x) const;

  /// Tree computing the pointwise negation; max and min swap, leaves and
  /// sum offsets flip sign. Sum weights stay nonnegative.
  static ExprPtr negate(const ExprPtr& e);

  /// Substitute the coordinates of `inner` for the input variables:
  /// result(x) = e(inner(x)).
  static ExprPtr substitute(const ExprPtr& e,
                            const std::vector<ExprPtr>& inner);

 private:
  Expr() = default;

  Kind kind_ = Kind::leaf;
  AffineTerm term_;
  std::vector<ExprPtr> children_;
  std::vector<double> weights_;  // sum nodes only; all >= 0
  std::size_t input_dim_ = 0;
  bool linear_leaves_ = true;
};

/// An operator R^{input_dim} -> R^{coords.size()} given by one expression
/// tree per output coordinate.
struct MinMaxAffineOp {
  std::size_t input_dim = 0;
  std::vector<ExprPtr> coords;

  std::size_t output_dim() const { return coords.size(); }
  Vec evaluate(const Vec& x) const;
  /// Structural homogeneity: every leaf offset is zero.
  bool linear_leaves() const;
};

MinMaxAffineOp make_op(std::size_t input_dim, std::vector<ExprPtr> coords);

MinMaxAffineOp identity_op(std::size_t n);

/// Syntactic composition: (g o f)(x) = g(f(x)). Requires
/// g.input_dim == f.output_dim.
MinMaxAffineOp compose(const MinMaxAffineOp& g, const MinMaxAffineOp& f);

/// Syntactic k-th self-composition, k >= 1.
MinMaxAffineOp op_power(const MinMaxAffineOp& h, int k);

/// Runtime homogeneity spot check: h(2x) vs 2 h(x) on a few fixed samples,
/// relative tolerance 1e-9. Throws std::invalid_argument on failure.
void require_homogeneous(const MinMaxAffineOp& h);

// JSON schema:
//   leaf      {"p": [...], "r": number}
//   max/min   {"op": "max"|"min", "children": [...]}
//   sum       {"op": "sum", "weights": [...], "children": [...]}
//   operator  {"dim": n, "coords": [tree, ...]}
nlohmann::json expr_to_json(const ExprPtr& e);
ExprPtr expr_from_json(const nlohmann::json& j, std::size_t input_dim);
nlohmann::json op_to_json(const MinMaxAffineOp& op);
MinMaxAffineOp op_from_json(const nlohmann::json& j);

}  // namespace conefix
