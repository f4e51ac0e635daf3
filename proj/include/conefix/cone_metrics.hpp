#pragma once

// Metrics and seminorms on the open positive orthant of R^n and on the
// sup-norm space R^n with unit e = (1,...,1): scale bounds M(y/x), m(y/x),
// Hilbert projective metric, Thompson metric, the local norm ||.||_u, the
// oscillation seminorm omega_u, and the coordinatewise log/exp conjugation.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace conefix {

/// A point of R^n. Entries are validated to be finite at construction;
/// the `positive` factory additionally requires every entry > 0 (no epsilon
/// floor: the metrics blow up at the boundary, callers pre-clamp if needed).
class ConeVector {
 public:
  static ConeVector of(std::vector<double> entries);
  static ConeVector positive(std::vector<double> entries);

  std::size_t dim() const { return entries_.size(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<double>& entries() const { return entries_; }
  bool positivity_required() const { return positive_; }

  friend bool operator==(const ConeVector&, const ConeVector&) = default;

 private:
  ConeVector(std::vector<double> entries, bool positive);

  std::vector<double> entries_;
  bool positive_ = false;
};

// Throwing validators shared across modules.
void require_finite(std::span<const double> v, const std::string& what);
void require_positive(std::span<const double> v, const std::string& what);
void require_same_dim(std::size_t a, std::size_t b, const std::string& what);

/// M(y/x) = max_i y_i / x_i, the least b with y <= b x. x must be strictly
/// positive; y may be any real vector.
double scale_upper(const ConeVector& y, const ConeVector& x);

/// m(y/x) = min_i y_i / x_i, the greatest a with a x <= y.
double scale_lower(const ConeVector& y, const ConeVector& x);

/// Hilbert projective metric d(x,y) = log M(y/x) - log m(y/x); zero exactly
/// on rays. Both arguments strictly positive.
double hilbert_metric(const ConeVector& x, const ConeVector& y);

/// Thompson metric tbar(x,y) = max(log M(y/x), -log m(y/x))
/// = max_i |log(y_i/x_i)|. Both arguments strictly positive.
double thompson_metric(const ConeVector& x, const ConeVector& y);

/// ||x||_u = inf{a > 0 : -a u <= x <= a u} = max_i |x_i| / u_i.
double local_norm(const ConeVector& x, const ConeVector& u);

/// omega_u(x) = M(x/u) - m(x/u); kernel is exactly R u, and
/// omega_u(x + t u) = omega_u(x) for all real t.
double oscillation(const ConeVector& x, const ConeVector& u);

/// Coordinatewise log; requires x strictly positive. Isometry from the
/// Thompson metric to the sup-norm distance.
ConeVector to_additive(const ConeVector& x);

/// Coordinatewise exp; inverse of to_additive.
ConeVector to_multiplicative(const ConeVector& x);

}  // namespace conefix
