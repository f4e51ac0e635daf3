#pragma once

// Small dense-vector helpers shared by the operator, spectral and game
// modules. Everything is on plain std::vector<double>; validated domain
// points live in ConeVector (cone_metrics.hpp).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace conefix {

using Vec = std::vector<double>;

inline Vec add(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec scale(double c, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

inline Vec axpy(const Vec& a, double t, const Vec& x) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + t * x[i];
  return r;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sup_norm(const Vec& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

/// Oscillation seminorm with respect to the unit e: max_i a_i - min_i a_i.
inline double omega_e(const Vec& a) {
  auto [lo, hi] = std::minmax_element(a.begin(), a.end());
  return *hi - *lo;
}

inline Vec add_const(const Vec& a, double t) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + t;
  return r;
}

inline Vec unit_vec(std::size_t n, double v = 1.0) { return Vec(n, v); }

inline Vec basis_vec(std::size_t n, std::size_t i, double v = 1.0) {
  Vec r(n, 0.0);
  r[i] = v;
  return r;
}

}  // namespace conefix
