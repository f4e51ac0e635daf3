#include "conefix/cone_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace conefix {

void require_finite(std::span<const double> v, const std::string& what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument(what + ": entries must be finite");
    }
  }
}

void require_positive(std::span<const double> v, const std::string& what) {
  for (double x : v) {
    if (!(x > 0.0)) {
      throw std::invalid_argument(what + ": entries must be strictly positive");
    }
  }
}

void require_same_dim(std::size_t a, std::size_t b, const std::string& what) {
  if (a != b) {
    throw std::invalid_argument(what + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) +
                                ")");
  }
}

ConeVector::ConeVector(std::vector<double> entries, bool positive)
    : entries_(std::move(entries)), positive_(positive) {}

ConeVector ConeVector::of(std::vector<double> entries) {
  if (entries.empty()) {
    throw std::invalid_argument("ConeVector: dimension must be >= 1");
  }
  require_finite(entries, "ConeVector");
  return ConeVector(std::move(entries), false);
}

ConeVector ConeVector::positive(std::vector<double> entries) {
  if (entries.empty()) {
    throw std::invalid_argument("ConeVector: dimension must be >= 1");
  }
  require_finite(entries, "ConeVector");
  require_positive(entries, "ConeVector");
  return ConeVector(std::move(entries), true);
}

double scale_upper(const ConeVector& y, const ConeVector& x) {
  require_same_dim(y.dim(), x.dim(), "scale_upper");
  require_positive(x.entries(), "scale_upper(x)");
  double b = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.dim(); ++i) {
    b = std::max(b, y[i] / x[i]);
  }
  return b;
}

double scale_lower(const ConeVector& y, const ConeVector& x) {
  require_same_dim(y.dim(), x.dim(), "scale_lower");
  require_positive(x.entries(), "scale_lower(x)");
  double a = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.dim(); ++i) {
    a = std::min(a, y[i] / x[i]);
  }
  return a;
}

double hilbert_metric(const ConeVector& x, const ConeVector& y) {
  require_positive(x.entries(), "hilbert_metric(x)");
  require_positive(y.entries(), "hilbert_metric(y)");
  return std::log(scale_upper(y, x)) - std::log(scale_lower(y, x));
}

double thompson_metric(const ConeVector& x, const ConeVector& y) {
  require_positive(x.entries(), "thompson_metric(x)");
  require_positive(y.entries(), "thompson_metric(y)");
  return std::max(std::log(scale_upper(y, x)), -std::log(scale_lower(y, x)));
}

double local_norm(const ConeVector& x, const ConeVector& u) {
  require_same_dim(x.dim(), u.dim(), "local_norm");
  require_positive(u.entries(), "local_norm(u)");
  double a = 0.0;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    a = std::max(a, std::abs(x[i]) / u[i]);
  }
  return a;
}

double oscillation(const ConeVector& x, const ConeVector& u) {
  require_same_dim(x.dim(), u.dim(), "oscillation");
  require_positive(u.entries(), "oscillation(u)");
  return scale_upper(x, u) - scale_lower(x, u);
}

ConeVector to_additive(const ConeVector& x) {
  require_positive(x.entries(), "to_additive");
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    out[i] = std::log(x[i]);
  }
  return ConeVector::of(std::move(out));
}

ConeVector to_multiplicative(const ConeVector& x) {
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    out[i] = std::exp(x[i]);
  }
  return ConeVector::of(std::move(out));
}

}  // namespace conefix
