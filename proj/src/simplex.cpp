#include "conefix/simplex.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace conefix {

namespace {

constexpr double kEps = 1e-9;

struct Tableau {
  std::size_t m = 0;      // rows
  std::size_t ncols = 0;  // structural + slack + artificial columns
  std::vector<Vec> a;     // m x ncols
  Vec b;                  // m, kept >= 0
  std::vector<int> basis; // basic column per row

  void pivot(std::size_t pr, std::size_t pc) {
    const double piv = a[pr][pc];
    for (double& v : a[pr]) v /= piv;
    b[pr] /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == pr || std::abs(a[i][pc]) < kEps * 1e-3) continue;
      const double f = a[i][pc];
      for (std::size_t j = 0; j < ncols; ++j) a[i][j] -= f * a[pr][j];
      a[i][pc] = 0.0;
      b[i] -= f * b[pr];
      if (b[i] < 0.0 && b[i] > -1e-12) b[i] = 0.0;
    }
    basis[pr] = static_cast<int>(pc);
  }
};

// Maximizes cost over the tableau with Bland's rule; `banned` columns never
// enter. Returns false on unboundedness.
bool run_simplex(Tableau& t, Vec& red, double& z,
                 const std::vector<bool>& banned) {
  for (int iter = 0; iter < 100000; ++iter) {
    std::size_t pc = t.ncols;
    for (std::size_t j = 0; j < t.ncols; ++j) {
      if (!banned[j] && red[j] > kEps) {
        pc = j;
        break;
      }
    }
    if (pc == t.ncols) return true;  // optimal
    std::size_t pr = t.m;
    double best = 0.0;
    for (std::size_t i = 0; i < t.m; ++i) {
      if (t.a[i][pc] > kEps) {
        const double ratio = t.b[i] / t.a[i][pc];
        if (pr == t.m || ratio < best - 1e-12 ||
            (ratio < best + 1e-12 && t.basis[i] < t.basis[pr])) {
          pr = i;
          best = ratio;
        }
      }
    }
    if (pr == t.m) return false;  // unbounded
    t.pivot(pr, pc);
    const double f = red[pc];
    for (std::size_t j = 0; j < t.ncols; ++j) red[j] -= f * t.a[pr][j];
    red[pc] = 0.0;
    z += f * t.b[pr];
  }
  throw std::runtime_error("simplex: iteration limit reached");
}

// Canonical reduced-cost row and objective value for cost vector c.
void canonicalize(const Tableau& t, const Vec& c, Vec& red, double& z) {
  red = c;
  z = 0.0;
  for (std::size_t i = 0; i < t.m; ++i) {
    const double cb = c[static_cast<std::size_t>(t.basis[i])];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j < t.ncols; ++j) red[j] -= cb * t.a[i][j];
    z += cb * t.b[i];
  }
}

}  // namespace

LpResult lp_maximize(const Vec& c, const std::vector<Vec>& rows,
                     const Vec& rhs) {
  const std::size_t n = c.size();
  const std::size_t m = rows.size();
  if (rhs.size() != m) throw std::invalid_argument("lp_maximize: rhs size");
  for (const Vec& r : rows) {
    if (r.size() != n) throw std::invalid_argument("lp_maximize: row size");
  }

  // Columns: x+ (n), x- (n), slack (m), artificial (<= m, added as needed).
  Tableau t;
  t.m = m;
  std::size_t nart = 0;
  std::vector<std::size_t> art_col(m, 0);
  std::vector<bool> needs_art(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    if (rhs[i] < 0.0) needs_art[i] = true;
    if (needs_art[i]) art_col[i] = nart++;
  }
  t.ncols = 2 * n + m + nart;
  t.a.assign(m, Vec(t.ncols, 0.0));
  t.b.assign(m, 0.0);
  t.basis.assign(m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    const double sgn = rhs[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      t.a[i][j] = sgn * rows[i][j];
      t.a[i][n + j] = -sgn * rows[i][j];
    }
    t.a[i][2 * n + i] = sgn;  // slack
    t.b[i] = sgn * rhs[i];
    if (needs_art[i]) {
      t.a[i][2 * n + m + art_col[i]] = 1.0;
      t.basis[i] = static_cast<int>(2 * n + m + art_col[i]);
    } else {
      t.basis[i] = static_cast<int>(2 * n + i);
    }
  }

  std::vector<bool> banned(t.ncols, false);

  if (nart > 0) {
    Vec phase1_cost(t.ncols, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (needs_art[i]) phase1_cost[2 * n + m + art_col[i]] = -1.0;
    }
    Vec red;
    double z = 0.0;
    canonicalize(t, phase1_cost, red, z);
    if (!run_simplex(t, red, z, banned)) {
      throw std::logic_error("simplex: phase 1 unbounded");
    }
    if (z < -1e-7) return {LpStatus::infeasible, 0.0, {}};
    // Pivot remaining artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (static_cast<std::size_t>(t.basis[i]) < 2 * n + m) continue;
      for (std::size_t j = 0; j < 2 * n + m; ++j) {
        if (std::abs(t.a[i][j]) > kEps) {
          t.pivot(i, j);
          break;
        }
      }
    }
    for (std::size_t j = 2 * n + m; j < t.ncols; ++j) banned[j] = true;
  }

  Vec cost(t.ncols, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    cost[j] = c[j];
    cost[n + j] = -c[j];
  }
  for (std::size_t i = 0; i < m; ++i) {
    // A redundant row may keep its artificial basic (at zero); freeze it by
    // treating the row's cost contribution as zero.
    if (static_cast<std::size_t>(t.basis[i]) >= 2 * n + m) t.b[i] = 0.0;
  }
  Vec red;
  double z = 0.0;
  canonicalize(t, cost, red, z);
  if (!run_simplex(t, red, z, banned)) {
    return {LpStatus::unbounded, 0.0, {}};
  }

  LpResult res;
  res.status = LpStatus::optimal;
  res.objective = z;
  res.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t bj = static_cast<std::size_t>(t.basis[i]);
    if (bj < n) res.x[bj] += t.b[i];
    else if (bj < 2 * n) res.x[bj - n] -= t.b[i];
  }
  return res;
}

}  // namespace conefix
