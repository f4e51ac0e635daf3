#pragma once

// Dense two-phase tableau simplex for the small LPs of the exact operator
// norm computation: maximize c.x subject to G x <= h, x free. Problem sizes
// are tiny (n <= 6 variables, a few dozen rows), so a textbook tableau with
// Bland's rule is adequate.

#include <vector>

#include "conefix/vec.hpp"

namespace conefix {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  Vec x;  // optimizer when status == optimal
};

/// Maximize c.x subject to rows[i].x <= rhs[i] for all i, x in R^n free.
LpResult lp_maximize(const Vec& c, const std::vector<Vec>& rows,
                     const Vec& rhs);

}  // namespace conefix
