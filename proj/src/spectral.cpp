#include "conefix/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

#include "conefix/cone_metrics.hpp"
#include "conefix/simplex.hpp"

namespace conefix {

NormSpec NormSpec::sup() { return {NormKind::sup_norm, {}}; }

NormSpec NormSpec::local(Vec u) {
  require_positive(u, "NormSpec::local");
  return {NormKind::local_norm, std::move(u)};
}

NormSpec NormSpec::osc(Vec u) {
  require_positive(u, "NormSpec::osc");
  return {NormKind::oscillation, std::move(u)};
}

NormSpec NormSpec::osc_e(std::size_t n) { return osc(Vec(n, 1.0)); }

double norm_of(const NormSpec& spec, const Vec& x) {
  switch (spec.kind) {
    case NormKind::sup_norm:
      return sup_norm(x);
    case NormKind::local_norm: {
      require_same_dim(x.size(), spec.u.size(), "norm_of");
      double a = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        a = std::max(a, std::abs(x[i]) / spec.u[i]);
      }
      return a;
    }
    case NormKind::oscillation: {
      require_same_dim(x.size(), spec.u.size(), "norm_of");
      double hi = -std::numeric_limits<double>::infinity();
      double lo = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < x.size(); ++i) {
        hi = std::max(hi, x[i] / spec.u[i]);
        lo = std::min(lo, x[i] / spec.u[i]);
      }
      return hi - lo;
    }
  }
  throw std::logic_error("norm_of: bad kind");
}

namespace {

// ---------------------------------------------------------------------------
// Sign-pattern region enumeration.
//
// Fixing one child per max/min node partitions R^n into polyhedral regions on
// which the tree is a single linear form; the constraints say the chosen
// child dominates its siblings. Patterns are indexed in mixed radix over the
// DFS order of the max/min nodes.
// ---------------------------------------------------------------------------

struct LinForm {
  Vec p;
  double r = 0.0;
};

void collect_radices(const ExprPtr& e, std::vector<std::size_t>& radices) {
  if (e->kind() == Expr::Kind::max_node || e->kind() == Expr::Kind::min_node) {
    radices.push_back(e->children().size());
  }
  for (const auto& c : e->children()) collect_radices(c, radices);
}

struct PatternWalk {
  const std::vector<std::size_t>& choice;
  std::size_t cursor = 0;
  // Region rows, meaning row.p . x + row.r >= 0.
  std::vector<LinForm> constraints;
};

LinForm lin_of(const ExprPtr& e, PatternWalk& w) {
  switch (e->kind()) {
    case Expr::Kind::leaf:
      return {e->term().weights, e->term().offset};
    case Expr::Kind::sum_node: {
      LinForm acc{Vec(e->input_dim(), 0.0), 0.0};
      for (std::size_t i = 0; i < e->children().size(); ++i) {
        const LinForm c = lin_of(e->children()[i], w);
        for (std::size_t j = 0; j < acc.p.size(); ++j) {
          acc.p[j] += e->weights()[i] * c.p[j];
        }
        acc.r += e->weights()[i] * c.r;
      }
      return acc;
    }
    case Expr::Kind::max_node:
    case Expr::Kind::min_node: {
      const bool is_max = e->kind() == Expr::Kind::max_node;
      const std::size_t pick = w.choice[w.cursor++];
      std::vector<LinForm> kids;
      kids.reserve(e->children().size());
      for (const auto& c : e->children()) kids.push_back(lin_of(c, w));
      for (std::size_t i = 0; i < kids.size(); ++i) {
        if (i == pick) continue;
        LinForm row{Vec(e->input_dim(), 0.0), 0.0};
        for (std::size_t j = 0; j < row.p.size(); ++j) {
          row.p[j] = is_max ? kids[pick].p[j] - kids[i].p[j]
                            : kids[i].p[j] - kids[pick].p[j];
        }
        row.r = is_max ? kids[pick].r - kids[i].r : kids[i].r - kids[pick].r;
        w.constraints.push_back(std::move(row));
      }
      return kids[pick];
    }
  }
  throw std::logic_error("lin_of: bad kind");
}

struct Objective {
  double coef;
  ExprPtr tree;
};

struct ExactBest {
  double value = 0.0;  // sup over the box is >= 0 when 0 is feasible
  Vec witness;
};

// Exact maximum of sum_k coef_k * tree_k(x) over the box lb <= x <= ub,
// or nullopt when the pattern count exceeds the budget.
std::optional<ExactBest> exact_box_sup(const std::vector<Objective>& objs,
                                       const Vec& lb, const Vec& ub,
                                       std::size_t budget) {
  const std::size_t n = lb.size();
  std::vector<std::size_t> radices;
  for (const auto& o : objs) collect_radices(o.tree, radices);
  std::size_t total = 1;
  for (std::size_t r : radices) {
    if (total > budget / r) return std::nullopt;
    total *= r;
  }

  ExactBest best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> choice(radices.size(), 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t k = 0; k < radices.size(); ++k) {
      choice[k] = rem % radices[k];
      rem /= radices[k];
    }
    PatternWalk w{choice, 0, {}};
    LinForm obj{Vec(n, 0.0), 0.0};
    for (const auto& o : objs) {
      const LinForm f = lin_of(o.tree, w);
      for (std::size_t j = 0; j < n; ++j) obj.p[j] += o.coef * f.p[j];
      obj.r += o.coef * f.r;
    }
    std::vector<Vec> rows;
    Vec rhs;
    rows.reserve(w.constraints.size() + 2 * n);
    for (const LinForm& cst : w.constraints) {
      Vec row(n);
      for (std::size_t j = 0; j < n; ++j) row[j] = -cst.p[j];
      rows.push_back(std::move(row));
      rhs.push_back(cst.r);
    }
    for (std::size_t j = 0; j < n; ++j) {
      rows.push_back(basis_vec(n, j, 1.0));
      rhs.push_back(ub[j]);
      rows.push_back(basis_vec(n, j, -1.0));
      rhs.push_back(-lb[j]);
    }
    const LpResult lp = lp_maximize(obj.p, rows, rhs);
    if (lp.status != LpStatus::optimal) continue;  // empty region
    const double val = lp.objective + obj.r;
    if (val > best.value) {
      best.value = val;
      best.witness = lp.x;
    }
  }
  if (!std::isfinite(best.value)) {
    // All regions empty cannot happen (the regions cover R^n); keep a guard.
    throw std::logic_error("exact_box_sup: no feasible region");
  }
  return best;
}

struct SampledBest {
  double value = 0.0;
  Vec witness;
};

SampledBest sampled_sup(const MinMaxAffineOp& h, const NormSpec& spec,
                        const SamplePlan& plan) {
  const std::size_t n = h.input_dim;
  SampledBest best;
  auto consider = [&](const Vec& x) {
    const double nx = norm_of(spec, x);
    if (nx < 1e-9) return;
    const double ratio = norm_of(spec, h.evaluate(x)) / nx;
    if (ratio > best.value) {
      best.value = ratio;
      best.witness = x;
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    consider(basis_vec(n, i, 1.0));
    consider(basis_vec(n, i, -1.0));
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      Vec x(n, 0.0);
      x[i] = 1.0;
      x[j] = -1.0;
      consider(x);
    }
  }
  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int k = 0; k < plan.n_random; ++k) {
    Vec x(n);
    for (double& v : x) v = dist(rng);
    consider(x);
  }
  return best;
}

// Additive homogeneity along u: h(x + u) = h(x) + u, spot-checked. The
// oscillation unit ball is unbounded along u; exactness relies on reducing
// it to the slice 0 <= x <= u, which needs this identity.
bool additively_homogeneous_along(const MinMaxAffineOp& h, const Vec& u) {
  const std::size_t n = h.input_dim;
  for (std::uint64_t s : {1ull, 2ull}) {
    std::mt19937_64 rng(s);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vec x(n);
    for (double& v : x) v = dist(rng);
    const Vec a = h.evaluate(add(x, u));
    const Vec b = add(h.evaluate(x), u);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(a[i] - b[i]) > 1e-9 * (1.0 + std::abs(b[i]))) return false;
    }
  }
  return true;
}

std::optional<ExactBest> exact_sup(const MinMaxAffineOp& h,
                                   const NormSpec& spec,
                                   const SamplePlan& plan) {
  const std::size_t n = h.input_dim;
  if (n > plan.n_exact) return std::nullopt;

  Vec lb(n), ub(n);
  std::optional<ExactBest> best;
  auto merge = [&](const std::optional<ExactBest>& cand) -> bool {
    if (!cand) return false;  // budget blown: whole result degrades
    if (!best || cand->value > best->value) best = cand;
    return true;
  };

  switch (spec.kind) {
    case NormKind::sup_norm:
    case NormKind::local_norm: {
      const Vec u = spec.kind == NormKind::sup_norm ? Vec(n, 1.0) : spec.u;
      for (std::size_t j = 0; j < n; ++j) {
        lb[j] = -u[j];
        ub[j] = u[j];
      }
      for (std::size_t i = 0; i < h.output_dim(); ++i) {
        const double scale = spec.kind == NormKind::sup_norm ? 1.0 : 1.0 / u[i];
        for (double sgn : {1.0, -1.0}) {
          if (!merge(exact_box_sup({{sgn * scale, h.coords[i]}}, lb, ub,
                                   plan.pattern_budget))) {
            return std::nullopt;
          }
        }
      }
      return best;
    }
    case NormKind::oscillation: {
      if (!additively_homogeneous_along(h, spec.u)) return std::nullopt;
      for (std::size_t j = 0; j < n; ++j) {
        lb[j] = 0.0;
        ub[j] = spec.u[j];
      }
      if (h.output_dim() < 2) return ExactBest{0.0, Vec(n, 0.0)};
      for (std::size_t i = 0; i < h.output_dim(); ++i) {
        for (std::size_t j = 0; j < h.output_dim(); ++j) {
          if (i == j) continue;
          if (!merge(exact_box_sup({{1.0 / spec.u[i], h.coords[i]},
                                    {-1.0 / spec.u[j], h.coords[j]}},
                                   lb, ub, plan.pattern_budget))) {
            return std::nullopt;
          }
        }
      }
      return best;
    }
  }
  throw std::logic_error("exact_sup: bad kind");
}

void check_preconditions(const MinMaxAffineOp& h, const NormSpec& spec) {
  require_same_dim(h.input_dim, h.output_dim(), "op_seminorm");
  require_homogeneous(h);
  if (spec.kind != NormKind::sup_norm) {
    require_same_dim(spec.u.size(), h.input_dim, "op_seminorm(u)");
  }
  if (spec.kind == NormKind::oscillation) {
    const Vec hu = h.evaluate(spec.u);
    for (std::size_t i = 0; i < hu.size(); ++i) {
      if (std::abs(hu[i] - spec.u[i]) > 1e-9 * (1.0 + std::abs(spec.u[i]))) {
        throw std::invalid_argument(
            "op_seminorm: oscillation kind requires h(u) = u");
      }
    }
  }
}

}  // namespace

OpNormResult op_seminorm(const MinMaxAffineOp& h, const NormSpec& spec,
                         const SamplePlan& plan) {
  check_preconditions(h, spec);
  if (const auto ex = exact_sup(h, spec, plan)) {
    return {std::max(ex->value, 0.0), true, ex->witness};
  }
  const SampledBest s = sampled_sup(h, spec, plan);
  return {s.value, false, s.witness};
}

SpectralEstimate bonsall_estimate(const MinMaxAffineOp& h, int depth,
                                  const NormSpec& spec,
                                  const SamplePlan& plan) {
  if (depth < 1) throw std::invalid_argument("bonsall_estimate: depth >= 1");
  check_preconditions(h, spec);

  SpectralEstimate est;
  est.norm = spec;
  est.depth = depth;

  double exact_upper = std::numeric_limits<double>::infinity();
  double sampled_upper = std::numeric_limits<double>::infinity();
  bool any_exact = false;
  MinMaxAffineOp hk = h;
  for (int k = 1;; ++k) {
    if (const auto ex = exact_sup(hk, spec, plan)) {
      exact_upper = std::min(
          exact_upper, std::pow(std::max(ex->value, 0.0), 1.0 / k));
      any_exact = true;
    }
    const SampledBest s = sampled_sup(hk, spec, plan);
    sampled_upper = std::min(sampled_upper, std::pow(s.value, 1.0 / k));
    if (k == depth) {
      est.lower = std::pow(s.value, 1.0 / k);
      est.witness = s.witness;
      break;
    }
    hk = compose(h, hk);
  }
  est.exact = any_exact;
  est.upper = any_exact ? exact_upper : std::max(sampled_upper, est.lower);
  // The depth-K power ratio can exceed min_k ||h^k||^{1/k} (it only bounds
  // ||h^K||^{1/K}); keep the bracket ordered.
  est.lower = std::min(est.lower, est.upper);
  return est;
}

ContractionCert certify_contraction(const MinMaxAffineOp& h,
                                    const NormSpec& spec, double target,
                                    int depth, const SamplePlan& plan) {
  if (!(target > 0.0) || !(target < 1.0)) {
    throw std::invalid_argument("certify_contraction: target must be in (0,1)");
  }
  check_preconditions(h, spec);

  ContractionCert cert;
  bool all_refuted = true;
  Vec refuting_witness;
  MinMaxAffineOp hk = h;
  for (int k = 1; k <= depth; ++k) {
    if (const auto ex = exact_sup(hk, spec, plan)) {
      const double root = std::pow(std::max(ex->value, 0.0), 1.0 / k);
      if (root <= target) {
        cert.status = Certificate::holds;
        cert.factor = root;
        cert.depth_used = k;
        return cert;
      }
    }
    const SampledBest s = sampled_sup(hk, spec, plan);
    if (s.value > std::pow(target, k)) {
      refuting_witness = s.witness;
    } else {
      all_refuted = false;
    }
    if (k < depth) hk = compose(h, hk);
  }
  if (all_refuted) {
    cert.status = Certificate::fails;
    cert.depth_used = depth;
    cert.witness = std::move(refuting_witness);
  }
  return cert;
}

const char* to_string(Certificate c) {
  switch (c) {
    case Certificate::holds: return "holds";
    case Certificate::fails: return "fails";
    case Certificate::inconclusive: return "inconclusive";
  }
  return "unknown";
}

const char* to_string(NormKind k) {
  switch (k) {
    case NormKind::sup_norm: return "sup_norm";
    case NormKind::local_norm: return "local_norm";
    case NormKind::oscillation: return "oscillation";
  }
  return "unknown";
}

nlohmann::json estimate_to_json(const SpectralEstimate& e) {
  nlohmann::json j{{"upper", e.upper},
                   {"lower", e.lower},
                   {"norm_kind", to_string(e.norm.kind)},
                   {"depth", e.depth},
                   {"exact", e.exact}};
  j["witness"] = e.witness.empty() ? nlohmann::json() : nlohmann::json(e.witness);
  return j;
}

}  // namespace conefix
