#pragma once

// Operator (semi)norms, Bonsall spectral radius estimates, and contraction
// certificates for continuous homogeneous piecewise-linear maps, in the
// sup-norm, a local norm ||.||_u, or the oscillation seminorm omega_u.
//
// Two regimes:
//   - exact: for n <= n_exact the unit ball of the source norm is a polytope
//     and the map is linear on finitely many sign-pattern regions; the sup of
//     the output norm is a finite max of LPs, solved exactly.
//   - heuristic: deterministic sampling (structured directions plus seeded
//     pseudorandom ones). Sampling only ever yields lower estimates, so the
//     heuristic regime never certifies a contraction.

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "conefix/minmax.hpp"
#include "conefix/vec.hpp"

namespace conefix {

enum class NormKind { sup_norm, local_norm, oscillation };

struct NormSpec {
  NormKind kind = NormKind::sup_norm;
  Vec u;  // reference vector for local_norm / oscillation; empty for sup

  static NormSpec sup();
  static NormSpec local(Vec u);
  static NormSpec osc(Vec u);
  static NormSpec osc_e(std::size_t n);  // oscillation with u = (1,...,1)
};

double norm_of(const NormSpec& spec, const Vec& x);

struct SamplePlan {
  std::uint64_t seed = 0x5EED;
  int n_random = 256;
  std::size_t n_exact = 6;          // exact enumeration cutoff on dimension
  std::size_t pattern_budget = 200000;  // max sign patterns per objective
};

struct OpNormResult {
  double value = 0.0;
  bool exact = false;  // true: value is the exact sup; false: lower estimate
  Vec witness;         // attaining (exact) or best sampled direction
};

/// sup_{||x|| = 1} ||h(x)|| for homogeneous h, both norms given by `spec`.
/// Exact when input_dim <= n_exact and the pattern budget suffices;
/// otherwise a sampled lower estimate. For the oscillation kind h must fix
/// the kernel direction (h(u) = u) and, for exactness, be additively
/// homogeneous along u (spot-checked; on failure degrades to heuristic).
OpNormResult op_seminorm(const MinMaxAffineOp& h, const NormSpec& spec,
                         const SamplePlan& plan = {});

struct SpectralEstimate {
  double upper = 0.0;  // min_k ||h^k||^{1/k}; valid bound only when exact
  double lower = 0.0;  // max sampled ||h^K(x)||^{1/K} / ||x||^{1/K}
  NormSpec norm;
  int depth = 1;
  bool exact = false;
  Vec witness;  // direction attaining the lower estimate
};

/// Bonsall spectral radius bracket from syntactic powers h^1..h^K.
SpectralEstimate bonsall_estimate(const MinMaxAffineOp& h, int depth,
                                  const NormSpec& spec,
                                  const SamplePlan& plan = {});

enum class Certificate { holds, fails, inconclusive };

struct ContractionCert {
  Certificate status = Certificate::inconclusive;
  double factor = 0.0;  // certified k-th root factor when status == holds
  int depth_used = 0;
  Vec witness;  // refuting direction when status == fails
};

/// holds  iff an exact ||h^k||^{1/k} <= target for some k <= depth;
/// fails  iff a sampled witness beats target^k at every k <= depth;
/// inconclusive otherwise (heuristic regime cannot certify).
ContractionCert certify_contraction(const MinMaxAffineOp& h,
                                    const NormSpec& spec, double target,
                                    int depth = 12,
                                    const SamplePlan& plan = {});

const char* to_string(Certificate c);
const char* to_string(NormKind k);

nlohmann::json estimate_to_json(const SpectralEstimate& e);

}  // namespace conefix
