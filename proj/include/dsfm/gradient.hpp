#pragma once

#include <cstdint>

#include "dsfm/base_polytope.hpp"
#include "dsfm/oracles.hpp"
#include "dsfm/report.hpp"

namespace dsfm {

struct GradientOptions {
  std::int64_t iterations = 0;  // total coordinate steps (AP: rounds)
  std::uint64_t seed = 0;
  int epoch_length = 0;          // momentum restart period; 0 = ceil(r*n/2)
  bool freeze_momentum = false;  // degenerate schedule: plain coordinate steps
  bool parallel = true;          // concurrent block projections (AP only)
};

struct RoundResult {
  std::vector<int> minimizer;
  double value = 0;
  double gap = 0;  // f(S) - (Ay)^-(V), always >= 0 for y in the product
};

// Threshold rounding: evaluates f on every level set {v: (Ay)(v) <= t} of
// the aggregate (ties enter together, the empty set included) by running
// marginals, and keeps the best. The gap certifies suboptimality:
// f(S) - min f <= gap.
RoundResult round_and_certify(const DecomposableInstance& inst,
                              const BlockVector& y);

// Uniform random block, gradient step through the quadratic oracle:
// y_i <- O_i((Ay - y_i) on C_i). Objective (1/2)||Ay||^2 is non-increasing
// when the oracle is exact.
SolveReport solve_rcdm(const DecomposableInstance& inst, const OracleSet& oracles,
                       const GradientOptions& opts,
                       const BlockVector* y0 = nullptr,
                       BlockVector* y_out = nullptr);

// Accelerated variant: momentum interpolation over oracle outputs with the
// standard schedule, restarted from the best iterate each epoch. With
// freeze_momentum the epoch degenerates to plain coordinate steps on the
// same sample sequence.
SolveReport solve_acdm(const DecomposableInstance& inst, const OracleSet& oracles,
                       const GradientOptions& opts,
                       const BlockVector* y0 = nullptr,
                       BlockVector* y_out = nullptr);

// Alternating projections between the zero-aggregate subspace and the
// product of base polytopes; one iteration = one projection pair (r oracle
// calls, run concurrently when opts.parallel). The block-to-subspace
// distance is non-increasing.
SolveReport solve_ap(const DecomposableInstance& inst, const OracleSet& oracles,
                     const GradientOptions& opts,
                     const BlockVector* y0 = nullptr,
                     BlockVector* y_out = nullptr);

}  // namespace dsfm
