#pragma once

#include <cstdint>
#include <vector>

#include "dsfm/base_polytope.hpp"
#include "dsfm/flow.hpp"
#include "dsfm/oracles.hpp"

namespace dsfm {

struct DiagnosticsOptions {
  // Whole-function duality-gap target for the minimum norm point; the
  // distance error is at most sqrt(2 * precision).
  double precision = 1e-12;
  std::int64_t max_iterations = 4000000;  // coordinate steps before giving up
  double tau = 1e-6;  // slack absorbed by accumulated augmentation error
};

// Minimum norm point of B(f), computed by warm-started coordinate descent
// until the aggregate's duality gap <x,x> - <x,greedy(-x)> falls below
// precision. For n <= 12 the result is cross-checked against a direct
// whole-function min-norm solve. Exceeding the iteration budget raises a
// convergence error.
Eigen::VectorXd compute_sstar(const DecomposableInstance& inst,
                              const OracleSet& oracles,
                              const DiagnosticsOptions& opts = {});

// Instance plus its high-precision minimum norm point. sum(sstar) = f(V)
// and no greedy vertex has smaller norm; both are checked at build time.
struct DiagnosticsContext {
  const DecomposableInstance* inst = nullptr;
  Eigen::VectorXd sstar;
  double tau = 1e-6;
  double precision_reached = 0;  // final duality gap of the aggregate
};

DiagnosticsContext make_diagnostics(const DecomposableInstance& inst,
                                    const OracleSet& oracles,
                                    const DiagnosticsOptions& opts = {});

struct TransportReport {
  BlockVector x;  // transported point, aggregate matches the target
  double discrepancy_l1 = 0;  // ||Ay - s*||_1 before the move
  double moved_l2 = 0, moved_linf = 0, moved_l1 = 0;
  double bound_l2 = 0, bound_linf = 0, bound_l1 = 0;
  bool within_bounds = true;
  std::int64_t augmentations = 0;
};

// Moves y across the product of base polytopes until its aggregate equals
// s*, by shortest augmenting paths. The move is small: each norm of x - y
// is bounded by a multiple of the starting aggregate discrepancy
// (l2: sqrt((n-1)/2), linf: 1/2, l1: n-1, each plus tau slack). The l2
// constant is tight: a chain of pairwise cuts overlapping in single
// elements forces a unique transport that meets it exactly.
TransportReport decompose_transport(const DiagnosticsContext& ctx,
                                    const OracleSet& oracles,
                                    const BlockVector& y);

struct KappaStats {
  std::vector<double> ratios;  // certified per-sample lower-bound estimates
  int product_samples = 0;     // drawn from the product of base polytopes
  int affine_samples = 0;      // drawn from the matched-aggregate subspace
  double max_ratio = 0;
  double bound = 0;  // n * sqrt(r) / 2 + 1
  int violations = 0;
};

// Conditioning probe: for sampled y, the ratio of the (constructed) distance
// to the solution set over the distance to the other constraint set. Each
// ratio uses a concrete transported feasible point, so it is a certified
// estimate and must respect the bound up to tau.
KappaStats estimate_kappa(const DiagnosticsContext& ctx,
                          const OracleSet& oracles, int samples,
                          std::uint64_t seed);

struct EllStats {
  int checked = 0;
  int violations = 0;
  double max_ratio = 0;    // lhs / rhs over all samples
  double modulus_bound = 0;  // 4 / n^2
};

// Restricted-strong-convexity probe: for sampled y in the product, with x
// the transported point matching s*, checks
//   ||y - x||^2 <= (n^2/4) ||A(y - x)||^2 + tau.
EllStats check_ell(const DiagnosticsContext& ctx, const OracleSet& oracles,
                   int samples, std::uint64_t seed);

}  // namespace dsfm
