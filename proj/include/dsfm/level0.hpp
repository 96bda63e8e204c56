#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "dsfm/base_polytope.hpp"
#include "dsfm/submodular.hpp"

namespace dsfm {

struct WolfeOptions {
  double eps = 1e-10;   // duality-gap target for ||y+w||^2
  int max_major = 0;    // 0 = unbounded
  int max_minor = 0;    // 0 = unbounded (total across the run)
};

struct WolfeStats {
  int major_cycles = 0;
  int minor_cycles = 0;
  int vertices_dropped = 0;
  int degenerate_restarts = 0;
  bool converged = false;
  bool monotone = true;  // ||y+w|| never increased across major cycles
  double gap = 0;
  double final_norm2 = 0;
};

// Min-norm point: argmin_{y in B(f_i)} ||y + w||^2 by the major/minor cycle
// scheme over greedy vertices, affine minimization via a bordered KKT solve.
// warm, when given, must lie in B(f_i) and seeds the active set. Stops at
// duality gap <= eps/2, or once major cycles stop shrinking the norm by
// more than machine precision (stats->converged false: the target gap sits
// below the numeric floor and the point is stationary to working accuracy).
BasePoint fujishige_wolfe(const SubmodularPotential& pot,
                          const Eigen::VectorXd& w, const WolfeOptions& opts = {},
                          const BasePoint* warm = nullptr,
                          WolfeStats* stats = nullptr);

// Minimization over subsets of {0..k-1} given by an explicit value function.
using MaskValueFn = std::function<double(Mask)>;
// Returns (minimizer, min value); must be exact for reduction certificates.
using MaskSfmFn = std::function<std::pair<Mask, double>(const MaskValueFn&, int)>;

// Exhaustive minimizer, ties broken toward the lexicographically smallest
// element list. Capability-limited to k <= 24.
std::pair<Mask, double> brute_force_mask_min(const MaskValueFn& fn, int k);

// argmin_S f_i(S) + w(S) by enumeration; same cap and tie rule.
std::pair<Mask, double> brute_force_sfm(const SubmodularPotential& pot,
                                        const Eigen::VectorXd& w);

// Exact quadratic minimization from an exact SFM-with-weights oracle:
// divide and conquer on the level sets of the min-norm point of B(f_i + w),
// pivoting at the average slope of the current interval. At most 2|C_i|
// inner calls. Inner answers are certified (a non-minimizer raises
// oracle_exactness).
BasePoint quad_oracle_from_sfm(const SubmodularPotential& pot,
                               const Eigen::VectorXd& w,
                               const MaskSfmFn& sfm = MaskSfmFn());

using QuadOracleFn = std::function<BasePoint(const SubmodularPotential&,
                                             const Eigen::VectorXd&)>;

// Exact SFM from an exact quadratic oracle: threshold the strictly negative
// coordinates of the min-norm point of B(f_i + w). Returns the smallest
// minimizer (as ids) and its value. Default oracle: the kind's closed form
// when present, else divide and conquer over enumeration.
std::pair<std::vector<int>, double> sfm_from_quad_oracle(
    const SubmodularPotential& pot, const Eigen::VectorXd& w,
    const QuadOracleFn& quad = QuadOracleFn(), double threshold = 1e-9);

}  // namespace dsfm
