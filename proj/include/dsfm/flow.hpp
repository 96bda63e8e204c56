#pragma once

#include <functional>

#include "dsfm/base_polytope.hpp"
#include "dsfm/oracles.hpp"
#include "dsfm/report.hpp"

namespace dsfm {

struct FlowOptions {
  double deficit_tol = 1e-9;    // aggregate granularity for N / P
  double capacity_tol = 1e-10;  // arcs above this count as present
  std::int64_t max_augmentations = 1000000;
  bool check_labels = false;     // assert hop distances never decrease
  bool validate_blocks = false;  // exhaustive membership after augmenting
  bool strict = false;           // refuse non-certified oracle stacks
};

struct FlowStats {
  std::int64_t augmentations = 0;
  std::int64_t capacity_queries = 0;
  std::int64_t rounds = 0;  // BFS rounds / growth phases
  bool label_monotone = true;
  bool cleared = false;  // every deficit met the target
};

using PotSfmFn = std::function<std::pair<Mask, double>(
    const SubmodularPotential&, const Eigen::VectorXd&)>;

// Exchange capacity c(u, v) = min{f_i(S) - x_i(S) : u in S, v not in S}
// through a single SFM call: weights force u in and v out by a unit margin,
// the returned set is verified against both requirements. u_pos/v_pos are
// support positions.
double exchange_capacity(const SubmodularPotential& pot, const BasePoint& x,
                         int u_pos, int v_pos, const PotSfmFn& sfm = PotSfmFn());

// Intersection of all tau-tight sets containing u; exhaustive, arity <= 20.
// x must lie in B(f_i). Returns element ids (support order).
std::vector<int> minimal_tight_set(const SubmodularPotential& pot,
                                   const BasePoint& x, int u_pos,
                                   double tau = 1e-8);

struct PathArc {
  int pot;
  int u_pos, v_pos;  // x_i(u) += eps, x_i(v) -= eps
};

// Applies a swap sequence; every arc must hold eps of residual capacity.
void augment(BlockVector& x, const std::vector<PathArc>& path, double eps);

// Exact minimization via shortest augmenting paths on the auxiliary graph
// (x0 defaults to the greedy identity-order vertex of each block).
SolveReport solve_flow_ekd(const DecomposableInstance& inst,
                           const OracleSet& oracles, const FlowOptions& opts = {},
                           const BlockVector* x0 = nullptr,
                           FlowStats* stats = nullptr,
                           BlockVector* x_out = nullptr);

// Same contract; bidirectional incremental BFS trees with FIFO orphan
// adoption. Reports the same reachable-set minimizer.
SolveReport solve_flow_ibfs(const DecomposableInstance& inst,
                            const OracleSet& oracles,
                            const FlowOptions& opts = {},
                            const BlockVector* x0 = nullptr,
                            FlowStats* stats = nullptr,
                            BlockVector* x_out = nullptr);

// Moves y through augmentations until the aggregate matches target (a point
// of B(f)); shortest paths only, so every intermediate stays in the product
// of base polytopes. A persistent deficit with no augmenting path means the
// target is not in B(f) or an oracle lied; raises oracle_exactness.
BlockVector transport_to_target(const DecomposableInstance& inst,
                                const OracleSet& oracles, const BlockVector& y,
                                const Eigen::VectorXd& target,
                                const FlowOptions& opts = {},
                                FlowStats* stats = nullptr);

}  // namespace dsfm
