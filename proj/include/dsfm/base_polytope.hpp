#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dsfm/submodular.hpp"

namespace dsfm {

// Point of a base polytope B(f_i), indexed by support position.
using BasePoint = Eigen::VectorXd;

// Edmonds' greedy vertex for linear objective w: order the support by
// decreasing w (ties by element id ascending) and take marginal gains along
// the chain. Maximizes <w, x> over B(f_i).
BasePoint greedy_vertex(const SubmodularPotential& pot, const Eigen::VectorXd& w);

// Greedy vertex for an explicit position ordering.
BasePoint greedy_vertex_for_order(const SubmodularPotential& pot,
                                  const std::vector<int>& order);

// Exhaustive membership test: x(S) <= f(S) + tau for every S and
// |x(C) - f(C)| <= tau. Capability-limited to arity <= 20.
bool check_base_membership(const SubmodularPotential& pot, const BasePoint& x,
                           double tau = 1e-8);

// max_S |f(S)| by enumeration; every greedy vertex coordinate lies within
// [-2*max, 2*max]. Capability-limited to arity <= 20.
double max_abs_value(const SubmodularPotential& pot);

// Product-space point y = (y_1, ..., y_r) with a cached aggregate
// (Ay)(v) = sum_i y_i(v). Blocks are dense over their support.
class BlockVector {
 public:
  explicit BlockVector(const DecomposableInstance& inst);

  // Greedy vertex of every block, identity ordering (support order).
  static BlockVector greedy_init(const DecomposableInstance& inst);

  const DecomposableInstance& instance() const { return *inst_; }
  int blocks() const { return static_cast<int>(blocks_.size()); }
  const BasePoint& block(int i) const { return blocks_[i]; }

  void set_block(int i, const BasePoint& y);
  // x_i(u) += eps, x_i(v) -= eps (positions within block i's support).
  void apply_swap(int i, int u_pos, int v_pos, double eps);

  const Eigen::VectorXd& aggregate() const { return aggregate_; }
  void rebuild_aggregate();

  double squared_norm() const;                      // sum_i ||y_i||^2
  double distance_to(const BlockVector& other) const;  // product-space l2

 private:
  const DecomposableInstance* inst_;
  std::vector<BasePoint> blocks_;
  Eigen::VectorXd aggregate_;
};

}  // namespace dsfm
