#include "dsfm/base_polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dsfm {

BasePoint greedy_vertex_for_order(const SubmodularPotential& pot,
                                  const std::vector<int>& order) {
  const int k = pot.arity();
  BasePoint x(k);
  Mask m = 0;
  double prev = 0;
  for (int p : order) {
    m |= Mask(1) << p;
    const double cur = pot.value(m);
    x(p) = cur - prev;
    prev = cur;
  }
  return x;
}

BasePoint greedy_vertex(const SubmodularPotential& pot,
                        const Eigen::VectorXd& w) {
  const int k = pot.arity();
  if (w.size() != k)
    fail(ErrorCategory::invalid_input, "weight size != arity");
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return w(a) > w(b); });
  return greedy_vertex_for_order(pot, order);
}

bool check_base_membership(const SubmodularPotential& pot, const BasePoint& x,
                           double tau) {
  const int k = pot.arity();
  if (k > 20)
    fail(ErrorCategory::capability, "membership check limited to arity 20");
  if (x.size() != k)
    fail(ErrorCategory::invalid_input, "point size != arity");
  const Mask full = pot.full_mask();
  for (Mask m = 1; m < full; ++m) {
    double xs = 0;
    for (int p = 0; p < k; ++p)
      if (m & (Mask(1) << p)) xs += x(p);
    if (xs > pot.value(m) + tau) return false;
  }
  return std::abs(x.sum() - pot.value(full)) <= tau;
}

double max_abs_value(const SubmodularPotential& pot) {
  if (pot.arity() > 20)
    fail(ErrorCategory::capability, "value scan limited to arity 20");
  double best = 0;
  for (Mask m = 0; m <= pot.full_mask(); ++m)
    best = std::max(best, std::abs(pot.value(m)));
  return best;
}

BlockVector::BlockVector(const DecomposableInstance& inst)
    : inst_(&inst), blocks_(inst.r()), aggregate_(Eigen::VectorXd::Zero(inst.n())) {
  for (int i = 0; i < inst.r(); ++i)
    blocks_[i] = BasePoint::Zero(inst.potential(i).arity());
}

BlockVector BlockVector::greedy_init(const DecomposableInstance& inst) {
  BlockVector out(inst);
  for (int i = 0; i < inst.r(); ++i) {
    const auto& pot = inst.potential(i);
    std::vector<int> order(pot.arity());
    std::iota(order.begin(), order.end(), 0);
    out.set_block(i, greedy_vertex_for_order(pot, order));
  }
  return out;
}

void BlockVector::set_block(int i, const BasePoint& y) {
  const auto& sup = inst_->potential(i).support();
  const BasePoint& old = blocks_[i];
  for (int p = 0; p < static_cast<int>(sup.size()); ++p)
    aggregate_(sup[p]) += y(p) - old(p);
  blocks_[i] = y;
}

void BlockVector::apply_swap(int i, int u_pos, int v_pos, double eps) {
  const auto& sup = inst_->potential(i).support();
  blocks_[i](u_pos) += eps;
  blocks_[i](v_pos) -= eps;
  aggregate_(sup[u_pos]) += eps;
  aggregate_(sup[v_pos]) -= eps;
}

void BlockVector::rebuild_aggregate() {
  aggregate_.setZero();
  for (int i = 0; i < blocks(); ++i) {
    const auto& sup = inst_->potential(i).support();
    for (int p = 0; p < static_cast<int>(sup.size()); ++p)
      aggregate_(sup[p]) += blocks_[i](p);
  }
}

double BlockVector::squared_norm() const {
  double s = 0;
  for (const auto& b : blocks_) s += b.squaredNorm();
  return s;
}

double BlockVector::distance_to(const BlockVector& other) const {
  double s = 0;
  for (int i = 0; i < blocks(); ++i)
    s += (blocks_[i] - other.blocks_[i]).squaredNorm();
  return std::sqrt(s);
}

}  // namespace dsfm
