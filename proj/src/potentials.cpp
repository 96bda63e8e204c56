#include "dsfm/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsfm/level0.hpp"

namespace dsfm {

Eigen::VectorXd UnaryPotential::exact_quad_minimize(const Eigen::VectorXd& w) const {
  if (w.size() != 1) fail(ErrorCategory::invalid_input, "weight size != 1");
  Eigen::VectorXd y(1);
  y(0) = delta_;  // the polytope is a single point
  return y;
}

EdgeCutPotential::EdgeCutPotential(int u, int v, double weight)
    : SubmodularPotential([&] {
        std::vector<int> s{u, v};
        std::sort(s.begin(), s.end());
        return s;
      }()),
      weight_(weight) {
  if (u == v) fail(ErrorCategory::invalid_input, "edge endpoints coincide");
  if (weight < 0) fail(ErrorCategory::invalid_input, "negative edge weight");
}

Eigen::VectorXd EdgeCutPotential::exact_quad_minimize(
    const Eigen::VectorXd& w) const {
  if (w.size() != 2) fail(ErrorCategory::invalid_input, "weight size != 2");
  // B = {(t, -t) : |t| <= weight}; 1-d clamp of the stationary point.
  const double t = std::clamp((w(1) - w(0)) / 2, -weight_, weight_);
  Eigen::VectorXd y(2);
  y(0) = t;
  y(1) = -t;
  return y;
}

RegionPotential::RegionPotential(std::vector<int> ids)
    : SubmodularPotential([&] {
        std::sort(ids.begin(), ids.end());
        return ids;
      }()) {}

Eigen::VectorXd RegionPotential::exact_quad_minimize(
    const Eigen::VectorXd& w) const {
  const int m = arity();
  if (w.size() != m) fail(ErrorCategory::invalid_input, "weight size != arity");
  // Slopes of the greedy chain are m-1, m-3, ..., 1-m. Sort targets -w
  // descending and pool adjacent violators of t - d against the
  // non-increasing shift profile; each pooled block shares one shift.
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return -w(a) > -w(b); });
  struct Block {
    double sum;
    int len;
    double mean() const { return sum / len; }
  };
  std::vector<Block> stack;
  stack.reserve(m);
  for (int j = 0; j < m; ++j) {
    const double t = -w(order[j]);
    const double d = double(m - 2 * (j + 1) + 1);
    stack.push_back({t - d, 1});
    while (stack.size() >= 2 &&
           stack[stack.size() - 2].mean() < stack.back().mean()) {
      stack[stack.size() - 2].sum += stack.back().sum;
      stack[stack.size() - 2].len += stack.back().len;
      stack.pop_back();
    }
  }
  Eigen::VectorXd y(m);
  int j = 0;
  for (const Block& b : stack) {
    const double c = b.mean();
    for (int l = 0; l < b.len; ++l, ++j) y(order[j]) = -w(order[j]) - c;
  }
  return y;
}

SquarePotential::SquarePotential(int p00, int p01, int p10, int p11, double scale)
    : SubmodularPotential([&] {
        std::vector<int> s{p00, p01, p10, p11};
        std::sort(s.begin(), s.end());
        return s;
      }()),
      corners_{p00, p01, p10, p11},
      scale_(scale) {
  if (arity() != 4)
    fail(ErrorCategory::invalid_input, "square corners must be distinct");
  if (scale < 0) fail(ErrorCategory::invalid_input, "negative square scale");
  const std::array<std::pair<int, int>, 4> corner_edges = {
      std::pair{p00, p01}, {p10, p11}, {p00, p10}, {p01, p11}};
  for (int e = 0; e < 4; ++e)
    edges_[e] = {position_of(corner_edges[e].first),
                 position_of(corner_edges[e].second)};
}

double SquarePotential::value(Mask m) const {
  int separated = 0;
  for (const auto& [a, b] : edges_)
    separated += ((m >> a) ^ (m >> b)) & 1;
  return scale_ * std::sqrt(double(separated));
}

Eigen::VectorXd SquarePotential::exact_quad_minimize(
    const Eigen::VectorXd& w) const {
  // 16-entry table; divide and conquer over exhaustive minimization is
  // exact and cheap at this arity.
  return quad_oracle_from_sfm(*this, w);
}

FunctionPotential::FunctionPotential(std::vector<int> ids,
                                     std::function<double(Mask)> fn)
    : SubmodularPotential([&] {
        std::sort(ids.begin(), ids.end());
        return ids;
      }()),
      fn_(std::move(fn)) {
  if (std::abs(fn_(0)) > 0)
    fail(ErrorCategory::invalid_input, "function potential not normalized");
}

BasePoint oracle_unary(const UnaryPotential& pot, const Eigen::VectorXd& w) {
  return pot.exact_quad_minimize(w);
}
BasePoint oracle_edge_cut(const EdgeCutPotential& pot, const Eigen::VectorXd& w) {
  return pot.exact_quad_minimize(w);
}
BasePoint oracle_region(const RegionPotential& pot, const Eigen::VectorXd& w) {
  return pot.exact_quad_minimize(w);
}
BasePoint oracle_square(const SquarePotential& pot, const Eigen::VectorXd& w) {
  return pot.exact_quad_minimize(w);
}

}  // namespace dsfm
