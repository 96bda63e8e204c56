#pragma once

#include <array>
#include <functional>

#include "dsfm/base_polytope.hpp"
#include "dsfm/submodular.hpp"

namespace dsfm {

// Single-element modular term: value(S) = delta when the element is in S.
// delta = cost1 - cost0 (label-1 cost minus label-0 cost).
class UnaryPotential final : public SubmodularPotential {
 public:
  UnaryPotential(int element, double delta)
      : SubmodularPotential({element}), delta_(delta) {}

  Kind kind() const override { return Kind::unary; }
  double value(Mask m) const override { return (m & 1) ? delta_ : 0.0; }
  std::unique_ptr<SubmodularPotential> clone() const override {
    return std::make_unique<UnaryPotential>(*this);
  }
  bool has_exact_oracle() const override { return true; }
  Eigen::VectorXd exact_quad_minimize(const Eigen::VectorXd& w) const override;

  double delta() const { return delta_; }

 private:
  double delta_;
};

// Pairwise cut: value({u}) = value({v}) = weight, endpoints together cost 0.
class EdgeCutPotential final : public SubmodularPotential {
 public:
  EdgeCutPotential(int u, int v, double weight);

  Kind kind() const override { return Kind::edge_cut; }
  double value(Mask m) const override {
    return (m == 1 || m == 2) ? weight_ : 0.0;
  }
  std::unique_ptr<SubmodularPotential> clone() const override {
    return std::make_unique<EdgeCutPotential>(*this);
  }
  bool has_exact_oracle() const override { return true; }
  Eigen::VectorXd exact_quad_minimize(const Eigen::VectorXd& w) const override;

  double weight() const { return weight_; }

 private:
  double weight_;
};

// Cardinality potential |S| * (|C| - |S|) over a region.
class RegionPotential final : public SubmodularPotential {
 public:
  explicit RegionPotential(std::vector<int> ids);

  Kind kind() const override { return Kind::region; }
  double value(Mask m) const override {
    const int s = popcount(m);
    return double(s) * double(arity() - s);
  }
  std::unique_ptr<SubmodularPotential> clone() const override {
    return std::make_unique<RegionPotential>(*this);
  }
  bool has_exact_oracle() const override { return true; }
  Eigen::VectorXd exact_quad_minimize(const Eigen::VectorXd& w) const override;
};

// 2x2 pixel square: value(S) = scale * sqrt(#separated square edges).
// Construction order is (p00, p01, p10, p11); edges run along the sides.
class SquarePotential final : public SubmodularPotential {
 public:
  SquarePotential(int p00, int p01, int p10, int p11, double scale);

  Kind kind() const override { return Kind::square; }
  double value(Mask m) const override;
  std::unique_ptr<SubmodularPotential> clone() const override {
    return std::make_unique<SquarePotential>(*this);
  }
  bool has_exact_oracle() const override { return true; }
  Eigen::VectorXd exact_quad_minimize(const Eigen::VectorXd& w) const override;

  double scale() const { return scale_; }
  const std::array<int, 4>& corners() const { return corners_; }

 private:
  std::array<int, 4> corners_;              // as given: p00 p01 p10 p11
  std::array<std::pair<int, int>, 4> edges_;  // position pairs
  double scale_;
};

// Arbitrary value oracle (normalized on entry); no specialized quadratic
// minimizer, callers go through Wolfe or enumeration.
class FunctionPotential final : public SubmodularPotential {
 public:
  FunctionPotential(std::vector<int> ids, std::function<double(Mask)> fn);

  Kind kind() const override { return Kind::custom; }
  double value(Mask m) const override { return fn_(m); }
  std::unique_ptr<SubmodularPotential> clone() const override {
    return std::make_unique<FunctionPotential>(*this);
  }

 private:
  std::function<double(Mask)> fn_;
};

// Named closed-form minimizers of ||y + w||^2 over the kind's base polytope.
BasePoint oracle_unary(const UnaryPotential& pot, const Eigen::VectorXd& w);
BasePoint oracle_edge_cut(const EdgeCutPotential& pot, const Eigen::VectorXd& w);
BasePoint oracle_region(const RegionPotential& pot, const Eigen::VectorXd& w);
BasePoint oracle_square(const SquarePotential& pot, const Eigen::VectorXd& w);

}  // namespace dsfm
