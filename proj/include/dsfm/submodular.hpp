#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dsfm/error.hpp"

namespace dsfm {

// Subset of a potential's support, bit j <-> support position j.
using Mask = std::uint32_t;

inline int popcount(Mask m) { return __builtin_popcount(m); }

struct GroundSet {
  int n = 0;
  explicit GroundSet(int n_) : n(n_) {
    if (n_ < 0) fail(ErrorCategory::invalid_input, "ground set size < 0");
  }
};

enum class Kind { unary, edge_cut, square, region, table, custom };

const char* kind_name(Kind k);
constexpr int kNumKinds = 6;

// A normalized submodular function with a small effective support.
// value() takes subsets of the support as bitmasks over positions in
// support() (which is sorted ascending by ground element id) and must
// satisfy value(0) == 0.
class SubmodularPotential {
 public:
  virtual ~SubmodularPotential() = default;

  const std::vector<int>& support() const { return support_; }
  int arity() const { return static_cast<int>(support_.size()); }

  virtual Kind kind() const = 0;
  virtual double value(Mask subset) const = 0;
  virtual std::unique_ptr<SubmodularPotential> clone() const = 0;

  // Closed-form (or otherwise certified exact) quadratic minimizer
  // argmin_{y in B} ||y + w||^2, when the kind has one.
  virtual bool has_exact_oracle() const { return false; }
  virtual Eigen::VectorXd exact_quad_minimize(const Eigen::VectorXd& w) const;

  // Position of ground element v in support(), -1 if absent.
  int position_of(int v) const;
  Mask full_mask() const { return arity() >= 32 ? ~Mask(0) : (Mask(1) << arity()) - 1; }

 protected:
  explicit SubmodularPotential(std::vector<int> support);
  std::vector<int> support_;
};

// Explicit value table over 2^arity subsets; values are normalized at
// construction by subtracting the empty-set entry. ids may arrive in any
// order; support is canonicalized to ascending ids and the table remapped.
class TablePotential final : public SubmodularPotential {
 public:
  TablePotential(std::vector<int> ids, std::vector<double> values);

  Kind kind() const override { return Kind::table; }
  double value(Mask subset) const override { return values_[subset]; }
  std::unique_ptr<SubmodularPotential> clone() const override {
    return std::make_unique<TablePotential>(*this);
  }
  const std::vector<double>& table() const { return values_; }

 private:
  std::vector<double> values_;
};

class DecomposableInstance {
 public:
  DecomposableInstance(GroundSet ground,
                       std::vector<std::unique_ptr<SubmodularPotential>> pots);

  int n() const { return ground_.n; }
  int r() const { return static_cast<int>(pots_.size()); }
  const SubmodularPotential& potential(int i) const { return *pots_[i]; }

  // (potential index, support position) pairs covering element v.
  const std::vector<std::pair<int, int>>& incidence(int v) const {
    return incidence_[v];
  }
  int degree(int v) const { return static_cast<int>(incidence_[v].size()); }

  double evaluate(const std::vector<int>& subset) const;

  DecomposableInstance clone() const;

 private:
  GroundSet ground_;
  std::vector<std::unique_ptr<SubmodularPotential>> pots_;
  std::vector<std::vector<std::pair<int, int>>> incidence_;
};

// f(S) = sum_i f_i(S intersect C_i); ids must be unique and in range.
double evaluate(const DecomposableInstance& inst, const std::vector<int>& subset);

// Exhaustive submodularity check over the support lattice. Returns true and
// leaves the witnesses empty when the inequality holds everywhere; otherwise
// fills X, Y (as support masks) with a violating pair. Capability-limited to
// arity <= 14.
bool submodularity_witness(const SubmodularPotential& pot, Mask* bad_x,
                           Mask* bad_y, double tol = 1e-9);

std::vector<int> mask_to_ids(const SubmodularPotential& pot, Mask m);
Mask ids_to_mask(const SubmodularPotential& pot, const std::vector<int>& ids);

}  // namespace dsfm
