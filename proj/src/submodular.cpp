#include "dsfm/submodular.hpp"

#include <algorithm>
#include <numeric>

namespace dsfm {

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::unary: return "unary";
    case Kind::edge_cut: return "edge_cut";
    case Kind::square: return "square";
    case Kind::region: return "region";
    case Kind::table: return "table";
    case Kind::custom: return "custom";
  }
  return "?";
}

SubmodularPotential::SubmodularPotential(std::vector<int> support)
    : support_(std::move(support)) {
  if (support_.empty())
    fail(ErrorCategory::invalid_input, "potential with empty support");
  if (!std::is_sorted(support_.begin(), support_.end()))
    fail(ErrorCategory::internal, "support not sorted");
  if (std::adjacent_find(support_.begin(), support_.end()) != support_.end())
    fail(ErrorCategory::invalid_input, "duplicate element in support");
  if (support_.front() < 0)
    fail(ErrorCategory::invalid_input, "negative element id");
  if (support_.size() > 31)
    fail(ErrorCategory::capability, "support larger than 31 elements");
}

Eigen::VectorXd SubmodularPotential::exact_quad_minimize(
    const Eigen::VectorXd&) const {
  fail(ErrorCategory::capability,
       std::string("no exact oracle for kind ") + kind_name(kind()));
}

int SubmodularPotential::position_of(int v) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), v);
  if (it == support_.end() || *it != v) return -1;
  return static_cast<int>(it - support_.begin());
}

TablePotential::TablePotential(std::vector<int> ids, std::vector<double> values)
    : SubmodularPotential([&ids] {
        std::vector<int> s = ids;
        std::sort(s.begin(), s.end());
        return s;
      }()),
      values_(std::size_t(1) << ids.size()) {
  const int k = static_cast<int>(ids.size());
  if (values.size() != values_.size())
    fail(ErrorCategory::invalid_input, "table size is not 2^arity");
  // Remap masks from the given id order onto the sorted support order.
  std::vector<int> pos(k);
  for (int j = 0; j < k; ++j) pos[j] = position_of(ids[j]);
  for (Mask m = 0; m < Mask(values.size()); ++m) {
    Mask canon = 0;
    for (int j = 0; j < k; ++j)
      if (m & (Mask(1) << j)) canon |= Mask(1) << pos[j];
    values_[canon] = values[m];
  }
  const double off = values_[0];
  if (off != 0.0)
    for (double& v : values_) v -= off;
}

DecomposableInstance::DecomposableInstance(
    GroundSet ground, std::vector<std::unique_ptr<SubmodularPotential>> pots)
    : ground_(ground), pots_(std::move(pots)), incidence_(ground.n) {
  for (int i = 0; i < r(); ++i) {
    const auto& sup = pots_[i]->support();
    for (int p = 0; p < static_cast<int>(sup.size()); ++p) {
      if (sup[p] >= ground_.n)
        fail(ErrorCategory::invalid_input, "support element out of range");
      incidence_[sup[p]].push_back({i, p});
    }
  }
}

double DecomposableInstance::evaluate(const std::vector<int>& subset) const {
  // Scratch masks only for potentials actually touched.
  static thread_local std::vector<Mask> masks;
  static thread_local std::vector<int> touched;
  masks.assign(pots_.size(), 0);
  touched.clear();
  for (int v : subset) {
    if (v < 0 || v >= ground_.n)
      fail(ErrorCategory::invalid_input, "element id out of range");
    for (auto [i, p] : incidence_[v]) {
      if (masks[i] == 0) touched.push_back(i);
      masks[i] |= Mask(1) << p;
    }
  }
  double total = 0;
  for (int i : touched) total += pots_[i]->value(masks[i]);
  return total;
}

DecomposableInstance DecomposableInstance::clone() const {
  std::vector<std::unique_ptr<SubmodularPotential>> copy;
  copy.reserve(pots_.size());
  for (const auto& p : pots_) copy.push_back(p->clone());
  return DecomposableInstance(ground_, std::move(copy));
}

double evaluate(const DecomposableInstance& inst, const std::vector<int>& subset) {
  std::vector<int> s = subset;
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end())
    fail(ErrorCategory::invalid_input, "duplicate element in subset");
  return inst.evaluate(s);
}

bool submodularity_witness(const SubmodularPotential& pot, Mask* bad_x,
                           Mask* bad_y, double tol) {
  const int k = pot.arity();
  if (k > 14)
    fail(ErrorCategory::capability, "submodularity check limited to arity 14");
  const Mask full = pot.full_mask();
  std::vector<double> val(std::size_t(full) + 1);
  for (Mask m = 0; m <= full; ++m) val[m] = pot.value(m);
  // f(X) + f(Y) >= f(X|Y) + f(X&Y); enough to test X, Y differing by one
  // element each outside the intersection, but the plain quadratic scan is
  // simple and the arity is capped anyway.
  for (Mask x = 0; x <= full; ++x) {
    for (Mask y = x + 1; y <= full; ++y) {
      if ((x | y) == x || (x | y) == y) continue;
      if (val[x] + val[y] < val[x | y] + val[x & y] - tol) {
        if (bad_x) *bad_x = x;
        if (bad_y) *bad_y = y;
        return false;
      }
    }
  }
  if (bad_x) *bad_x = 0;
  if (bad_y) *bad_y = 0;
  return true;
}

std::vector<int> mask_to_ids(const SubmodularPotential& pot, Mask m) {
  std::vector<int> ids;
  for (int p = 0; p < pot.arity(); ++p)
    if (m & (Mask(1) << p)) ids.push_back(pot.support()[p]);
  return ids;
}

Mask ids_to_mask(const SubmodularPotential& pot, const std::vector<int>& ids) {
  Mask m = 0;
  for (int v : ids) {
    int p = pot.position_of(v);
    if (p < 0) fail(ErrorCategory::invalid_input, "id not in support");
    m |= Mask(1) << p;
  }
  return m;
}

}  // namespace dsfm
