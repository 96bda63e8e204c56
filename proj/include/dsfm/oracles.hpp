#pragma once

#include <array>
#include <atomic>
#include <cstdint>

#include "dsfm/base_polytope.hpp"
#include "dsfm/level0.hpp"
#include "dsfm/submodular.hpp"

namespace dsfm {

enum class OracleRoute { specialized, wolfe, brute };

struct OraclePolicy {
  // Requested route per kind; falls back when a kind cannot honor it
  // (no closed form -> brute for small supports -> wolfe).
  std::array<OracleRoute, kNumKinds> route;
  double wolfe_eps = 1e-10;
  int wolfe_max_major = 0;  // 0 = run to the gap target
  bool wolfe_warm_start = true;

  OraclePolicy();

  OracleRoute& route_for(Kind k) { return route[static_cast<int>(k)]; }
  OracleRoute route_for(Kind k) const { return route[static_cast<int>(k)]; }

  static OraclePolicy flow_defaults();      // eps 1e-10
  static OraclePolicy gradient_defaults();  // eps 1e-6
  // Everything through Wolfe (optionally capped); for protocol experiments.
  static OraclePolicy all_wolfe(double eps, int max_major, bool warm);
};

// Per-instance oracle dispatcher with call accounting. Thread-safe for
// concurrent quadratic minimization across distinct or shared blocks.
class OracleSet {
 public:
  OracleSet(const DecomposableInstance& inst, OraclePolicy policy);

  const DecomposableInstance& instance() const { return *inst_; }
  const OraclePolicy& policy() const { return policy_; }

  // argmin_{y in B(f_i)} ||y + w||^2 along the resolved route.
  BasePoint quad_minimize(int i, const Eigen::VectorXd& w,
                          const BasePoint* warm = nullptr) const;

  // Minimizer of f_i + w as (support mask, value). Exact along specialized
  // and brute routes; a capped Wolfe route is best-effort and leaves the
  // stack uncertified.
  std::pair<Mask, double> sfm(int i, const Eigen::VectorXd& w) const;

  OracleRoute resolved_route(int i) const { return resolved_[i]; }
  // True when route i yields certifiably exact answers at flow precision.
  bool certified_exact(int i) const;
  bool all_certified() const;

  std::int64_t calls(int i) const;
  std::int64_t total_calls() const;
  std::array<std::int64_t, kNumKinds> calls_by_kind() const;
  std::int64_t wolfe_nonconverged() const;
  void reset_counters() const;

 private:
  void count(int i) const;

  const DecomposableInstance* inst_;
  OraclePolicy policy_;
  std::vector<OracleRoute> resolved_;
  mutable std::vector<std::int64_t> calls_;
  mutable std::int64_t nonconverged_ = 0;
};

}  // namespace dsfm
