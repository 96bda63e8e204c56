#include "dsfm/oracles.hpp"

#include <numeric>

namespace dsfm {

OraclePolicy::OraclePolicy() {
  route.fill(OracleRoute::specialized);
  route_for(Kind::table) = OracleRoute::brute;
  route_for(Kind::custom) = OracleRoute::wolfe;
}

OraclePolicy OraclePolicy::flow_defaults() {
  OraclePolicy p;
  p.wolfe_eps = 1e-10;
  return p;
}

OraclePolicy OraclePolicy::gradient_defaults() {
  OraclePolicy p;
  p.wolfe_eps = 1e-6;
  return p;
}

OraclePolicy OraclePolicy::all_wolfe(double eps, int max_major, bool warm) {
  OraclePolicy p;
  p.route.fill(OracleRoute::wolfe);
  p.wolfe_eps = eps;
  p.wolfe_max_major = max_major;
  p.wolfe_warm_start = warm;
  return p;
}

OracleSet::OracleSet(const DecomposableInstance& inst, OraclePolicy policy)
    : inst_(&inst), policy_(policy), resolved_(inst.r()), calls_(inst.r(), 0) {
  for (int i = 0; i < inst.r(); ++i) {
    const auto& pot = inst.potential(i);
    OracleRoute want = policy_.route_for(pot.kind());
    if (want == OracleRoute::specialized && !pot.has_exact_oracle())
      want = pot.arity() <= 24 ? OracleRoute::brute : OracleRoute::wolfe;
    if (want == OracleRoute::brute && pot.arity() > 24)
      want = OracleRoute::wolfe;
    resolved_[i] = want;
  }
}

void OracleSet::count(int i) const {
  std::atomic_ref<std::int64_t>(calls_[i]).fetch_add(1, std::memory_order_relaxed);
}

BasePoint OracleSet::quad_minimize(int i, const Eigen::VectorXd& w,
                                   const BasePoint* warm) const {
  count(i);
  const auto& pot = inst_->potential(i);
  switch (resolved_[i]) {
    case OracleRoute::specialized:
      return pot.exact_quad_minimize(w);
    case OracleRoute::brute:
      return quad_oracle_from_sfm(pot, w);
    case OracleRoute::wolfe: {
      WolfeOptions opts;
      opts.eps = policy_.wolfe_eps;
      opts.max_major = policy_.wolfe_max_major;
      WolfeStats st;
      BasePoint y = fujishige_wolfe(
          pot, w, opts, policy_.wolfe_warm_start ? warm : nullptr, &st);
      if (!st.converged)
        std::atomic_ref<std::int64_t>(nonconverged_)
            .fetch_add(1, std::memory_order_relaxed);
      return y;
    }
  }
  fail(ErrorCategory::internal, "unreachable oracle route");
}

std::pair<Mask, double> OracleSet::sfm(int i, const Eigen::VectorXd& w) const {
  const auto& pot = inst_->potential(i);
  if (resolved_[i] == OracleRoute::brute) {
    count(i);
    return brute_force_sfm(pot, w);
  }
  auto [ids, value] = sfm_from_quad_oracle(
      pot, w,
      [this, i](const SubmodularPotential&, const Eigen::VectorXd& ww) {
        return quad_minimize(i, ww);
      });
  return {ids_to_mask(pot, ids), value};
}

bool OracleSet::certified_exact(int i) const {
  switch (resolved_[i]) {
    case OracleRoute::specialized:
    case OracleRoute::brute:
      return true;
    case OracleRoute::wolfe:
      return policy_.wolfe_max_major == 0 && policy_.wolfe_eps <= 1e-10;
  }
  return false;
}

bool OracleSet::all_certified() const {
  for (int i = 0; i < inst_->r(); ++i)
    if (!certified_exact(i)) return false;
  return true;
}

std::int64_t OracleSet::calls(int i) const {
  return std::atomic_ref<std::int64_t>(calls_[i]).load(std::memory_order_relaxed);
}

std::int64_t OracleSet::total_calls() const {
  std::int64_t t = 0;
  for (int i = 0; i < inst_->r(); ++i) t += calls(i);
  return t;
}

std::array<std::int64_t, kNumKinds> OracleSet::calls_by_kind() const {
  std::array<std::int64_t, kNumKinds> out{};
  for (int i = 0; i < inst_->r(); ++i)
    out[static_cast<int>(inst_->potential(i).kind())] += calls(i);
  return out;
}

std::int64_t OracleSet::wolfe_nonconverged() const {
  return std::atomic_ref<std::int64_t>(nonconverged_).load(std::memory_order_relaxed);
}

void OracleSet::reset_counters() const {
  for (auto& c : calls_) std::atomic_ref<std::int64_t>(c).store(0);
  std::atomic_ref<std::int64_t>(nonconverged_).store(0);
}

}  // namespace dsfm
