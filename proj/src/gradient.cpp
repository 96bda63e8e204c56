#include "dsfm/gradient.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "dsfm/parallel.hpp"
#include "dsfm/rng.hpp"

namespace dsfm {

RoundResult round_and_certify(const DecomposableInstance& inst,
                              const BlockVector& y) {
  const int n = inst.n();
  const Eigen::VectorXd& x = y.aggregate();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return x(a) < x(b); });

  // Sweep thresholds upward, maintaining f incrementally per potential.
  std::vector<Mask> cur(inst.r(), 0);
  double running = 0;  // f of the current prefix
  double best = 0;     // empty set
  int best_len = 0;
  int j = 0;
  while (j < n) {
    int e = j;
    while (e < n && x(order[e]) == x(order[j])) ++e;  // ties enter together
    for (int t = j; t < e; ++t) {
      for (auto [i, p] : inst.incidence(order[t])) {
        running -= inst.potential(i).value(cur[i]);
        cur[i] |= Mask(1) << p;
        running += inst.potential(i).value(cur[i]);
      }
    }
    if (running < best) {
      best = running;
      best_len = e;
    }
    j = e;
  }

  RoundResult out;
  out.minimizer.assign(order.begin(), order.begin() + best_len);
  std::sort(out.minimizer.begin(), out.minimizer.end());
  out.value = best;
  double xminus = 0;
  for (int v = 0; v < n; ++v) xminus += std::min(x(v), 0.0);
  out.gap = best - xminus;
  return out;
}

namespace {

Eigen::VectorXd block_of(const Eigen::VectorXd& agg,
                         const std::vector<int>& sup) {
  Eigen::VectorXd out(sup.size());
  for (int p = 0; p < static_cast<int>(sup.size()); ++p) out(p) = agg(sup[p]);
  return out;
}

struct GradientRun {
  const DecomposableInstance& inst;
  const OracleSet& oracles;
  const GradientOptions& opts;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  GradientRun(const DecomposableInstance& inst_, const OracleSet& oracles_,
              const GradientOptions& opts_)
      : inst(inst_), oracles(oracles_), opts(opts_) {
    if (opts.iterations < 1)
      fail(ErrorCategory::invalid_input, "iteration budget must be >= 1");
    if (&oracles.instance() != &inst)
      fail(ErrorCategory::invalid_input, "oracle set bound to another instance");
    oracles.reset_counters();
  }

  BlockVector start(const BlockVector* y0) const {
    if (!y0) return BlockVector::greedy_init(inst);
    if (y0->blocks() != inst.r())
      fail(ErrorCategory::invalid_input, "start point block count mismatch");
    return *y0;
  }

  SolveReport finish(const char* name, const BlockVector& y,
                     std::int64_t iterations, BlockVector* y_out) const {
    RoundResult rounded = round_and_certify(inst, y);
    SolveReport rep;
    rep.solver = name;
    rep.minimizer = std::move(rounded.minimizer);
    rep.value = rounded.value;
    rep.certificate_gap = rounded.gap;
    rep.continuous_objective = 0.5 * y.aggregate().squaredNorm();
    rep.iterations = iterations;
    rep.oracle_calls = oracles.total_calls();
    rep.oracle_calls_by_kind = oracles.calls_by_kind();
    rep.certified = oracles.all_certified();
    rep.converged = true;
    rep.seed = opts.seed;
    rep.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (y_out) *y_out = y;
    return rep;
  }
};

// One plain coordinate step on block i; shared by RCDM and the frozen
// momentum path so the two stay bit-for-bit identical.
void coordinate_step(const DecomposableInstance& inst, const OracleSet& oracles,
                     BlockVector& y, int i) {
  const auto& sup = inst.potential(i).support();
  Eigen::VectorXd w = block_of(y.aggregate(), sup) - y.block(i);
  y.set_block(i, oracles.quad_minimize(i, w, &y.block(i)));
}

}  // namespace

SolveReport solve_rcdm(const DecomposableInstance& inst, const OracleSet& oracles,
                       const GradientOptions& opts, const BlockVector* y0,
                       BlockVector* y_out) {
  GradientRun run(inst, oracles, opts);
  BlockVector y = run.start(y0);
  Rng rng(opts.seed);
  const int r = inst.r();
  for (std::int64_t k = 0; k < opts.iterations; ++k)
    coordinate_step(inst, oracles, y, rng.uniform_int(r));
  return run.finish("rcdm", y, opts.iterations, y_out);
}

SolveReport solve_acdm(const DecomposableInstance& inst, const OracleSet& oracles,
                       const GradientOptions& opts, const BlockVector* y0,
                       BlockVector* y_out) {
  GradientRun run(inst, oracles, opts);
  Rng rng(opts.seed);
  const int r = inst.r();
  const int n = inst.n();
  const std::int64_t epoch =
      opts.epoch_length > 0 ? opts.epoch_length
                            : (std::int64_t(r) * n + 1) / 2;

  BlockVector z = run.start(y0);
  if (opts.freeze_momentum) {
    for (std::int64_t k = 0; k < opts.iterations; ++k)
      coordinate_step(inst, oracles, z, rng.uniform_int(r));
    return run.finish("acdm", z, opts.iterations, y_out);
  }

  BlockVector u(inst);  // momentum blocks; zero aggregate at epoch start
  double theta = 1.0 / r;
  // ||A(theta^2 u + z)||^2 tracked through three scalars.
  double unorm2 = 0, znorm2 = z.aggregate().squaredNorm(), cross = 0;

  BlockVector best = z;
  double best_obj2 = znorm2;

  auto snapshot = [&](double theta_used) {
    const double obj2 = theta_used * theta_used * theta_used * theta_used * unorm2 +
                        2 * theta_used * theta_used * cross + znorm2;
    if (obj2 < best_obj2) {
      best_obj2 = obj2;
      for (int i = 0; i < r; ++i)
        best.set_block(i, theta_used * theta_used * u.block(i) + z.block(i));
    }
  };

  std::int64_t in_epoch = 0;
  for (std::int64_t k = 0; k < opts.iterations; ++k) {
    const int i = rng.uniform_int(r);
    const auto& sup = inst.potential(i).support();
    const Eigen::VectorXd au_old = block_of(u.aggregate(), sup);
    const Eigen::VectorXd az_old = block_of(z.aggregate(), sup);

    // Gradient at the interpolated point, damped prox on z.
    Eigen::VectorXd w =
        (theta * theta * au_old + az_old) / (r * theta) - z.block(i);
    const Eigen::VectorXd z_new = oracles.quad_minimize(i, w, &z.block(i));
    const Eigen::VectorXd delta = z_new - z.block(i);
    const double c = (1.0 - r * theta) / (theta * theta);

    znorm2 += 2 * az_old.dot(delta) + delta.squaredNorm();
    cross += au_old.dot(delta);
    unorm2 += -2 * c * au_old.dot(delta) + c * c * delta.squaredNorm();
    cross += -c * (delta.dot(az_old) + delta.squaredNorm());

    z.set_block(i, z_new);
    u.set_block(i, u.block(i) - c * delta);

    ++in_epoch;
    if (k % r == r - 1 || in_epoch == epoch || k + 1 == opts.iterations)
      snapshot(theta);

    if (in_epoch == epoch) {
      // Restart the schedule from the best point seen so far.
      z = best;
      u = BlockVector(inst);
      theta = 1.0 / r;
      unorm2 = 0;
      cross = 0;
      znorm2 = z.aggregate().squaredNorm();
      in_epoch = 0;
    } else {
      theta = (std::sqrt(theta * theta * (theta * theta + 4)) - theta * theta) / 2;
    }
  }
  return run.finish("acdm", best, opts.iterations, y_out);
}

SolveReport solve_ap(const DecomposableInstance& inst, const OracleSet& oracles,
                     const GradientOptions& opts, const BlockVector* y0,
                     BlockVector* y_out) {
  GradientRun run(inst, oracles, opts);
  const int r = inst.r();
  const int n = inst.n();

  BlockVector x = run.start(y0);
  BlockVector a(inst);  // starts at 0, a member of the subspace
  if (y0) {
    // Begin the alternation at the subspace projection of the given point.
    Eigen::VectorXd lam(n);
    for (int v = 0; v < n; ++v)
      lam(v) = inst.degree(v) > 0 ? x.aggregate()(v) / inst.degree(v) : 0.0;
    for (int i = 0; i < r; ++i) {
      const auto& sup = inst.potential(i).support();
      a.set_block(i, x.block(i) - block_of(lam, sup));
    }
  }

  for (std::int64_t round = 0; round < opts.iterations; ++round) {
    // Project onto the product of base polytopes, blockwise and independent.
    std::vector<Eigen::VectorXd> nearest(r);
    auto project_block = [&](int i) {
      nearest[i] = oracles.quad_minimize(i, -a.block(i), &x.block(i));
    };
    if (opts.parallel && thread_count() > 1) {
      parallel_for(0, r, project_block, 4);
    } else {
      for (int i = 0; i < r; ++i) project_block(i);
    }
    for (int i = 0; i < r; ++i) x.set_block(i, nearest[i]);

    // Project back onto the zero-aggregate subspace.
    Eigen::VectorXd lam(n);
    for (int v = 0; v < n; ++v)
      lam(v) = inst.degree(v) > 0 ? x.aggregate()(v) / inst.degree(v) : 0.0;
    for (int i = 0; i < r; ++i) {
      const auto& sup = inst.potential(i).support();
      a.set_block(i, x.block(i) - block_of(lam, sup));
    }
  }
  return run.finish("ap", x, opts.iterations, y_out);
}

}  // namespace dsfm
