#include "dsfm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dsfm/gradient.hpp"
#include "dsfm/level0.hpp"
#include "dsfm/potentials.hpp"
#include "dsfm/rng.hpp"

namespace dsfm {

namespace {

// Greedy vertex of B(f) for weight w, as an aggregate: per-block greedy
// vertices share the global order because the tie rule is position-free.
Eigen::VectorXd whole_greedy(const DecomposableInstance& inst,
                             const Eigen::VectorXd& w) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(inst.n());
  for (int i = 0; i < inst.r(); ++i) {
    const auto& sup = inst.potential(i).support();
    Eigen::VectorXd wi(sup.size());
    for (int p = 0; p < static_cast<int>(sup.size()); ++p) wi(p) = w(sup[p]);
    const BasePoint v = greedy_vertex(inst.potential(i), wi);
    for (int p = 0; p < static_cast<int>(sup.size()); ++p) out(sup[p]) += v(p);
  }
  return out;
}

double duality_gap(const DecomposableInstance& inst, const Eigen::VectorXd& x) {
  return x.squaredNorm() - x.dot(whole_greedy(inst, -x));
}

Eigen::VectorXd block_of(const Eigen::VectorXd& agg,
                         const std::vector<int>& sup) {
  Eigen::VectorXd out(sup.size());
  for (int p = 0; p < static_cast<int>(sup.size()); ++p) out(p) = agg(sup[p]);
  return out;
}

// Random vertex of the product: one global Gaussian weight, blockwise greedy.
BlockVector random_product_vertex(const DecomposableInstance& inst, Rng& rng) {
  Eigen::VectorXd w(inst.n());
  for (int v = 0; v < inst.n(); ++v) w(v) = rng.normal();
  BlockVector y(inst);
  for (int i = 0; i < inst.r(); ++i) {
    const auto& sup = inst.potential(i).support();
    y.set_block(i, greedy_vertex(inst.potential(i), block_of(w, sup)));
  }
  return y;
}

BlockVector random_product_point(const DecomposableInstance& inst, Rng& rng) {
  BlockVector y = random_product_vertex(inst, rng);
  const int extra = rng.uniform_int(3);  // 0..2 further vertices to mix in
  for (int m = 0; m < extra; ++m) {
    const BlockVector z = random_product_vertex(inst, rng);
    const double t = rng.uniform(0.2, 0.8);
    for (int i = 0; i < inst.r(); ++i)
      y.set_block(i, t * y.block(i) + (1 - t) * z.block(i));
  }
  return y;
}

}  // namespace

Eigen::VectorXd compute_sstar(const DecomposableInstance& inst,
                              const OracleSet& oracles,
                              const DiagnosticsOptions& opts) {
  BlockVector y = BlockVector::greedy_init(inst);
  std::int64_t done = 0;
  const std::int64_t chunk = std::max<std::int64_t>(100 * inst.r(), 400);
  while (duality_gap(inst, y.aggregate()) > opts.precision) {
    if (done >= opts.max_iterations)
      fail(ErrorCategory::convergence,
           "minimum norm point did not reach the requested precision "
           "within the iteration budget");
    GradientOptions gopts;
    gopts.iterations = std::min(chunk, opts.max_iterations - done);
    gopts.seed = 0x5357a9 + static_cast<std::uint64_t>(done);
    solve_rcdm(inst, oracles, gopts, &y, &y);
    done += gopts.iterations;
  }
  Eigen::VectorXd sstar = y.aggregate();

  if (inst.n() <= 12) {
    // Direct solve on f as one potential, brute greedy over the ground set.
    std::vector<int> ids(inst.n());
    std::iota(ids.begin(), ids.end(), 0);
    FunctionPotential whole(ids, [&inst, n = inst.n()](Mask m) {
      std::vector<int> members;
      for (int v = 0; v < n; ++v)
        if (m >> v & 1) members.push_back(v);
      return inst.evaluate(members);
    });
    WolfeOptions wopts;
    wopts.eps = std::max(opts.precision, 1e-14);
    const BasePoint direct =
        fujishige_wolfe(whole, Eigen::VectorXd::Zero(inst.n()), wopts);
    const double budget = std::sqrt(2 * opts.precision) +
                          std::sqrt(2 * wopts.eps) + 1e-9;
    if ((sstar - direct).norm() > budget)
      fail(ErrorCategory::internal,
           "minimum norm point disagrees with the direct whole-function "
           "solve beyond the precision budget");
  }
  return sstar;
}

DiagnosticsContext make_diagnostics(const DecomposableInstance& inst,
                                    const OracleSet& oracles,
                                    const DiagnosticsOptions& opts) {
  DiagnosticsContext ctx;
  ctx.inst = &inst;
  ctx.tau = opts.tau;
  ctx.sstar = compute_sstar(inst, oracles, opts);
  ctx.precision_reached = duality_gap(inst, ctx.sstar);

  std::vector<int> all(inst.n());
  std::iota(all.begin(), all.end(), 0);
  if (std::abs(ctx.sstar.sum() - inst.evaluate(all)) > 1e-6)
    fail(ErrorCategory::internal,
         "minimum norm point sum does not match the full-set value");
  Rng rng(0x9e3779b97f4a7c15ull);
  const double norm = ctx.sstar.norm();
  for (int t = 0; t < 8; ++t) {
    Eigen::VectorXd w(inst.n());
    for (int v = 0; v < inst.n(); ++v) w(v) = rng.normal();
    if (whole_greedy(inst, w).norm() < norm - 1e-7)
      fail(ErrorCategory::internal,
           "a greedy vertex undercuts the minimum norm point");
  }
  return ctx;
}

TransportReport decompose_transport(const DiagnosticsContext& ctx,
                                    const OracleSet& oracles,
                                    const BlockVector& y) {
  const DecomposableInstance& inst = *ctx.inst;
  const int n = inst.n();
  TransportReport rep{BlockVector(inst)};
  rep.discrepancy_l1 = (y.aggregate() - ctx.sstar).lpNorm<1>();

  FlowStats stats;
  rep.x = transport_to_target(inst, oracles, y, ctx.sstar, {}, &stats);
  rep.augmentations = stats.augmentations;

  for (int i = 0; i < inst.r(); ++i) {
    const Eigen::VectorXd d = rep.x.block(i) - y.block(i);
    rep.moved_l2 += d.squaredNorm();
    rep.moved_l1 += d.lpNorm<1>();
    rep.moved_linf = std::max(rep.moved_linf, d.lpNorm<Eigen::Infinity>());
  }
  rep.moved_l2 = std::sqrt(rep.moved_l2);

  // Each augmentation moves eps along a simple path of at most n - 1 arcs
  // and every arc changes two block coordinates, so one update adds at most
  // 2(n - 1) eps to the l1 move and eps to the l_inf move; the eps values
  // sum to half the starting discrepancy. Relay chains (cuts sharing only a
  // middle element) realize the l2 bound exactly, so sqrt(n)/2 in place of
  // sqrt((n - 1) / 2) would be unsound.
  rep.bound_l2 = std::sqrt((n - 1) / 2.0) * rep.discrepancy_l1 + ctx.tau;
  rep.bound_linf = rep.discrepancy_l1 / 2 + ctx.tau;
  rep.bound_l1 = double(n - 1) * rep.discrepancy_l1 + ctx.tau;
  rep.within_bounds = rep.moved_l2 <= rep.bound_l2 &&
                      rep.moved_linf <= rep.bound_linf &&
                      rep.moved_l1 <= rep.bound_l1;
  return rep;
}

KappaStats estimate_kappa(const DiagnosticsContext& ctx,
                          const OracleSet& oracles, int samples,
                          std::uint64_t seed) {
  const DecomposableInstance& inst = *ctx.inst;
  const int n = inst.n();
  const int r = inst.r();
  Rng rng(seed);
  KappaStats stats;
  stats.bound = double(n) * std::sqrt(double(r)) / 2 + 1;

  // Solution-set anchor and the null directions that leave aggregates fixed.
  const BlockVector anchor =
      transport_to_target(inst, oracles, BlockVector::greedy_init(inst),
                          ctx.sstar);
  std::vector<int> shared;  // elements covered by at least two potentials
  for (int v = 0; v < n; ++v)
    if (inst.degree(v) >= 2) shared.push_back(v);

  int attempts = 0;
  while (static_cast<int>(stats.ratios.size()) < samples &&
         attempts < 20 * samples + 50) {
    ++attempts;
    const bool from_product = shared.empty() || (attempts % 2 == 0);
    double ratio;
    if (from_product) {
      const BlockVector y = random_product_point(inst, rng);
      const double denom = (y.aggregate() - ctx.sstar).norm() /
                           std::sqrt(double(r));
      if (denom < 1e-9) continue;
      TransportReport tr = decompose_transport(ctx, oracles, y);
      ratio = y.distance_to(tr.x) / denom;
      ++stats.product_samples;
    } else {
      BlockVector y = anchor;
      const int moves = 1 + rng.uniform_int(3);
      for (int m = 0; m < moves; ++m) {
        const int v = shared[rng.uniform_int(int(shared.size()))];
        const auto& inc = inst.incidence(v);
        const int a = rng.uniform_int(int(inc.size()));
        int b = rng.uniform_int(int(inc.size()) - 1);
        if (b >= a) ++b;
        const double delta = 0.5 * rng.normal();
        Eigen::VectorXd ya = y.block(inc[a].first);
        ya(inc[a].second) += delta;
        y.set_block(inc[a].first, ya);
        Eigen::VectorXd yb = y.block(inc[b].first);
        yb(inc[b].second) -= delta;
        y.set_block(inc[b].first, yb);
      }
      // Nearest point of the product, blockwise.
      BlockVector p(inst);
      for (int i = 0; i < r; ++i)
        p.set_block(i, oracles.quad_minimize(i, -y.block(i)));
      const double denom = y.distance_to(p);
      if (denom < 1e-9) continue;
      TransportReport tr = decompose_transport(ctx, oracles, p);
      ratio = y.distance_to(tr.x) / denom;
      ++stats.affine_samples;
    }
    stats.ratios.push_back(ratio);
    stats.max_ratio = std::max(stats.max_ratio, ratio);
    if (ratio > stats.bound + ctx.tau) ++stats.violations;
  }
  return stats;
}

EllStats check_ell(const DiagnosticsContext& ctx, const OracleSet& oracles,
                   int samples, std::uint64_t seed) {
  const DecomposableInstance& inst = *ctx.inst;
  const int n = inst.n();
  Rng rng(seed);
  EllStats stats;
  stats.modulus_bound = 4.0 / (double(n) * n);
  for (int t = 0; t < samples; ++t) {
    const BlockVector y = random_product_point(inst, rng);
    TransportReport tr = decompose_transport(ctx, oracles, y);
    const double lhs = y.distance_to(tr.x) * y.distance_to(tr.x);
    const double rhs =
        double(n) * n / 4 *
            (y.aggregate() - tr.x.aggregate()).squaredNorm() +
        ctx.tau;
    ++stats.checked;
    if (lhs > rhs) ++stats.violations;
    stats.max_ratio = std::max(stats.max_ratio, lhs / rhs);
  }
  return stats;
}

}  // namespace dsfm
