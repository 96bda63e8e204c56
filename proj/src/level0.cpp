#include "dsfm/level0.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dsfm {
namespace {

// Affine minimizer of the hull of pts: coefficients mu with sum(mu) = 1
// minimizing ||sum mu_j p_j||. Normal equations on the Gram matrix; returns
// false on numerical degeneracy.
bool affine_minimizer(const std::vector<Eigen::VectorXd>& pts,
                      Eigen::VectorXd* mu) {
  const int m = static_cast<int>(pts.size());
  if (m == 1) {
    *mu = Eigen::VectorXd::Ones(1);
    return true;
  }
  // Stationarity of ||sum mu_j p_j||^2 on the patch sum mu = 1, as the
  // bordered system [G 1; 1^T 0](mu, nu) = (0, 1). The system stays
  // consistent when G is singular (linearly dependent vertices), where the
  // plain Gram-inverse trick breaks down.
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) kkt(i, j) = kkt(j, i) = pts[i].dot(pts[j]);
  kkt.row(m).head(m).setOnes();
  kkt.col(m).head(m).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
  rhs(m) = 1.0;
  const Eigen::VectorXd z = kkt.completeOrthogonalDecomposition().solve(rhs);
  if (!z.allFinite()) return false;
  const double scale =
      1.0 + kkt.cwiseAbs().maxCoeff() * z.cwiseAbs().maxCoeff();
  if ((kkt * z - rhs).cwiseAbs().maxCoeff() > 1e-7 * scale) return false;
  *mu = z.head(m);
  return true;
}

}  // namespace

BasePoint fujishige_wolfe(const SubmodularPotential& pot,
                          const Eigen::VectorXd& w, const WolfeOptions& opts,
                          const BasePoint* warm, WolfeStats* stats) {
  const int k = pot.arity();
  if (w.size() != k)
    fail(ErrorCategory::invalid_input, "weight size != arity");
  WolfeStats local;
  WolfeStats& st = stats ? *stats : local;
  st = WolfeStats();

  // Work in the shifted polytope B + w; x tracks the current hull point.
  std::vector<Eigen::VectorXd> pts;
  std::vector<double> lambda;
  Eigen::VectorXd x;
  if (warm) {
    pts.push_back(*warm + w);
  } else {
    pts.push_back(greedy_vertex(pot, -w) + w);
  }
  lambda.push_back(1.0);
  x = pts[0];

  double prev_norm2 = std::numeric_limits<double>::infinity();
  double best_norm2 = std::numeric_limits<double>::infinity();
  int stalled = 0;
  const int hard_major_cap = opts.max_major > 0 ? opts.max_major : 1000000;

  while (true) {
    ++st.major_cycles;
    const double norm2 = x.squaredNorm();
    if (norm2 > prev_norm2 + 1e-9 * (1.0 + norm2)) st.monotone = false;
    prev_norm2 = norm2;

    const BasePoint s = greedy_vertex(pot, -x);
    const Eigen::VectorXd q = s + w;
    st.gap = norm2 - x.dot(q);
    st.final_norm2 = norm2;
    if (st.gap <= opts.eps / 2) {
      st.converged = true;
      break;
    }
    if (st.major_cycles >= hard_major_cap) break;

    // A major cycle that shrinks the norm less than machine precision can
    // never close the remaining gap (the guaranteed decrease scales with
    // gap^2); three in a row means the target sits below the numeric floor.
    constexpr double kMachEps = std::numeric_limits<double>::epsilon();
    if (norm2 >= best_norm2 - 4 * kMachEps * (1.0 + best_norm2)) {
      if (++stalled >= 3) break;
    } else {
      stalled = 0;
    }
    best_norm2 = std::min(best_norm2, norm2);

    // Duplicate vertex would make the Gram singular and cannot help.
    bool dup = false;
    for (const auto& p : pts)
      if ((p - q).cwiseAbs().maxCoeff() < 1e-13 * (1.0 + q.cwiseAbs().maxCoeff())) {
        dup = true;
        break;
      }
    if (dup) break;

    pts.push_back(q);
    lambda.push_back(0.0);

    // Minor cycles: move to the affine minimizer, clipping at the hull
    // boundary and dropping vanished vertices until the minimizer is a
    // convex combination.
    while (true) {
      if (opts.max_minor > 0 && st.minor_cycles >= opts.max_minor) break;
      Eigen::VectorXd mu;
      if (!affine_minimizer(pts, &mu)) {
        ++st.degenerate_restarts;
        int victim = 0;
        for (int j = 1; j < static_cast<int>(pts.size()); ++j)
          if (lambda[j] <= lambda[victim]) victim = j;
        pts.erase(pts.begin() + victim);
        lambda.erase(lambda.begin() + victim);
        ++st.vertices_dropped;
        if (pts.size() <= 1) {
          lambda.assign(1, 1.0);
          break;
        }
        continue;
      }
      bool nonneg = true;
      for (int j = 0; j < mu.size(); ++j)
        if (mu(j) < -1e-12) nonneg = false;
      if (nonneg) {
        for (int j = 0; j < mu.size(); ++j) lambda[j] = std::max(mu(j), 0.0);
        break;
      }
      ++st.minor_cycles;
      double theta = 1.0;
      for (int j = 0; j < mu.size(); ++j)
        if (mu(j) < lambda[j])
          theta = std::min(theta, lambda[j] / (lambda[j] - mu(j)));
      for (int j = 0; j < mu.size(); ++j)
        lambda[j] = (1 - theta) * lambda[j] + theta * mu(j);
      for (int j = static_cast<int>(pts.size()) - 1; j >= 0; --j) {
        if (lambda[j] <= 1e-12) {
          pts.erase(pts.begin() + j);
          lambda.erase(lambda.begin() + j);
          ++st.vertices_dropped;
        }
      }
      if (pts.size() == 1) {
        lambda.assign(1, 1.0);
        break;
      }
    }

    x.setZero();
    for (int j = 0; j < static_cast<int>(pts.size()); ++j)
      x += lambda[j] * pts[j];

    if (opts.max_minor > 0 && st.minor_cycles >= opts.max_minor) break;
  }

  return x - w;
}

std::pair<Mask, double> brute_force_mask_min(const MaskValueFn& fn, int k) {
  if (k > 24)
    fail(ErrorCategory::capability, "exhaustive minimization limited to 24 elements");
  const Mask full = k >= 32 ? ~Mask(0) : (Mask(1) << k) - 1;
  Mask best = 0;
  double best_val = fn(0);
  for (Mask m = 1; m <= full; ++m) {
    const double v = fn(m);
    if (v < best_val) {
      best_val = v;
      best = m;
    } else if (v == best_val) {
      // Lexicographic order on ascending element lists.
      Mask a = m, b = best;
      bool take = false;
      while (a && b) {
        const int pa = __builtin_ctz(a), pb = __builtin_ctz(b);
        if (pa != pb) {
          take = pa < pb;
          a = b = 0;
          break;
        }
        a &= a - 1;
        b &= b - 1;
      }
      if (a == 0 && b != 0) take = true;
      if (take) best = m;
    }
  }
  return {best, best_val};
}

std::pair<Mask, double> brute_force_sfm(const SubmodularPotential& pot,
                                        const Eigen::VectorXd& w) {
  const int k = pot.arity();
  if (w.size() != k)
    fail(ErrorCategory::invalid_input, "weight size != arity");
  // Split-table modular sums keep the scan O(1) per subset.
  const int lo_bits = std::min(k, 16);
  std::vector<double> lo(std::size_t(1) << lo_bits, 0.0);
  for (Mask m = 1; m < Mask(lo.size()); ++m)
    lo[m] = lo[m & (m - 1)] + w(__builtin_ctz(m));
  std::vector<double> hi(std::size_t(1) << std::max(0, k - lo_bits), 0.0);
  for (Mask m = 1; m < Mask(hi.size()); ++m)
    hi[m] = hi[m & (m - 1)] + w(lo_bits + __builtin_ctz(m));
  auto fn = [&](Mask m) {
    return pot.value(m) + lo[m & ((Mask(1) << lo_bits) - 1)] + hi[m >> lo_bits];
  };
  return brute_force_mask_min(fn, k);
}

namespace {

struct DcScratch {
  const SubmodularPotential* pot;
  const Eigen::VectorXd* w;
  const MaskSfmFn* sfm;
  Eigen::VectorXd z;   // min-norm point of B(f + w), filled per level
  int calls = 0;
};

// positions: support positions of the current interval; base: elements
// already contracted in. Assigns z on the interval.
void dc_solve(DcScratch& sc, const std::vector<int>& positions, Mask base) {
  const int kk = static_cast<int>(positions.size());
  if (kk == 0) return;
  const double base_val = sc.pot->value(base);
  auto expand = [&](Mask local) {
    Mask g = 0;
    for (int j = 0; j < kk; ++j)
      if (local & (Mask(1) << j)) g |= Mask(1) << positions[j];
    return g;
  };
  auto g_local = [&](Mask local) {
    const Mask gm = expand(local);
    double v = sc.pot->value(base | gm) - base_val;
    for (int j = 0; j < kk; ++j)
      if (local & (Mask(1) << j)) v += (*sc.w)(positions[j]);
    return v;
  };
  const Mask full_local = (Mask(1) << kk) - 1;
  const double g_full = g_local(full_local);
  const double alpha = g_full / kk;
  auto shifted = [&](Mask local) {
    return g_local(local) - alpha * popcount(local);
  };
  sc.calls++;
  auto [A, val] = (*sc.sfm)(shifted, kk);
  const double ctol = 1e-9 * (1.0 + std::abs(g_full));
  // The empty set and the full interval both score exactly zero, so any
  // exact answer is <= 0; anything above is a broken inner oracle.
  if (val > ctol)
    fail(ErrorCategory::oracle_exactness,
         "inner minimizer scored above the empty set");
  if (val >= -ctol) {
    for (int j = 0; j < kk; ++j) sc.z(positions[j]) = alpha;
    return;
  }
  if (A == 0 || A == full_local)
    fail(ErrorCategory::oracle_exactness,
         "inner minimizer inconsistent with its reported value");
  std::vector<int> in, out;
  for (int j = 0; j < kk; ++j) {
    if (A & (Mask(1) << j))
      in.push_back(positions[j]);
    else
      out.push_back(positions[j]);
  }
  dc_solve(sc, in, base);
  dc_solve(sc, out, base | expand(A));
}

}  // namespace

BasePoint quad_oracle_from_sfm(const SubmodularPotential& pot,
                               const Eigen::VectorXd& w, const MaskSfmFn& sfm) {
  const int k = pot.arity();
  if (w.size() != k)
    fail(ErrorCategory::invalid_input, "weight size != arity");
  MaskSfmFn fallback = sfm;
  if (!fallback)
    fallback = [](const MaskValueFn& fn, int kk) {
      return brute_force_mask_min(fn, kk);
    };
  DcScratch sc;
  sc.pot = &pot;
  sc.w = &w;
  sc.sfm = &fallback;
  sc.z = Eigen::VectorXd::Zero(k);
  std::vector<int> all(k);
  std::iota(all.begin(), all.end(), 0);
  dc_solve(sc, all, 0);
  BasePoint y = sc.z - w;
  const double tot = pot.value(pot.full_mask()) + w.sum();
  if (std::abs(sc.z.sum() - tot) > 1e-6 * (1.0 + std::abs(tot)))
    fail(ErrorCategory::oracle_exactness,
         "level decomposition does not sum to the full value");
  if (k <= 10 && !check_base_membership(pot, y, 1e-6))
    fail(ErrorCategory::oracle_exactness,
         "decomposed point escapes the base polytope");
  // Duality gap at one greedy call: a feasible y minimizes ||y + w||^2 iff
  // <y + w, y> matches the linear minimum over the polytope.
  const Eigen::VectorXd x = y + w;
  const BasePoint s = greedy_vertex(pot, -x);
  const double gap = x.dot(y) - x.dot(s);
  if (gap > 1e-6 * (1.0 + x.squaredNorm()))
    fail(ErrorCategory::oracle_exactness,
         "level decomposition is feasible but not optimal");
  return y;
}

std::pair<std::vector<int>, double> sfm_from_quad_oracle(
    const SubmodularPotential& pot, const Eigen::VectorXd& w,
    const QuadOracleFn& quad, double threshold) {
  const int k = pot.arity();
  if (w.size() != k)
    fail(ErrorCategory::invalid_input, "weight size != arity");
  BasePoint y;
  if (quad) {
    y = quad(pot, w);
  } else if (pot.has_exact_oracle()) {
    y = pot.exact_quad_minimize(w);
  } else {
    y = quad_oracle_from_sfm(pot, w);
  }
  Mask m = 0;
  double wsum = 0;
  for (int p = 0; p < k; ++p) {
    if (y(p) + w(p) < -threshold) {
      m |= Mask(1) << p;
      wsum += w(p);
    }
  }
  return {mask_to_ids(pot, m), pot.value(m) + wsum};
}

}  // namespace dsfm
