#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dsfm/level0.hpp"
#include "dsfm/potentials.hpp"
#include "dsfm/rng.hpp"
#include "test_support.hpp"

using namespace dsfm;

TEST_CASE("exhaustive mask minimization breaks ties lexicographically") {
  const std::vector<double> vals = {3, 1, 4, 1, 5, 9, 2, 6};
  auto [m, v] = brute_force_mask_min([&](Mask s) { return vals[s]; }, 3);
  // Masks 1 and 3 tie at value 1; {0} precedes {0, 1}.
  CHECK(m == 1);
  CHECK(v == 1.0);

  auto [m0, v0] = brute_force_mask_min([](Mask) { return 0.0; }, 3);
  CHECK(m0 == 0);
  CHECK(v0 == 0.0);

  // {1} beats {2} when values tie.
  const std::vector<double> vals2 = {5, 5, -1, 5, -1, 5, 5, 5};
  auto [m2, v2] = brute_force_mask_min([&](Mask s) { return vals2[s]; }, 3);
  CHECK(m2 == 2);
  CHECK(v2 == -1.0);
}

TEST_CASE("weighted minimization over an edge cut") {
  EdgeCutPotential pot(0, 1, 1.0);
  Eigen::VectorXd w(2);
  w << -2.0, 0.0;
  auto [mask, val] = brute_force_sfm(pot, w);
  // f + w over {}, {u}, {v}, {u,v} is 0, -1, 1, -2.
  CHECK(mask == 0b11);
  CHECK(val == doctest::Approx(-2.0));

  w << 0.5, 0.0;
  // f + w over {}, {u}, {v}, {u,v} is 0, 1.5, 1, 0.5: nothing beats empty.
  std::tie(mask, val) = brute_force_sfm(pot, w);
  CHECK(mask == 0);
  CHECK(val == 0.0);
}

TEST_CASE("weighted minimization over a region") {
  RegionPotential pot({0, 1, 2, 3});
  Eigen::VectorXd w(4);
  w << -3.0, -3.0, 0.0, 0.0;
  auto [mask, val] = brute_force_sfm(pot, w);
  // Taking everything cancels the boundary: 0 - 6 beats 4 - 6 at {0, 1}.
  CHECK(mask == 0b1111);
  CHECK(val == doctest::Approx(-6.0));
}

TEST_CASE("weighted minimization matches a direct scan on random tables") {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    auto pot = testutil::random_table(rng, {0, 1, 2, 3});
    Eigen::VectorXd w(4);
    for (int j = 0; j < 4; ++j) w(j) = rng.uniform(-2.0, 2.0);
    auto [mask, val] = brute_force_sfm(*pot, w);
    double best = std::numeric_limits<double>::infinity();
    for (Mask m = 0; m < 16; ++m) {
      double v = pot->value(m);
      for (int j = 0; j < 4; ++j)
        if ((m >> j) & 1) v += w(j);
      best = std::min(best, v);
    }
    CHECK(val == doctest::Approx(best).epsilon(1e-12));
    double at = pot->value(mask);
    for (int j = 0; j < 4; ++j)
      if ((mask >> j) & 1) at += w(j);
    CHECK(at == doctest::Approx(val).epsilon(1e-12));
  }
}

TEST_CASE("min-norm point on simple polytopes") {
  UnaryPotential un(0, 2.0);
  Eigen::VectorXd w1(1);
  w1 << -5.0;
  WolfeStats stats;
  BasePoint y = fujishige_wolfe(un, w1, {}, nullptr, &stats);
  CHECK(y(0) == doctest::Approx(2.0));
  CHECK(stats.converged);

  EdgeCutPotential edge(0, 1, 1.0);
  Eigen::VectorXd w2(2);
  Rng rng(41);
  for (int trial = 0; trial < 40; ++trial) {
    w2 << rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0);
    BasePoint got = fujishige_wolfe(edge, w2);
    BasePoint ref = oracle_edge_cut(edge, w2);
    CHECK((got - ref).lpNorm<Eigen::Infinity>() < 1e-6);
  }
}

TEST_CASE("min-norm point matches projected-gradient reference") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 3 + int(rng.uniform_int(3));  // 3..5
    std::vector<int> ids(k);
    std::iota(ids.begin(), ids.end(), 0);
    auto pot = testutil::random_table(rng, ids);
    Eigen::VectorXd w(k);
    for (int j = 0; j < k; ++j) w(j) = rng.uniform(-2.0, 2.0);

    WolfeStats stats;
    BasePoint y = fujishige_wolfe(*pot, w, {}, nullptr, &stats);
    CHECK(stats.converged);
    CHECK(stats.monotone);
    CHECK(check_base_membership(*pot, y, 1e-7));

    BasePoint ref = testutil::min_norm_reference(*pot, w);
    CHECK((y + w).squaredNorm() <= (ref + w).squaredNorm() + 1e-6);
  }
}

TEST_CASE("min-norm warm start accepts a feasible seed") {
  Rng rng(43);
  auto pot = testutil::random_table(rng, {0, 1, 2, 3});
  Eigen::VectorXd w(4);
  w << 0.3, -1.2, 0.8, -0.1;
  BasePoint cold = fujishige_wolfe(*pot, w);
  Eigen::VectorXd w2 = w;
  w2(1) += 0.05;
  WolfeStats stats;
  BasePoint warm = fujishige_wolfe(*pot, w2, {}, &cold, &stats);
  CHECK(stats.converged);
  BasePoint cold2 = fujishige_wolfe(*pot, w2);
  CHECK((warm + w2).squaredNorm() == doctest::Approx((cold2 + w2).squaredNorm()));
}

TEST_CASE("iteration-capped min-norm reports nonconvergence honestly") {
  Rng rng(44);
  auto pot = testutil::random_table(rng, {0, 1, 2, 3, 4});
  Eigen::VectorXd w(5);
  for (int j = 0; j < 5; ++j) w(j) = rng.uniform(-2.0, 2.0);
  WolfeOptions opts;
  opts.max_major = 1;
  WolfeStats stats;
  fujishige_wolfe(*pot, w, opts, nullptr, &stats);
  CHECK(stats.major_cycles <= 1);
  // One major cycle cannot certify the gap target in general.
  if (stats.gap > opts.eps / 2) CHECK_FALSE(stats.converged);
}

TEST_CASE("quadratic oracle from weighted minimization is exact") {
  Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 3 + int(rng.uniform_int(3));
    std::vector<int> ids(k);
    std::iota(ids.begin(), ids.end(), 0);
    auto pot = testutil::random_table(rng, ids);
    Eigen::VectorXd w(k);
    for (int j = 0; j < k; ++j) w(j) = rng.uniform(-2.0, 2.0);

    int calls = 0;
    MaskSfmFn counted = [&](const MaskValueFn& fn, int kk) {
      ++calls;
      return brute_force_mask_min(fn, kk);
    };
    BasePoint y = quad_oracle_from_sfm(*pot, w, counted);
    CHECK(calls <= 2 * k);
    CHECK(check_base_membership(*pot, y, 1e-7));
    BasePoint ref = testutil::min_norm_reference(*pot, w);
    CHECK((y + w).squaredNorm() <= (ref + w).squaredNorm() + 1e-6);
  }
}

TEST_CASE("quadratic oracle matches the region closed form exactly") {
  Rng rng(52);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 3 + int(rng.uniform_int(3));
    std::vector<int> ids(m);
    std::iota(ids.begin(), ids.end(), 0);
    RegionPotential pot(ids);
    Eigen::VectorXd w(m);
    for (int j = 0; j < m; ++j) w(j) = rng.uniform(-3.0, 3.0);
    BasePoint a = quad_oracle_from_sfm(pot, w);
    BasePoint b = oracle_region(pot, w);
    CHECK((a - b).lpNorm<Eigen::Infinity>() < 1e-8);
  }
}

TEST_CASE("a lying inner minimizer is caught, not propagated") {
  RegionPotential pot({0, 1, 2});
  Eigen::VectorXd w(3);
  // Skewed enough that the true level decomposition cannot be flat.
  w << -5.0, 0.0, 0.0;

  // Claims every interval is flat; the resulting point leaves the polytope.
  MaskSfmFn flat_liar = [](const MaskValueFn&, int) {
    return std::pair<Mask, double>{0, 0.0};
  };
  try {
    quad_oracle_from_sfm(pot, w, flat_liar);
    FAIL("expected an oracle exactness error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::oracle_exactness);
  }

  // Claims a negative minimum on a set that cannot produce one.
  MaskSfmFn split_liar = [](const MaskValueFn&, int kk) {
    return std::pair<Mask, double>{(Mask(1) << kk) - 1, -1.0};
  };
  try {
    quad_oracle_from_sfm(pot, w, split_liar);
    FAIL("expected an oracle exactness error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::oracle_exactness);
  }

  // Claims a positive minimum, which the empty set always beats.
  MaskSfmFn high_liar = [](const MaskValueFn&, int) {
    return std::pair<Mask, double>{1, 1.0};
  };
  try {
    quad_oracle_from_sfm(pot, w, high_liar);
    FAIL("expected an oracle exactness error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::oracle_exactness);
  }
}

TEST_CASE("weighted minimization from the quadratic oracle") {
  Rng rng(53);
  for (int trial = 0; trial < 25; ++trial) {
    const int k = 3 + int(rng.uniform_int(3));
    std::vector<int> ids(k);
    std::iota(ids.begin(), ids.end(), 0);
    auto pot = testutil::random_table(rng, ids);
    Eigen::VectorXd w(k);
    for (int j = 0; j < k; ++j) w(j) = rng.uniform(-2.0, 2.0);

    auto [ids_got, val_got] = sfm_from_quad_oracle(*pot, w);
    auto [mask_ref, val_ref] = brute_force_sfm(*pot, w);
    CHECK(val_got == doctest::Approx(val_ref).epsilon(1e-9));
    CHECK(ids_got == mask_to_ids(*pot, mask_ref));
  }

  // Closed-form kinds route through their exact oracle.
  RegionPotential region({0, 1, 2, 3});
  Eigen::VectorXd w(4);
  w << -3.0, -3.0, 0.0, 0.0;
  auto [ids_got, val_got] = sfm_from_quad_oracle(region, w);
  CHECK(val_got == doctest::Approx(-6.0));
  CHECK(ids_got == std::vector<int>{0, 1, 2, 3});
}
