#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dsfm/flow.hpp"
#include "dsfm/potentials.hpp"
#include "dsfm/rng.hpp"
#include "test_support.hpp"

using namespace dsfm;

namespace {

// Direct scan of min{f(S) - x(S) : u in S, v not in S}.
double capacity_by_scan(const SubmodularPotential& pot, const BasePoint& x,
                        int u_pos, int v_pos) {
  double best = std::numeric_limits<double>::infinity();
  for (Mask m = 0; m <= pot.full_mask(); ++m) {
    if (!((m >> u_pos) & 1) || ((m >> v_pos) & 1)) continue;
    double xs = 0;
    for (int p = 0; p < pot.arity(); ++p)
      if ((m >> p) & 1) xs += x(p);
    best = std::min(best, pot.value(m) - xs);
    if (m == pot.full_mask()) break;
  }
  return best;
}

OracleSet exact_oracles(const DecomposableInstance& inst) {
  return OracleSet(inst, OraclePolicy::flow_defaults());
}

void check_flow_report(const DecomposableInstance& inst, const SolveReport& rep,
                       double ref_min, double tol = 1e-7) {
  CHECK(rep.value == doctest::Approx(ref_min).epsilon(tol));
  CHECK(inst.evaluate(rep.minimizer) == doctest::Approx(rep.value));
  CHECK(rep.certificate_gap >= -1e-9);
  CHECK(rep.certificate_gap <= 1e-6);
  CHECK(rep.converged);
}

}  // namespace

TEST_CASE("exchange capacity on an edge cut") {
  EdgeCutPotential pot(0, 1, 1.0);
  Eigen::VectorXd x(2);
  x << 1.0, -1.0;  // greedy vertex, u first
  CHECK(exchange_capacity(pot, x, 0, 1) == doctest::Approx(0.0));
  CHECK(exchange_capacity(pot, x, 1, 0) == doctest::Approx(2.0));
  CHECK(capacity_by_scan(pot, x, 0, 1) == doctest::Approx(0.0));
  CHECK(capacity_by_scan(pot, x, 1, 0) == doctest::Approx(2.0));
}

TEST_CASE("exchange capacity agrees with a direct scan on random tables") {
  Rng rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 3 + int(rng.uniform_int(3));
    std::vector<int> ids(k);
    std::iota(ids.begin(), ids.end(), 0);
    auto pot = testutil::random_table(rng, ids);
    Eigen::VectorXd w(k);
    for (int j = 0; j < k; ++j) w(j) = rng.uniform(-1.0, 1.0);
    BasePoint x = greedy_vertex(*pot, w);
    const int u = int(rng.uniform_int(k));
    int v = int(rng.uniform_int(k));
    while (v == u) v = int(rng.uniform_int(k));
    const double got = exchange_capacity(*pot, x, u, v);
    CHECK(got == doctest::Approx(capacity_by_scan(*pot, x, u, v)).epsilon(1e-9));
    CHECK(got >= -1e-9);  // x stays inside the polytope
  }
}

TEST_CASE("minimal tight set") {
  EdgeCutPotential pot(0, 1, 1.0);
  Eigen::VectorXd x(2);
  x << 1.0, -1.0;
  CHECK(minimal_tight_set(pot, x, 0) == std::vector<int>{0});
  CHECK(minimal_tight_set(pot, x, 1) == std::vector<int>{0, 1});
}

TEST_CASE("augmenting moves mass along a swap sequence") {
  Rng rng(62);
  DecomposableInstance inst = testutil::make_mixed_instance(rng, 6);
  BlockVector x = BlockVector::greedy_init(inst);
  int i = -1;
  for (int j = 0; j < inst.r(); ++j)
    if (inst.potential(j).arity() >= 2) {
      i = j;
      break;
    }
  REQUIRE(i >= 0);
  Eigen::VectorXd before = x.aggregate();
  const auto& sup = inst.potential(i).support();
  augment(x, {PathArc{i, 0, 1}}, 0.5);
  CHECK(x.aggregate()(sup[0]) == doctest::Approx(before(sup[0]) + 0.5));
  CHECK(x.aggregate()(sup[1]) == doctest::Approx(before(sup[1]) - 0.5));
}

TEST_CASE("shortest-path minimization matches exhaustive search") {
  Rng rng(63);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 5 + int(rng.uniform_int(4));  // 5..8
    DecomposableInstance inst = testutil::make_mixed_instance(rng, n);
    auto [ref_ids, ref_min] = testutil::brute_instance_min(inst);
    OracleSet oracles = exact_oracles(inst);
    FlowOptions opts;
    opts.validate_blocks = true;
    FlowStats stats;
    SolveReport rep = solve_flow_ekd(inst, oracles, opts, nullptr, &stats);
    check_flow_report(inst, rep, ref_min);
    if (stats.augmentations > 0) CHECK(stats.capacity_queries > 0);
  }
}

TEST_CASE("bidirectional tree minimization matches exhaustive search") {
  Rng rng(64);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 5 + int(rng.uniform_int(4));
    DecomposableInstance inst = testutil::make_mixed_instance(rng, n);
    auto [ref_ids, ref_min] = testutil::brute_instance_min(inst);
    OracleSet oracles = exact_oracles(inst);
    FlowOptions opts;
    opts.validate_blocks = true;
    SolveReport rep = solve_flow_ibfs(inst, oracles, opts);
    check_flow_report(inst, rep, ref_min);
  }
}

TEST_CASE("flow solvers recover pairwise minimum cuts") {
  Rng rng(65);
  const int W = 4, H = 4;
  testutil::CutModel g;
  g.n = W * H;
  g.unary.resize(g.n);
  for (int p = 0; p < g.n; ++p) g.unary[p] = rng.uniform(-1.5, 1.5);
  for (int yy = 0; yy < H; ++yy)
    for (int xx = 0; xx < W; ++xx) {
      const int p = yy * W + xx;
      if (xx + 1 < W) g.edges.emplace_back(p, p + 1, rng.uniform(0.1, 1.0));
      if (yy + 1 < H) g.edges.emplace_back(p, p + W, rng.uniform(0.1, 1.0));
    }
  auto [ref_min, ref_side] = testutil::mincut_reference(g);
  REQUIRE(testutil::cut_model_value(g, ref_side) == doctest::Approx(ref_min));

  std::vector<std::unique_ptr<SubmodularPotential>> pots;
  for (int p = 0; p < g.n; ++p)
    pots.push_back(std::make_unique<UnaryPotential>(p, g.unary[p]));
  for (auto [p, q, a] : g.edges)
    pots.push_back(std::make_unique<EdgeCutPotential>(p, q, a));
  DecomposableInstance inst(GroundSet(g.n), std::move(pots));

  OracleSet oracles = exact_oracles(inst);
  FlowOptions opts;
  opts.check_labels = true;
  FlowStats stats;
  SolveReport ekd = solve_flow_ekd(inst, oracles, opts, nullptr, &stats);
  check_flow_report(inst, ekd, ref_min);
  CHECK(stats.label_monotone);

  SolveReport ibfs = solve_flow_ibfs(inst, oracles);
  check_flow_report(inst, ibfs, ref_min);
}

TEST_CASE("transport reshapes a product point onto a target aggregate") {
  Rng rng(66);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 6;
    DecomposableInstance inst = testutil::make_mixed_instance(rng, n);
    OracleSet oracles = exact_oracles(inst);

    BlockVector y = BlockVector::greedy_init(inst);
    BlockVector z(inst);
    for (int i = 0; i < inst.r(); ++i) {
      Eigen::VectorXd w(inst.potential(i).arity());
      for (int j = 0; j < w.size(); ++j) w(j) = rng.uniform(-1.0, 1.0);
      z.set_block(i, greedy_vertex(inst.potential(i), w));
    }
    const Eigen::VectorXd target = z.aggregate();

    FlowStats stats;
    BlockVector moved = transport_to_target(inst, oracles, y, target, {}, &stats);
    CHECK((moved.aggregate() - target).lpNorm<Eigen::Infinity>() < 1e-6);
    for (int i = 0; i < inst.r(); ++i)
      if (inst.potential(i).arity() <= 12)
        CHECK(check_base_membership(inst.potential(i), moved.block(i), 1e-6));
    CHECK(stats.cleared);
  }
}

TEST_CASE("strict mode refuses an uncertified oracle stack") {
  Rng rng(67);
  DecomposableInstance inst = testutil::make_mixed_instance(rng, 5);
  OracleSet capped(inst, OraclePolicy::all_wolfe(1e-4, 3, true));
  CHECK_FALSE(capped.all_certified());
  FlowOptions opts;
  opts.strict = true;
  try {
    solve_flow_ekd(inst, capped, opts);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::validation);
  }
  // Without strict mode the run is best effort: either it finishes and the
  // report is flagged uncertified, or the inexactness is caught in flight.
  try {
    SolveReport rep = solve_flow_ekd(inst, capped);
    CHECK_FALSE(rep.certified);
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::oracle_exactness);
  }
}

TEST_CASE("warm-started flow accepts a prior product point") {
  Rng rng(68);
  DecomposableInstance inst = testutil::make_mixed_instance(rng, 6);
  auto [ref_ids, ref_min] = testutil::brute_instance_min(inst);
  OracleSet oracles = exact_oracles(inst);
  SolveReport first = solve_flow_ekd(inst, oracles);
  BlockVector x0 = BlockVector::greedy_init(inst);
  SolveReport again = solve_flow_ibfs(inst, oracles, {}, &x0);
  CHECK(again.value == doctest::Approx(first.value));
  CHECK(first.value == doctest::Approx(ref_min));
}
