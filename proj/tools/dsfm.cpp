// Command-line front end: solve, ingest, bench, diagnose, validate.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsfm/base_polytope.hpp"
#include "dsfm/bench.hpp"
#include "dsfm/diagnostics.hpp"
#include "dsfm/flow.hpp"
#include "dsfm/gradient.hpp"
#include "dsfm/image.hpp"
#include "dsfm/instance_io.hpp"
#include "dsfm/parallel.hpp"
#include "dsfm/rng.hpp"

using namespace dsfm;

namespace {

int exit_code_for(ErrorCategory cat) {
  switch (cat) {
    case ErrorCategory::invalid_input: return 2;
    case ErrorCategory::parse: return 3;
    case ErrorCategory::validation: return 4;
    case ErrorCategory::capability: return 5;
    case ErrorCategory::oracle_exactness: return 6;
    case ErrorCategory::convergence: return 7;
    case ErrorCategory::internal: return 8;
  }
  return 8;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

// Shared oracle-policy flags. The base policy follows the solver family;
// explicit flags override it.
struct OracleFlags {
  std::vector<std::string> routes;
  double wolfe_eps = 0;
  int wolfe_max_major = -1;
  bool no_warm = false;

  void attach(CLI::App* cmd) {
    cmd->add_option(
        "--oracle", routes,
        "route override kind=route; kind is default|unary|edge_cut|square|"
        "region|table|custom, route is specialized|wolfe|brute");
    cmd->add_option("--wolfe-eps", wolfe_eps,
                    "duality-gap target for Wolfe oracle calls");
    cmd->add_option("--wolfe-max-major", wolfe_max_major,
                    "cap on Wolfe major cycles (0 = run to the gap target); "
                    "a capped stack is not certified exact");
    cmd->add_flag("--no-warm", no_warm, "disable Wolfe warm starts");
  }

  OraclePolicy build(bool flow_family) const {
    OraclePolicy policy = flow_family ? OraclePolicy::flow_defaults()
                                      : OraclePolicy::gradient_defaults();
    for (const auto& spec : routes) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos)
        fail(ErrorCategory::invalid_input,
             "--oracle expects kind=route, got '" + spec + "'");
      const std::string kind = spec.substr(0, eq);
      const std::string route = spec.substr(eq + 1);
      OracleRoute r;
      if (route == "specialized")
        r = OracleRoute::specialized;
      else if (route == "wolfe")
        r = OracleRoute::wolfe;
      else if (route == "brute")
        r = OracleRoute::brute;
      else
        fail(ErrorCategory::invalid_input,
             "unknown oracle route '" + route + "'");
      if (kind == "default") {
        for (auto& slot : policy.route) slot = r;
        continue;
      }
      bool found = false;
      for (int k = 0; k < kNumKinds; ++k)
        if (kind == kind_name(static_cast<Kind>(k))) {
          policy.route[k] = r;
          found = true;
        }
      if (!found)
        fail(ErrorCategory::invalid_input,
             "unknown potential kind '" + kind + "'");
    }
    if (wolfe_eps > 0) policy.wolfe_eps = wolfe_eps;
    if (wolfe_max_major >= 0) policy.wolfe_max_major = wolfe_max_major;
    if (no_warm) policy.wolfe_warm_start = false;
    return policy;
  }
};

Eigen::Vector3d parse_color(const std::string& text) {
  Eigen::Vector3d c;
  char sep1 = 0, sep2 = 0;
  std::istringstream in(text);
  if (!(in >> c(0) >> sep1 >> c(1) >> sep2 >> c(2)) || sep1 != ',' ||
      sep2 != ',' || (in >> std::ws, !in.eof()))
    fail(ErrorCategory::invalid_input,
         "expected a color r,g,b with components in [0, 1], got '" + text +
             "'");
  for (int j = 0; j < 3; ++j)
    if (c(j) < 0 || c(j) > 1)
      fail(ErrorCategory::invalid_input,
           "color component " + format_float(c(j)) + " outside [0, 1]");
  return c;
}

void write_solve_report(const std::string& path, const DecomposableInstance& inst,
                        const SolveReport& rep) {
  nlohmann::json by_kind = nlohmann::json::object();
  for (int k = 0; k < kNumKinds; ++k)
    if (rep.oracle_calls_by_kind[k] > 0)
      by_kind[kind_name(static_cast<Kind>(k))] = rep.oracle_calls_by_kind[k];
  nlohmann::json doc = {
      {"schema", "dsfm-report 1"},
      {"solver", rep.solver},
      {"n", inst.n()},
      {"r", inst.r()},
      {"value", rep.value},
      {"certificate_gap", rep.certificate_gap},
      {"iterations", rep.iterations},
      {"oracle_calls", rep.oracle_calls},
      {"oracle_calls_by_kind", by_kind},
      {"wall_time_s", rep.wall_time_s},
      {"certified", rep.certified},
      {"converged", rep.converged},
      {"seed", rep.seed},
      {"augmentations", rep.augmentations},
      {"capacity_queries", rep.capacity_queries},
      {"minimizer", rep.minimizer},
  };
  if (std::isfinite(rep.continuous_objective))
    doc["continuous_objective"] = rep.continuous_objective;
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCategory::invalid_input, "cannot open '" + path + "'");
  out << doc.dump(2) << "\n";
}

int cmd_solve(const std::string& instance_path, const std::string& solver,
              std::int64_t iterations, std::uint64_t seed,
              const OracleFlags& oflags, double deficit_tol, bool strict,
              const std::string& report_path) {
  if (!is_known_solver(solver))
    fail(ErrorCategory::invalid_input,
         "unknown solver '" + solver + "' (ekd | ibfs | rcdm | acdm | ap)");
  const DecomposableInstance inst = load_instance(instance_path);
  const OraclePolicy policy = oflags.build(is_flow_solver(solver));
  OracleSet oracles(inst, policy);
  if (is_flow_solver(solver) && !oracles.all_certified() && !strict)
    std::cerr << "warning: flow solver over an uncertified oracle stack; "
                 "the result is best-effort (use --strict to refuse)\n";
  if (iterations == 0)
    iterations = solver == "ap" ? 1000 : std::int64_t(1000) * inst.r();
  const SolveReport rep = run_named_solver(solver, inst, oracles, iterations,
                                           seed, deficit_tol, strict);
  std::cout << "solver " << rep.solver << "\n";
  std::cout << "n " << inst.n() << "\n";
  std::cout << "r " << inst.r() << "\n";
  std::cout << "value " << format_float(rep.value) << "\n";
  std::cout << "gap " << format_float(rep.certificate_gap) << "\n";
  std::cout << "certified " << (rep.certified ? "yes" : "no") << "\n";
  std::cout << "converged " << (rep.converged ? "yes" : "no") << "\n";
  std::cout << "iterations " << rep.iterations << "\n";
  std::cout << "oracle_calls " << rep.oracle_calls << "\n";
  std::cout << "time_s " << fmt("%.6f", rep.wall_time_s) << "\n";
  std::cout << "minimizer_size " << rep.minimizer.size() << "\n";
  std::cout << "minimizer";
  for (int v : rep.minimizer) std::cout << " " << v;
  std::cout << "\n";
  if (!report_path.empty()) write_solve_report(report_path, inst, rep);
  return 0;
}

int cmd_ingest(const std::string& image_path, const std::string& out_path,
               const IngestParams& params) {
  const Image img = load_pnm(image_path);
  const DecomposableInstance inst = image_to_instance(img, params);
  save_instance(out_path, inst);
  int counts[kNumKinds] = {};
  for (int i = 0; i < inst.r(); ++i)
    ++counts[static_cast<int>(inst.potential(i).kind())];
  std::cout << "wrote " << out_path << ": n=" << inst.n() << " r=" << inst.r();
  for (int k = 0; k < kNumKinds; ++k)
    if (counts[k] > 0)
      std::cout << " " << kind_name(static_cast<Kind>(k)) << "=" << counts[k];
  std::cout << "\n";
  return 0;
}

int cmd_bench(const std::string& config_path, const std::string& instance_path,
              const std::string& records_path) {
  const BenchmarkConfig cfg = load_benchmark_config(config_path);
  const DecomposableInstance inst = load_instance(instance_path);
  const BenchmarkResult res = run_benchmark(cfg, inst);
  print_benchmark_table(std::cout, res);
  if (!records_path.empty()) {
    std::ofstream out(records_path, std::ios::trunc);
    if (!out)
      fail(ErrorCategory::invalid_input, "cannot open '" + records_path + "'");
    write_benchmark_json(out, res);
    std::cout << "records written to " << records_path << "\n";
  }
  return 0;
}

int cmd_diagnose(const std::string& instance_path, int samples,
                 std::uint64_t seed, const DiagnosticsOptions& opts) {
  const DecomposableInstance inst = load_instance(instance_path);
  OracleSet oracles(inst, OraclePolicy::flow_defaults());
  const DiagnosticsContext ctx = make_diagnostics(inst, oracles, opts);
  std::cout << "minimum norm point: l2 " << fmt("%.6g", ctx.sstar.norm())
            << ", duality gap " << fmt("%.3g", ctx.precision_reached)
            << " (target " << fmt("%.3g", opts.precision) << ")\n";

  const TransportReport tr =
      decompose_transport(ctx, oracles, BlockVector::greedy_init(inst));
  std::cout << "transport from the greedy start: moved l2 "
            << fmt("%.6g", tr.moved_l2) << " (bound "
            << fmt("%.6g", tr.bound_l2) << "), aggregate misfit l1 "
            << fmt("%.3g", tr.discrepancy_l1) << ", within bounds "
            << (tr.within_bounds ? "yes" : "no") << ", augmentations "
            << tr.augmentations << "\n";

  const KappaStats kappa = estimate_kappa(ctx, oracles, samples, seed);
  std::cout << "conditioning: " << kappa.ratios.size() << " samples ("
            << kappa.product_samples << " product, " << kappa.affine_samples
            << " affine), max certified ratio " << fmt("%.6g", kappa.max_ratio)
            << ", bound " << fmt("%.6g", kappa.bound) << ", violations "
            << kappa.violations << "\n";

  const EllStats ell = check_ell(ctx, oracles, samples, seed + 1);
  std::cout << "subspace regularity: " << ell.checked
            << " samples, max ratio " << fmt("%.6g", ell.max_ratio)
            << " (limit 1), modulus bound " << fmt("%.6g", ell.modulus_bound)
            << ", violations " << ell.violations << "\n";
  return (kappa.violations == 0 && ell.violations == 0) ? 0 : 1;
}

int cmd_validate(const std::string& instance_path, int shifts,
                 std::uint64_t seed) {
  const DecomposableInstance inst = load_instance(instance_path);
  std::mutex mu;
  std::vector<std::string> problems;
  std::int64_t probes = 0;
  parallel_for(0, inst.r(), [&](int i) {
    const auto& pot = inst.potential(i);
    std::vector<std::string> local;
    if (pot.arity() <= 12) {
      Mask x = 0, y = 0;
      if (!submodularity_witness(pot, &x, &y))
        local.push_back("potential " + std::to_string(i) +
                        " is not submodular");
    }
    std::int64_t local_probes = 0;
    if (pot.arity() <= 20) {
      Rng rng(seed ^ (0x9e3779b97f4a7c15ull * (i + 1)));
      for (int t = 0; t < shifts; ++t) {
        Eigen::VectorXd w(pot.arity());
        for (int j = 0; j < w.size(); ++j) w(j) = rng.normal();
        if (!check_base_membership(pot, greedy_vertex(pot, w)))
          local.push_back("potential " + std::to_string(i) +
                          ": greedy vertex left the base polytope");
        ++local_probes;
      }
    }
    std::lock_guard<std::mutex> lock(mu);
    probes += local_probes;
    for (auto& p : local) problems.push_back(std::move(p));
  });
  if (!problems.empty()) {
    std::string joined = problems[0];
    for (std::size_t j = 1; j < std::min<std::size_t>(problems.size(), 5); ++j)
      joined += "; " + problems[j];
    fail(ErrorCategory::validation, joined);
  }
  std::cout << "ok: n=" << inst.n() << " r=" << inst.r() << ", " << probes
            << " membership probes\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decomposable submodular function minimization toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "dsfm 1.0");

  // solve
  auto* solve = app.add_subcommand("solve", "minimize an instance file");
  std::string solve_instance, solve_solver = "ekd", solve_report;
  std::int64_t solve_iterations = 0;
  std::uint64_t solve_seed = 0;
  double solve_deficit_tol = 1e-9;
  bool solve_strict = false;
  OracleFlags solve_oracles;
  solve->add_option("instance", solve_instance, "instance file")->required();
  solve->add_option("--solver", solve_solver,
                    "ekd | ibfs | rcdm | acdm | ap (default ekd)");
  solve->add_option("--iterations", solve_iterations,
                    "gradient budget: coordinate steps, or rounds for ap "
                    "(0 = 1000r steps / 1000 rounds)");
  solve->add_option("--seed", solve_seed, "sampling seed");
  solve->add_option("--deficit-tol", solve_deficit_tol,
                    "aggregate tolerance for the flow solvers");
  solve->add_flag("--strict", solve_strict,
                  "refuse flow solving over uncertified oracle stacks");
  solve->add_option("--report", solve_report,
                    "write a machine-readable report document here");
  solve_oracles.attach(solve);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "image (P5/P6) -> instance file");
  std::string ingest_image, ingest_out, ingest_fg = "1,1,1", ingest_bg = "0,0,0";
  IngestParams ingest_params;
  ingest->add_option("image", ingest_image, "binary PGM/PPM, 8-bit")->required();
  ingest->add_option("--output,-o", ingest_out, "instance file to write")
      ->required();
  ingest->add_option("--lambda-pair", ingest_params.lambda_pair,
                     "8-neighbor cut strength (0 disables)");
  ingest->add_option("--lambda-square", ingest_params.lambda_square,
                     "2x2 square strength (0 disables)");
  ingest->add_option("--regions", ingest_params.region_count,
                     "number of grown regions");
  ingest->add_option("--region-size", ingest_params.region_size,
                     "pixels per region (2..30)");
  ingest->add_option("--seed", ingest_params.seed, "region placement seed");
  ingest->add_option("--fg", ingest_fg, "foreground reference color r,g,b");
  ingest->add_option("--bg", ingest_bg, "background reference color r,g,b");

  // bench
  auto* bench = app.add_subcommand("bench", "run the benchmark protocol");
  std::string bench_config, bench_instance, bench_records;
  bench->add_option("config", bench_config, "JSON protocol config")->required();
  bench->add_option("instance", bench_instance, "instance file")->required();
  bench->add_option("--output,-o", bench_records,
                    "write machine-readable run records here");

  // diagnose
  auto* diagnose =
      app.add_subcommand("diagnose", "conditioning and transport statistics");
  std::string diag_instance;
  int diag_samples = 100;
  std::uint64_t diag_seed = 1;
  DiagnosticsOptions diag_opts;
  diag_opts.precision = 1e-10;
  diagnose->add_option("instance", diag_instance, "instance file")->required();
  diagnose->add_option("--samples", diag_samples, "probe count per statistic");
  diagnose->add_option("--seed", diag_seed, "probe seed");
  diagnose->add_option("--precision", diag_opts.precision,
                       "duality-gap target for the minimum norm point");
  diagnose->add_option("--tau", diag_opts.tau,
                       "additive slack absorbed by certified comparisons");
  diagnose->add_option("--max-iterations", diag_opts.max_iterations,
                       "iteration ceiling for the minimum norm point");

  // validate
  auto* validate =
      app.add_subcommand("validate", "submodularity and membership checks");
  std::string val_instance;
  int val_shifts = 8;
  std::uint64_t val_seed = 0;
  validate->add_option("instance", val_instance, "instance file")->required();
  validate->add_option("--shifts", val_shifts,
                       "random membership probes per potential");
  validate->add_option("--seed", val_seed, "probe seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    std::cerr << "error category=invalid_input message=" << e.what() << "\n";
    return 2;
  }

  try {
    if (*solve)
      return cmd_solve(solve_instance, solve_solver, solve_iterations,
                       solve_seed, solve_oracles, solve_deficit_tol,
                       solve_strict, solve_report);
    if (*ingest) {
      ingest_params.foreground = parse_color(ingest_fg);
      ingest_params.background = parse_color(ingest_bg);
      return cmd_ingest(ingest_image, ingest_out, ingest_params);
    }
    if (*bench) return cmd_bench(bench_config, bench_instance, bench_records);
    if (*diagnose)
      return cmd_diagnose(diag_instance, diag_samples, diag_seed, diag_opts);
    if (*validate) return cmd_validate(val_instance, val_shifts, val_seed);
  } catch (const Error& e) {
    std::cerr << "error category=" << to_string(e.category())
              << " message=" << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error category=internal message=" << e.what() << "\n";
    return exit_code_for(ErrorCategory::internal);
  }
  return 0;
}
