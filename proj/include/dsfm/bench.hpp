#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dsfm/oracles.hpp"
#include "dsfm/report.hpp"
#include "dsfm/submodular.hpp"

namespace dsfm {

// Protocol description, loadable from JSON:
//   {
//     "version": 1,
//     "solvers": ["ekd", "ibfs", "rcdm", "acdm", "ap"],
//     "budget_multiples": [5, 10, 100, 1000],
//     "trials": 10,
//     "seed": 0,
//     "strict": false,
//     "deficit_tol": 1e-9,
//     "oracles": {"default": "specialized", "table": "brute"},
//     "wolfe": {"eps": 1e-10, "max_cycles": 0, "warm_start": true}
//   }
// Every key is optional; unknown keys are rejected. Oracle keys are
// "default" or a kind name; routes are specialized | wolfe | brute.
struct BenchmarkConfig {
  std::vector<std::string> solvers = {"ekd", "ibfs", "rcdm", "acdm", "ap"};
  std::vector<int> budget_multiples = {5, 10, 100, 1000};
  int trials = 10;
  std::uint64_t seed = 0;
  bool strict = false;
  double deficit_tol = 1e-9;
  OraclePolicy policy;
};

BenchmarkConfig benchmark_config_from_json(std::istream& in);
BenchmarkConfig load_benchmark_config(const std::string& path);

// One table row: a solver at one iteration budget (budget_multiple == 0 for
// the exact flow solvers, which take no budget). Trials rerun the identical
// seeded computation, so value, gap, and counts are per-run constants and
// only the wall time is averaged.
struct BenchmarkRow {
  std::string solver;
  int budget_multiple = 0;
  std::int64_t iterations = 0;
  int trials_completed = 0;
  double mean_time_s = 0;
  double oracle_calls = 0;
  double value = 0;
  double gap = 0;
  bool certified = false;
  std::vector<std::string> failures;  // "trial k: category=... message=..."
};

struct BenchmarkResult {
  BenchmarkConfig config;
  int n = 0;
  int r = 0;
  std::vector<BenchmarkRow> rows;
};

// Gradient budgets are budget_multiple * r coordinate steps; ap spends the
// same oracle budget as budget_multiple rounds of r projections. Trials run
// sequentially. A trial that throws is recorded on its row and the row is
// marked incomplete; remaining trials still run.
BenchmarkResult run_benchmark(const BenchmarkConfig& config,
                              const DecomposableInstance& inst);

// Fixed-width table, a note line "averaged over N trials", and markers for
// uncertified ("flagged") and incomplete rows.
void print_benchmark_table(std::ostream& out, const BenchmarkResult& result);

// Machine-readable record of the whole run; schema "dsfm-bench 1".
void write_benchmark_json(std::ostream& out, const BenchmarkResult& result);

// One named solver (ekd | ibfs | rcdm | acdm | ap) on a shared oracle set.
// iterations: coordinate steps, or rounds for ap; ignored by flow solvers.
SolveReport run_named_solver(const std::string& name,
                             const DecomposableInstance& inst,
                             const OracleSet& oracles, std::int64_t iterations,
                             std::uint64_t seed, double deficit_tol,
                             bool strict);

bool is_flow_solver(const std::string& name);
bool is_known_solver(const std::string& name);

}  // namespace dsfm
