#include "dsfm/bench.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dsfm/flow.hpp"
#include "dsfm/gradient.hpp"

namespace dsfm {

namespace {

using nlohmann::json;

const char* const kBenchSchema = "dsfm-bench 1";

OracleRoute route_from_name(const std::string& name) {
  if (name == "specialized") return OracleRoute::specialized;
  if (name == "wolfe") return OracleRoute::wolfe;
  if (name == "brute") return OracleRoute::brute;
  fail(ErrorCategory::invalid_input,
       "unknown oracle route '" + name + "' (specialized | wolfe | brute)");
}

const char* route_name(OracleRoute r) {
  switch (r) {
    case OracleRoute::specialized: return "specialized";
    case OracleRoute::wolfe: return "wolfe";
    case OracleRoute::brute: return "brute";
  }
  return "?";
}

bool kind_from_name(const std::string& name, Kind* out) {
  for (int k = 0; k < kNumKinds; ++k)
    if (name == kind_name(static_cast<Kind>(k))) {
      *out = static_cast<Kind>(k);
      return true;
    }
  return false;
}

void apply_oracle_spec(const json& spec, OraclePolicy* policy) {
  if (!spec.is_object())
    fail(ErrorCategory::invalid_input, "config: 'oracles' must be an object");
  // "default" first so per-kind entries override it regardless of key order.
  if (spec.contains("default")) {
    const OracleRoute r = route_from_name(spec["default"].get<std::string>());
    for (auto& route : policy->route) route = r;
  }
  for (const auto& [key, value] : spec.items()) {
    if (key == "default") continue;
    Kind kind;
    if (!kind_from_name(key, &kind))
      fail(ErrorCategory::invalid_input,
           "config: unknown potential kind '" + key + "' under 'oracles'");
    policy->route_for(kind) = route_from_name(value.get<std::string>());
  }
}

}  // namespace

BenchmarkConfig benchmark_config_from_json(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCategory::parse, std::string("config: ") + e.what());
  }
  if (!doc.is_object())
    fail(ErrorCategory::invalid_input, "config: top level must be an object");

  BenchmarkConfig cfg;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "version") {
        if (value.get<int>() != 1)
          fail(ErrorCategory::invalid_input,
               "config: unsupported version " + value.dump());
      } else if (key == "solvers") {
        cfg.solvers = value.get<std::vector<std::string>>();
      } else if (key == "budget_multiples") {
        cfg.budget_multiples = value.get<std::vector<int>>();
      } else if (key == "trials") {
        cfg.trials = value.get<int>();
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "strict") {
        cfg.strict = value.get<bool>();
      } else if (key == "deficit_tol") {
        cfg.deficit_tol = value.get<double>();
      } else if (key == "oracles") {
        apply_oracle_spec(value, &cfg.policy);
      } else if (key == "wolfe") {
        for (const auto& [wk, wv] : value.items()) {
          if (wk == "eps")
            cfg.policy.wolfe_eps = wv.get<double>();
          else if (wk == "max_cycles")
            cfg.policy.wolfe_max_major = wv.get<int>();
          else if (wk == "warm_start")
            cfg.policy.wolfe_warm_start = wv.get<bool>();
          else
            fail(ErrorCategory::invalid_input,
                 "config: unknown key 'wolfe." + wk + "'");
        }
      } else {
        fail(ErrorCategory::invalid_input, "config: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorCategory::invalid_input, std::string("config: ") + e.what());
  }

  if (cfg.solvers.empty())
    fail(ErrorCategory::invalid_input, "config: no solvers listed");
  for (const auto& s : cfg.solvers)
    if (!is_known_solver(s))
      fail(ErrorCategory::invalid_input,
           "config: unknown solver '" + s + "' (ekd | ibfs | rcdm | acdm | ap)");
  if (cfg.trials < 1)
    fail(ErrorCategory::invalid_input, "config: trials must be >= 1");
  for (int b : cfg.budget_multiples)
    if (b < 1)
      fail(ErrorCategory::invalid_input,
           "config: budget multiples must be >= 1");
  if (cfg.budget_multiples.empty())
    fail(ErrorCategory::invalid_input, "config: no budget multiples listed");
  if (cfg.policy.wolfe_eps <= 0 || cfg.policy.wolfe_max_major < 0 ||
      cfg.deficit_tol <= 0)
    fail(ErrorCategory::invalid_input, "config: tolerances must be positive");
  return cfg;
}

BenchmarkConfig load_benchmark_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::invalid_input, "cannot open '" + path + "'");
  try {
    return benchmark_config_from_json(in);
  } catch (const Error& e) {
    fail(e.category(), path + ": " + e.what());
  }
}

bool is_flow_solver(const std::string& name) {
  return name == "ekd" || name == "ibfs";
}

bool is_known_solver(const std::string& name) {
  return is_flow_solver(name) || name == "rcdm" || name == "acdm" ||
         name == "ap";
}

SolveReport run_named_solver(const std::string& name,
                             const DecomposableInstance& inst,
                             const OracleSet& oracles, std::int64_t iterations,
                             std::uint64_t seed, double deficit_tol,
                             bool strict) {
  if (is_flow_solver(name)) {
    FlowOptions fopts;
    fopts.deficit_tol = deficit_tol;
    fopts.strict = strict;
    return name == "ekd" ? solve_flow_ekd(inst, oracles, fopts)
                         : solve_flow_ibfs(inst, oracles, fopts);
  }
  GradientOptions gopts;
  gopts.iterations = iterations;
  gopts.seed = seed;
  if (name == "rcdm") return solve_rcdm(inst, oracles, gopts);
  if (name == "acdm") return solve_acdm(inst, oracles, gopts);
  if (name == "ap") return solve_ap(inst, oracles, gopts);
  fail(ErrorCategory::invalid_input, "unknown solver '" + name + "'");
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config,
                              const DecomposableInstance& inst) {
  BenchmarkResult result;
  result.config = config;
  result.n = inst.n();
  result.r = inst.r();

  for (const auto& solver : config.solvers) {
    std::vector<int> budgets =
        is_flow_solver(solver) ? std::vector<int>{0} : config.budget_multiples;
    for (int mult : budgets) {
      BenchmarkRow row;
      row.solver = solver;
      row.budget_multiple = mult;
      const std::int64_t iterations =
          solver == "ap" ? mult : std::int64_t(mult) * inst.r();
      for (int trial = 0; trial < config.trials; ++trial) {
        OracleSet oracles(inst, config.policy);
        try {
          const SolveReport rep = run_named_solver(
              solver, inst, oracles, iterations, config.seed,
              config.deficit_tol, config.strict);
          row.mean_time_s += rep.wall_time_s;
          row.iterations = rep.iterations;
          row.oracle_calls = static_cast<double>(rep.oracle_calls);
          row.value = rep.value;
          row.gap = rep.certificate_gap;
          row.certified = rep.certified;
          ++row.trials_completed;
        } catch (const Error& e) {
          row.failures.push_back("trial " + std::to_string(trial) +
                                 ": category=" + to_string(e.category()) +
                                 " message=" + e.what());
        }
      }
      if (row.trials_completed > 0) row.mean_time_s /= row.trials_completed;
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

void print_benchmark_table(std::ostream& out, const BenchmarkResult& result) {
  char line[256];
  std::snprintf(line, sizeof(line), "instance: n=%d r=%d\n", result.n,
                result.r);
  out << line;
  std::snprintf(line, sizeof(line), "%-8s %-8s %12s %16s %12s  %s\n", "solver",
                "# iter", "time (s)", "value", "gap", "note");
  out << line;
  for (const auto& row : result.rows) {
    const std::string iter_label =
        row.budget_multiple == 0 ? "-" : std::to_string(row.budget_multiple) + "r";
    std::string note;
    if (row.trials_completed == 0)
      note = "failed";
    else if (!row.failures.empty())
      note = "incomplete (" + std::to_string(row.trials_completed) + "/" +
             std::to_string(result.config.trials) + " trials)";
    else if (!row.certified)
      note = "flagged: oracle stack not certified";
    if (row.trials_completed == 0) {
      std::snprintf(line, sizeof(line), "%-8s %-8s %12s %16s %12s  %s\n",
                    row.solver.c_str(), iter_label.c_str(), "-", "-", "-",
                    note.c_str());
    } else {
      std::snprintf(line, sizeof(line), "%-8s %-8s %12.6f %16.8g %12.4g  %s\n",
                    row.solver.c_str(), iter_label.c_str(), row.mean_time_s,
                    row.value, row.gap, note.c_str());
    }
    out << line;
  }
  out << "averaged over " << result.config.trials << " trials\n";
}

void write_benchmark_json(std::ostream& out, const BenchmarkResult& result) {
  json routes = json::object();
  for (int k = 0; k < kNumKinds; ++k)
    routes[kind_name(static_cast<Kind>(k))] =
        route_name(result.config.policy.route[k]);
  json doc = {
      {"schema", kBenchSchema},
      {"n", result.n},
      {"r", result.r},
      {"config",
       {{"solvers", result.config.solvers},
        {"budget_multiples", result.config.budget_multiples},
        {"trials", result.config.trials},
        {"seed", result.config.seed},
        {"strict", result.config.strict},
        {"deficit_tol", result.config.deficit_tol},
        {"oracles", routes},
        {"wolfe",
         {{"eps", result.config.policy.wolfe_eps},
          {"max_cycles", result.config.policy.wolfe_max_major},
          {"warm_start", result.config.policy.wolfe_warm_start}}}}},
      {"rows", json::array()},
  };
  for (const auto& row : result.rows) {
    json jr = {
        {"solver", row.solver},
        {"budget_multiple", row.budget_multiple},
        {"iterations", row.iterations},
        {"trials_completed", row.trials_completed},
        {"mean_time_s", row.mean_time_s},
        {"oracle_calls", row.oracle_calls},
        {"certified", row.certified},
        {"failures", row.failures},
    };
    if (row.trials_completed > 0) {
      jr["value"] = row.value;
      jr["gap"] = row.gap;
    }
    doc["rows"].push_back(std::move(jr));
  }
  out << doc.dump(2) << "\n";
}

}  // namespace dsfm
