#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

// DSFM_CLI and DSFM_FIXTURES are injected by the build.

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string out_path = "cli_stdout_" + std::to_string(counter);
  const std::string err_path = "cli_stderr_" + std::to_string(counter);
  ++counter;
  const std::string cmd = std::string(DSFM_CLI) + " " + args + " > " +
                          out_path + " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

std::string fixture(const std::string& name) {
  return std::string(DSFM_FIXTURES) + "/" + name;
}

// Value of the "key v" line in the solve output.
double field(const std::string& out, const std::string& key) {
  const auto at = out.find(key + " ");
  REQUIRE(at != std::string::npos);
  return std::stod(out.substr(at + key.size() + 1));
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::trunc) << text;
}

}  // namespace

TEST_CASE("validate accepts the bundled cut instance") {
  const CliResult r = run_cli("validate " + fixture("mincut_small.dsfm"));
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("ok: n=9 r=21") != std::string::npos);
}

TEST_CASE("validate rejects the supermodular fixture") {
  const CliResult r = run_cli("validate " + fixture("supermodular.dsfm"));
  CHECK(r.exit_code == 4);
  CHECK(r.err.find("error category=validation") != std::string::npos);
  CHECK(r.err.find("not submodular") != std::string::npos);
  CHECK(r.out == "");
}

TEST_CASE("solve prints value and a zero gap on the cut fixture") {
  const CliResult r =
      run_cli("solve " + fixture("mincut_small.dsfm") + " --solver ibfs");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("value -1.8") != std::string::npos);
  CHECK(r.out.find("gap 0\n") != std::string::npos);
  CHECK(r.out.find("certified yes") != std::string::npos);
  CHECK(r.out.find("minimizer 0 1\n") != std::string::npos);
}

TEST_CASE("all five solvers land on the same fixture value") {
  for (const char* solver : {"ekd", "ibfs", "rcdm", "acdm", "ap"}) {
    CAPTURE(solver);
    const CliResult r = run_cli("solve " + fixture("mincut_small.dsfm") +
                                " --solver " + solver);
    REQUIRE(r.exit_code == 0);
    CHECK(field(r.out, "value") == doctest::Approx(-1.8).epsilon(1e-9));
  }
}

TEST_CASE("solve writes a machine-readable report") {
  const std::string path = "cli_report.json";
  const CliResult r = run_cli("solve " + fixture("mincut_small.dsfm") +
                              " --solver ekd --report " + path);
  REQUIRE(r.exit_code == 0);
  const auto doc = nlohmann::json::parse(slurp(path));
  CHECK(doc["schema"] == "dsfm-report 1");
  CHECK(doc["solver"] == "ekd");
  CHECK(doc["value"].get<double>() == doctest::Approx(-1.8).epsilon(1e-9));
  CHECK(doc["certified"] == true);
  CHECK(doc["minimizer"] == nlohmann::json::array({0, 1}));
  std::remove(path.c_str());
}

TEST_CASE("error lines are machine readable and categorized") {
  CliResult r = run_cli("solve missing_file.dsfm");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("error category=invalid_input") != std::string::npos);

  write_file("cli_broken.dsfm", "dsfm-instance 1\nn 2\nr 1\nblob 0\n");
  r = run_cli("validate cli_broken.dsfm");
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("error category=parse") != std::string::npos);
  CHECK(r.err.find("line 4") != std::string::npos);
  std::remove("cli_broken.dsfm");

  r = run_cli("solve " + fixture("mincut_small.dsfm") + " --mystery-flag");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("error category=invalid_input") != std::string::npos);

  r = run_cli("");
  CHECK(r.exit_code == 2);
}

TEST_CASE("flow over a capped oracle stack warns, and strict refuses") {
  const std::string base = "solve " + fixture("mincut_small.dsfm") +
                           " --solver ekd --oracle default=wolfe "
                           "--wolfe-max-major 1";
  const CliResult soft = run_cli(base);
  CHECK(soft.err.find("warning:") != std::string::npos);
  if (soft.exit_code == 0)
    CHECK(soft.out.find("certified no") != std::string::npos);
  else
    CHECK(soft.err.find("error category=") != std::string::npos);

  const CliResult hard = run_cli(base + " --strict");
  CHECK(hard.exit_code == 4);
  CHECK(hard.err.find("error category=validation") != std::string::npos);
}

TEST_CASE("ingest round trips through validate and solve") {
  const std::string out = "cli_blobs.dsfm";
  const CliResult r =
      run_cli("ingest " + fixture("blobs_32.ppm") + " -o " + out +
              " --lambda-pair 0.4 --fg 0.8,0.2,0.2 --bg 0.3,0.5,0.3");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("n=1024") != std::string::npos);
  CHECK(r.out.find("unary=1024") != std::string::npos);
  CHECK(r.out.find("edge_cut=3906") != std::string::npos);

  CHECK(run_cli("validate " + out).exit_code == 0);
  const CliResult solved = run_cli("solve " + out + " --solver ibfs");
  CHECK(solved.exit_code == 0);
  CHECK(field(solved.out, "gap") <= 1e-9);
  CHECK(solved.out.find("certified yes") != std::string::npos);
  std::remove(out.c_str());
}

TEST_CASE("ingest rejects out-of-range reference colors") {
  const CliResult r = run_cli("ingest " + fixture("blobs_32.ppm") +
                              " -o cli_unused.dsfm --fg 2,0,0");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("outside [0, 1]") != std::string::npos);
}

TEST_CASE("bench emits the protocol table and records") {
  const std::string records = "cli_records.json";
  const CliResult r =
      run_cli("bench " + fixture("bench_protocol.json") + " " +
              fixture("mincut_small.dsfm") + " -o " + records);
  REQUIRE(r.exit_code == 0);
  for (const char* want : {"solver", "5r", "10r", "100r", "1000r",
                           "averaged over 10 trials", "ekd", "ibfs", "ap"})
    CHECK(r.out.find(want) != std::string::npos);
  const auto doc = nlohmann::json::parse(slurp(records));
  CHECK(doc["schema"] == "dsfm-bench 1");
  CHECK(doc["rows"].size() == 2 + 3 * 4);
  std::remove(records.c_str());
}

TEST_CASE("bench splits the solver families under a capped stack") {
  write_file("cli_capped.json", R"({
    "solvers": ["ekd", "rcdm"],
    "budget_multiples": [20],
    "trials": 2,
    "oracles": {"default": "wolfe"},
    "wolfe": {"eps": 1e-9, "max_cycles": 10, "warm_start": true}
  })");
  const CliResult r = run_cli("bench cli_capped.json " +
                              fixture("region_lattice.dsfm"));
  REQUIRE(r.exit_code == 0);
  CHECK((r.out.find("flagged") != std::string::npos ||
         r.out.find("failed") != std::string::npos ||
         r.out.find("incomplete") != std::string::npos));
  CHECK(r.out.find("rcdm") != std::string::npos);
  std::remove("cli_capped.json");
}

TEST_CASE("diagnose reports clean statistics on the cut fixture") {
  const CliResult r = run_cli("diagnose " + fixture("mincut_small.dsfm") +
                              " --samples 20 --seed 3");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("minimum norm point") != std::string::npos);
  CHECK(r.out.find("conditioning") != std::string::npos);
  CHECK(r.out.find("violations 0") != std::string::npos);
}
