#include <cstdlib>
#include <fstream>
#include <sstream>

#include <catch2/catch.hpp>

#include "lncg/engine.hpp"
#include "lncg/experiment.hpp"
#include "lncg/rounding.hpp"

using namespace lncg;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LNCG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Cleanup {
  std::vector<std::string> paths;
  ~Cleanup() {
    for (const auto& p : paths) std::remove(p.c_str());
  }
};

}  // namespace

TEST_CASE("experiment sweep is deterministic and keeps ratios feasible", "[cli]") {
  experiment::ExperimentConfig cfg;
  cfg.m_list = {4};
  cfg.sigma_list = {0.05};
  cfg.reps = 2;
  cfg.gw_trials = 25;
  cfg.master_seed = 515;
  cfg.methods = {"cr-eig", "gw-sdp"};
  std::ostringstream a, b;
  experiment::run_experiment(cfg, a);
  experiment::run_experiment(cfg, b);
  CHECK(experiment::deterministic_body(a.str()) == experiment::deterministic_body(b.str()));

  // Parse the rows: reps x methods of them, all ratios <= 1 + 1e-9.
  std::istringstream in(a.str());
  std::string line;
  int rows = 0;
  bool saw_columns = false;
  while (std::getline(in, line)) {
    if (line.rfind("m,n,group", 0) == 0) {
      saw_columns = true;
      CHECK(line == experiment::csv_columns());
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    rows++;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    REQUIRE(fields.size() == 11);
    const double ratio = std::stod(fields[6]);
    CHECK(ratio <= 1.0 + 1e-9);
    CHECK(ratio > 0.0);
    // Relaxation chain on certified instances: lambda_max >= optimum, so the
    // normalized relaxed energy of the eigenvector method is at least 1.
    if (fields[5] == "cr-eig") CHECK(std::stod(fields[7]) >= 1.0 - 1e-9);
  }
  CHECK(saw_columns);
  CHECK(rows == 2 * 2);
}

TEST_CASE("experiment config validation", "[cli]") {
  experiment::ExperimentConfig cfg;
  cfg.m_list = {};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.methods = {"bogus"};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.m_list = {20};  // 40 qubits under SO(3)
  CHECK_THROWS_AS(cfg.validate(), BudgetError);
}

TEST_CASE("cli gen/solve/round pipeline matches the in-process result", "[cli]") {
  Cleanup files;
  const std::string inst_path = "/tmp/lncg_cli_inst.json";
  const std::string state1 = "/tmp/lncg_cli_state1.txt";
  const std::string state2 = "/tmp/lncg_cli_state2.txt";
  const std::string rounded_path = "/tmp/lncg_cli_rounded.json";
  files.paths = {inst_path, state1, state2, rounded_path};

  REQUIRE(run_cli("gen --m 2 --degree 1 --n 3 --sigma 0.2 --group SO --seed 5 --out " +
                  inst_path) == 0);
  const auto inst = load_instance(inst_path);
  CHECK(inst.graph.m == 2);
  CHECK(inst.seed == 5);

  // Same seed twice: byte-identical state files.
  REQUIRE(run_cli("solve --in " + inst_path + " --solver eig --seed 9 --out " + state1) == 0);
  REQUIRE(run_cli("solve --in " + inst_path + " --solver eig --seed 9 --out " + state2) == 0);
  CHECK(slurp(state1) == slurp(state2));

  // File-based rounding equals the in-process pipeline.
  REQUIRE(run_cli("round --in " + inst_path + " --rounder cr --state " + state1 + " --out " +
                  rounded_path) == 0);
  const auto from_file = rounding::load_rounded(rounded_path, 3);
  const auto ham = build_H(inst);
  const auto eig = engine::max_eigenpair(ham.op, 1e-10, 600, 9);
  const auto in_process = rounding::round_cr(engine::gram_matrix(eig.vector, ham), inst);
  CHECK(from_file.objective_value == in_process.objective_value);
}

TEST_CASE("cli exit codes", "[cli]") {
  Cleanup files;
  const std::string inst_path = "/tmp/lncg_cli_exit.json";
  files.paths = {inst_path, "/tmp/lncg_cli_dummy.out"};

  CHECK(run_cli("gen --m 4 --degree 3 --n 2 --group SO --seed 7 --out " + inst_path) == 0);
  // 1: config errors (missing required flag; unknown solver).
  CHECK(run_cli("gen --m 4") == 1);
  CHECK(run_cli("solve --in " + inst_path + " --solver nosuch --out /tmp/lncg_cli_dummy.out") ==
        1);
  // 2: I/O errors.
  CHECK(run_cli("solve --in /tmp/lncg_no_such_file.json --solver eig --out "
                "/tmp/lncg_cli_dummy.out") == 2);
  // 4: budget exceeded.
  CHECK(run_cli("solve --in " + inst_path +
                " --solver eig --budget 3 --out /tmp/lncg_cli_dummy.out") == 4);
}

TEST_CASE("cli experiment accepts a JSON config file", "[cli]") {
  Cleanup files;
  const std::string cfg_path = "/tmp/lncg_cli_expcfg.json";
  const std::string out1 = "/tmp/lncg_cli_exp1.csv";
  const std::string out2 = "/tmp/lncg_cli_exp2.csv";
  files.paths = {cfg_path, out1, out2};
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({"m_list": [4], "sigma_list": [0.05], "reps": 1, "n": 3, "group": "SO",
               "trials": 20, "seed": 99, "methods": ["cr-eig"], "threads": 1})";
  }
  REQUIRE(run_cli("experiment --config " + cfg_path + " --out " + out1) == 0);
  // The same run through flags produces the same body.
  REQUIRE(run_cli("experiment --m 4 --sigma 0.05 --reps 1 --trials 20 --seed 99 "
                  "--methods cr-eig --threads 1 --out " +
                  out2) == 0);
  CHECK(experiment::deterministic_body(slurp(out1)) ==
        experiment::deterministic_body(slurp(out2)));
}

TEST_CASE("cli alpha writes the documented CSV columns", "[cli]") {
  Cleanup files;
  const std::string path = "/tmp/lncg_cli_alpha.csv";
  files.paths = {path};
  REQUIRE(run_cli("alpha --n 2 --group SO --samples 2000 --seed 3 --out " + path) == 0);
  const std::string text = slurp(path);
  CHECK(text.find("n,group,samples,alpha,alpha_squared,stderr,seed") != std::string::npos);
  CHECK(text.find("2,SO,2000,") != std::string::npos);
}
