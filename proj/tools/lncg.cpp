// lncg: generate, solve, round and sweep LNCG group-synchronization problems
// (quantum Hamiltonian relaxation + classical SDP baselines).

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lncg/approx_ratio.hpp"
#include "lncg/engine.hpp"
#include "lncg/experiment.hpp"
#include "lncg/hamiltonian.hpp"
#include "lncg/instance.hpp"
#include "lncg/rounding.hpp"
#include "lncg/sdp.hpp"

namespace {

constexpr const char* kToolVersion = lncg::kToolVersion;

// Exit codes: 1 config, 2 I/O, 3 numerical non-convergence, 4 budget.
enum ExitCode { kOk = 0, kConfig = 1, kIo = 2, kNumerical = 3, kBudget = 4 };

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw lncg::IoError("cannot open '" + path + "' for writing");
  return out;
}

struct GenArgs {
  int m = 6;
  int degree = 3;
  int n = 3;
  double sigma = 0.0;
  std::string group = "SO";
  int procrustes_k = 0;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  lncg::ProblemInstance inst;
  if (a.procrustes_k > 0)
    inst = lncg::gen_procrustes(a.m, a.procrustes_k, a.n, lncg::group_from_string(a.group),
                                a.seed);
  else
    inst = lncg::gen_group_sync(a.m, a.degree, a.n, a.sigma, lncg::group_from_string(a.group),
                                a.seed);
  lncg::save_instance(inst, a.out);
  std::cout << "wrote " << a.out << " (m=" << inst.graph.m << ", n=" << inst.n
            << ", group=" << to_string(inst.group) << ", edges=" << inst.graph.edges.size()
            << ")\n";
  return kOk;
}

struct SolveArgs {
  std::string in;
  std::string solver = "eig";
  std::string out;
  double zeta = 0.0;
  double tol = 1e-10;
  int max_iter = 20000;
  double total_time = 1.0;
  int steps = 0;
  int trials = 1000;
  int budget = 22;
  std::uint64_t seed = 1;
  std::string init_from;
};

std::vector<std::string> solve_meta(const SolveArgs& a, const std::string& extra) {
  std::ostringstream cfg;
  cfg << "solver=" << a.solver << " zeta=" << a.zeta << " tol=" << a.tol
      << " T=" << a.total_time << " steps=" << a.steps << " seed=" << a.seed
      << " budget=" << a.budget;
  return {std::string("tool: ") + kToolVersion, "config: " + cfg.str(),
          std::string("rng: ") + lncg::Rng::kAlgorithm, extra};
}

int cmd_solve(const SolveArgs& a) {
  const auto inst = lncg::load_instance(a.in);
  if (a.solver == "sdp" || a.solver == "convsdp") {
    lncg::sdp::SolverConfig cfg;
    cfg.tol_primal = cfg.tol_dual = std::max(a.tol, 1e-9);
    cfg.max_iter = a.max_iter;
    const auto sol = a.solver == "sdp" ? lncg::sdp::solve_basic(inst, cfg)
                                       : lncg::sdp::solve_conv_so(inst, cfg);
    lncg::sdp::save_sdp_solution(sol, cfg, a.solver, a.out);
    std::cout << "objective " << sol.objective << " rank " << sol.numerical_rank << " after "
              << sol.iterations << " iterations -> " << a.out << "\n";
    return kOk;
  }
  const auto ham = lncg::build_H(inst, a.budget);
  if (a.solver == "eig") {
    const auto h = a.zeta > 0 ? lncg::regularize(ham, a.zeta) : ham;
    const auto eig = lncg::engine::max_eigenpair(h.op, a.tol, 600, a.seed);
    std::ostringstream extra;
    extra << "eigenvalue: " << std::setprecision(17) << eig.value
          << " iterations: " << eig.iterations;
    lncg::engine::save_state(eig.vector, a.out, solve_meta(a, extra.str()));
    std::cout << "eigenvalue " << std::setprecision(15) << eig.value << " in "
              << eig.iterations << " iterations -> " << a.out << "\n";
    return kOk;
  }
  if (a.solver == "anneal") {
    std::vector<lncg::MatrixXd> init;
    if (!a.init_from.empty()) {
      init = lncg::rounding::load_rounded(a.init_from, inst.n).matrices;
    } else {
      const auto basic = lncg::sdp::solve_basic(inst);
      const auto factors = lncg::sdp::factorize(basic.M, inst.n);
      lncg::Rng rng(a.seed);
      init = lncg::rounding::round_gw(factors, inst, a.trials, rng).matrices;
    }
    auto [psi0, h_i] = lncg::engine::initial_product_state(inst, init);
    int steps = 0;
    const auto h = a.zeta > 0 ? lncg::regularize(ham, a.zeta) : ham;
    const auto psi = lncg::engine::evolve(h_i, h.op, {a.total_time, a.steps}, psi0, &steps);
    const double energy =
        lncg::engine::checked_real(h.op.expectation(psi.amplitudes), "anneal");
    std::ostringstream extra;
    extra << "energy: " << std::setprecision(17) << energy << " steps: " << steps
          << " integrator: rk4-fixed-step";
    lncg::engine::save_state(psi, a.out, solve_meta(a, extra.str()));
    std::cout << "annealed energy " << std::setprecision(15) << energy << " with " << steps
              << " steps -> " << a.out << "\n";
    return kOk;
  }
  throw lncg::ConfigError("unknown solver '" + a.solver + "'");
}

struct RoundArgs {
  std::string in;
  std::string rounder = "cr";
  std::string state;
  std::string solution;
  std::string out;
  int trials = 1000;
  int budget = 22;
  std::uint64_t seed = 1;
};

int cmd_round(const RoundArgs& a) {
  const auto inst = lncg::load_instance(a.in);
  lncg::rounding::RoundedSolution sol;
  if (a.rounder == "gw") {
    if (a.solution.empty()) throw lncg::ConfigError("round --rounder gw needs --solution");
    const auto sdp_sol = lncg::sdp::load_sdp_solution(a.solution);
    const auto factors = lncg::sdp::factorize(sdp_sol.M, inst.n);
    lncg::Rng rng(a.seed);
    sol = lncg::rounding::round_gw(factors, inst, a.trials, rng);
  } else if (a.rounder == "cr" || a.rounder == "vr") {
    if (a.state.empty()) throw lncg::ConfigError("round --rounder cr/vr needs --state");
    const auto psi = lncg::engine::load_state(a.state);
    const auto ham = lncg::build_H(inst, a.budget);
    if (psi.dim != ham.total_dim)
      throw lncg::ConfigError("state dimension does not match the instance");
    if (a.rounder == "cr") {
      sol = lncg::rounding::round_cr(lncg::engine::gram_matrix(psi, ham), inst);
    } else {
      lncg::ExpectationReport rep;
      for (int v = 0; v < inst.graph.m; ++v)
        rep.vertex_moments.push_back(
            lncg::engine::vertex_moments(psi, inst.graph.m, inst.n, inst.group, v));
      sol = lncg::rounding::round_vr(rep, inst);
    }
  } else {
    throw lncg::ConfigError("unknown rounder '" + a.rounder + "'");
  }
  lncg::rounding::save_rounded(sol, a.out);
  std::cout << sol.method << " objective " << std::setprecision(15) << sol.objective_value
            << " -> " << a.out << "\n";
  return kOk;
}

struct AlphaArgs {
  std::vector<int> n_list = {3};
  std::string group = "SO";
  std::int64_t samples = 1000000;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_alpha(const AlphaArgs& a) {
  std::ostringstream body;
  body << lncg::approx_ratio::csv_header() << "\n";
  for (int n : a.n_list) {
    const auto est =
        lncg::approx_ratio::mc_alpha(n, lncg::group_from_string(a.group), a.samples, a.seed);
    body << lncg::approx_ratio::csv_row(est) << "\n";
  }
  if (a.out.empty() || a.out == "-") {
    std::cout << body.str();
  } else {
    auto out = open_out(a.out);
    out << "# " << kToolVersion << "\n" << body.str();
    std::cout << "wrote " << a.out << "\n";
  }
  return kOk;
}

struct ExperimentArgs {
  std::string config_path;
  std::string out;
  bool no_timestamp = false;
  lncg::experiment::ExperimentConfig cfg;
  std::string group = "SO";
  std::vector<std::string> methods;
  std::vector<int> m_list;
  std::vector<double> sigma_list;
};

lncg::experiment::ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw lncg::IoError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
    lncg::experiment::ExperimentConfig cfg;
    if (j.contains("m_list")) cfg.m_list = j["m_list"].get<std::vector<int>>();
    if (j.contains("sigma_list")) cfg.sigma_list = j["sigma_list"].get<std::vector<double>>();
    if (j.contains("reps")) cfg.reps = j["reps"].get<int>();
    if (j.contains("n")) cfg.n = j["n"].get<int>();
    if (j.contains("group")) cfg.group = lncg::group_from_string(j["group"].get<std::string>());
    if (j.contains("degree")) cfg.degree = j["degree"].get<int>();
    if (j.contains("T")) cfg.total_time = j["T"].get<double>();
    if (j.contains("zeta")) cfg.zeta = j["zeta"].get<double>();
    if (j.contains("trials")) cfg.gw_trials = j["trials"].get<int>();
    if (j.contains("seed")) cfg.master_seed = j["seed"].get<std::uint64_t>();
    if (j.contains("methods")) cfg.methods = j["methods"].get<std::vector<std::string>>();
    if (j.contains("budget")) cfg.qubit_budget = j["budget"].get<int>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw lncg::IoError("invalid experiment config '" + path + "': " + e.what());
  }
}

int cmd_experiment(const ExperimentArgs& a) {
  lncg::experiment::ExperimentConfig cfg =
      a.config_path.empty() ? a.cfg : load_experiment_config(a.config_path);
  if (!a.m_list.empty()) cfg.m_list = a.m_list;
  if (!a.sigma_list.empty()) cfg.sigma_list = a.sigma_list;
  if (!a.methods.empty()) cfg.methods = a.methods;
  if (a.config_path.empty()) cfg.group = lncg::group_from_string(a.group);
  std::ostringstream csv;
  lncg::experiment::run_experiment(cfg, csv, !a.no_timestamp);
  if (a.out.empty() || a.out == "-") {
    std::cout << csv.str();
  } else {
    auto out = open_out(a.out);
    out << csv.str();
    std::cout << "wrote " << a.out << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kToolVersion) +
               " - LNCG quantum relaxation over O(n)/SO(n): instances, solvers, rounding"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* cgen = app.add_subcommand("gen", "generate a problem instance");
  cgen->add_option("--m", gen.m, "vertex count");
  cgen->add_option("--degree", gen.degree, "regular graph degree");
  cgen->add_option("--n", gen.n, "matrix dimension");
  cgen->add_option("--sigma", gen.sigma, "noise strength");
  cgen->add_option("--group", gen.group, "O or SO");
  cgen->add_option("--procrustes-k", gen.procrustes_k,
                   "generate a Procrustes instance with K points per cloud");
  cgen->add_option("--seed", gen.seed, "generator seed");
  cgen->add_option("--out", gen.out, "output instance file")->required();

  SolveArgs solve;
  auto* csolve = app.add_subcommand("solve", "solve a saved instance");
  csolve->add_option("--in", solve.in, "instance file")->required();
  csolve->add_option("--solver", solve.solver, "sdp | convsdp | eig | anneal");
  csolve->add_option("--out", solve.out, "output file (state or SDP solution)")->required();
  csolve->add_option("--zeta", solve.zeta, "one-body regularizer weight");
  csolve->add_option("--tol", solve.tol, "solver tolerance");
  csolve->add_option("--max-iter", solve.max_iter, "SDP iteration cap");
  csolve->add_option("--T", solve.total_time, "annealing time");
  csolve->add_option("--steps", solve.steps, "RK4 steps (0 = automatic)");
  csolve->add_option("--trials", solve.trials, "GW trials for the anneal initial state");
  csolve->add_option("--budget", solve.budget, "qubit budget");
  csolve->add_option("--seed", solve.seed, "seed (Lanczos start / GW initial state)");
  csolve->add_option("--init-from", solve.init_from,
                     "rounded-solution file for the anneal initial state");

  RoundArgs round;
  auto* cround = app.add_subcommand("round", "round a relaxed solution");
  cround->add_option("--in", round.in, "instance file")->required();
  cround->add_option("--rounder", round.rounder, "cr | vr | gw");
  cround->add_option("--state", round.state, "state file (cr/vr)");
  cround->add_option("--solution", round.solution, "SDP solution file (gw)");
  cround->add_option("--trials", round.trials, "GW trials");
  cround->add_option("--budget", round.budget, "qubit budget");
  cround->add_option("--seed", round.seed, "GW seed");
  cround->add_option("--out", round.out, "output rounded-solution file")->required();

  AlphaArgs alpha;
  auto* calpha = app.add_subcommand("alpha", "Monte-Carlo approximation constants");
  calpha->add_option("--n", alpha.n_list, "matrix dimensions");
  calpha->add_option("--group", alpha.group, "O or SO");
  calpha->add_option("--samples", alpha.samples, "Monte-Carlo samples");
  calpha->add_option("--seed", alpha.seed, "seed");
  calpha->add_option("--out", alpha.out, "CSV output path (default stdout)");

  ExperimentArgs exp;
  auto* cexp = app.add_subcommand("experiment", "screened sweep with solver+rounder pipelines");
  cexp->add_option("--config", exp.config_path, "JSON config file (flags override lists)");
  cexp->add_option("--m", exp.m_list, "vertex counts");
  cexp->add_option("--sigma", exp.sigma_list, "noise strengths");
  cexp->add_option("--reps", exp.cfg.reps, "repetitions per cell");
  cexp->add_option("--n", exp.cfg.n, "matrix dimension");
  cexp->add_option("--group", exp.group, "O or SO");
  cexp->add_option("--degree", exp.cfg.degree, "regular graph degree");
  cexp->add_option("--T", exp.cfg.total_time, "annealing time");
  cexp->add_option("--zeta", exp.cfg.zeta, "regularizer for vertex rounding");
  cexp->add_option("--trials", exp.cfg.gw_trials, "GW trials");
  cexp->add_option("--seed", exp.cfg.master_seed, "master seed");
  cexp->add_option("--methods", exp.methods, "cr-eig vr-eig gw-sdp cr-anneal");
  cexp->add_option("--budget", exp.cfg.qubit_budget, "qubit budget");
  cexp->add_option("--threads", exp.cfg.threads, "worker threads");
  cexp->add_flag("--no-timestamp", exp.no_timestamp, "omit the timestamp header line");
  cexp->add_option("--out", exp.out, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
    if (*cgen) return cmd_gen(gen);
    if (*csolve) return cmd_solve(solve);
    if (*cround) return cmd_round(round);
    if (*calpha) return cmd_alpha(alpha);
    if (*cexp) return cmd_experiment(exp);
    return kConfig;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  } catch (const lncg::BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return kBudget;
  } catch (const lncg::ConvergenceError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const lncg::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const lncg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
}
