#pragma once

#include <atomic>
#include <mutex>
#include <chrono>
#include <cmath>
#include <ctime>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lncg/engine.hpp"
#include "lncg/hamiltonian.hpp"
#include "lncg/instance.hpp"
#include "lncg/rounding.hpp"
#include "lncg/sdp.hpp"

namespace lncg {
namespace experiment {

inline const std::vector<std::string> kDefaultMethods = {"cr-eig", "vr-eig", "gw-sdp"};

// Default noise grid: three points on a log10 axis.
inline std::vector<double> default_sigma_grid() {
  return {std::pow(10.0, -1.5), std::pow(10.0, -1.0), std::pow(10.0, -0.5)};
}

struct ExperimentConfig {
  std::vector<int> m_list = {4, 6};
  std::vector<double> sigma_list = default_sigma_grid();
  int reps = 50;
  int n = 3;
  Group group = Group::SO;
  int degree = 3;
  double total_time = 1.0;  // annealing T
  double zeta = 1e-6;
  int gw_trials = 1000;
  std::uint64_t master_seed = 1;
  std::vector<std::string> methods = kDefaultMethods;
  int qubit_budget = 22;
  int screen_max_retries = 25;
  sdp::SolverConfig sdp_cfg = {1.0, 1e-7, 1e-7, 200000, true};
  int threads = 2;

  void validate() const {
    if (m_list.empty() || sigma_list.empty() || reps < 1 || n < 1 || degree < 1 ||
        gw_trials < 1 || methods.empty())
      throw ConfigError("experiment config: empty sweep or nonpositive parameter");
    for (double s : sigma_list)
      if (s < 0) throw ConfigError("experiment config: negative sigma");
    if (total_time <= 0) throw ConfigError("experiment config: T must be positive");
    if (zeta < 0) throw ConfigError("experiment config: zeta must be nonnegative");
    for (const auto& meth : methods)
      if (meth != "cr-eig" && meth != "vr-eig" && meth != "gw-sdp" && meth != "cr-anneal")
        throw ConfigError("experiment config: unknown method '" + meth + "'");
    for (int m : m_list) {
      const std::int64_t qubits =
          static_cast<std::int64_t>(local_site_count(n, group)) * m;
      if (qubits > qubit_budget)
        throw BudgetError("experiment config: m=" + std::to_string(m) + " needs " +
                          std::to_string(qubits) + " qubits, budget is " +
                          std::to_string(qubit_budget));
    }
  }

  std::string echo() const {
    std::ostringstream os;
    os << "m=[";
    for (std::size_t i = 0; i < m_list.size(); ++i) os << (i ? "," : "") << m_list[i];
    os << "] sigma=[";
    for (std::size_t i = 0; i < sigma_list.size(); ++i) os << (i ? "," : "") << sigma_list[i];
    os << "] reps=" << reps << " n=" << n << " group=" << to_string(group)
       << " degree=" << degree << " T=" << total_time << " zeta=" << zeta
       << " trials=" << gw_trials << " seed=" << master_seed << " budget=" << qubit_budget
       << " methods=[";
    for (std::size_t i = 0; i < methods.size(); ++i) os << (i ? "," : "") << methods[i];
    os << "]";
    return os.str();
  }
};

struct ResultRow {
  int m = 0;
  int n = 0;
  Group group = Group::SO;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string method;
  double ratio = 0.0;
  double relaxed_energy_norm = 0.0;
  double optimum = 0.0;
  int iterations = 0;
  std::int64_t wall_ms = 0;
};

struct TaskResult {
  std::vector<ResultRow> rows;
  std::optional<std::string> skip_note;
  int screening_rejections = 0;
};

inline const char* csv_columns() {
  return "m,n,group,sigma,seed,method,ratio,relaxed_energy_norm,optimum,iterations,wall_ms";
}

inline std::string format_row(const ResultRow& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d,%d,%s,%.6g,%llu,%s,%.12g,%.12g,%.12g,%d,%lld", r.m, r.n,
                to_string(r.group), r.sigma, static_cast<unsigned long long>(r.seed),
                r.method.c_str(), r.ratio, r.relaxed_energy_norm, r.optimum, r.iterations,
                static_cast<long long>(r.wall_ms));
  return buf;
}

namespace detail {

inline std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct MethodOutcome {
  double objective = 0.0;
  double relaxed = 0.0;
  int iterations = 0;
  std::int64_t wall_ms = 0;
};

}  // namespace detail

// One (m, sigma, repetition) pipeline: screen an instance until the conv-SDP
// solves it exactly (rank n certificate), take the deterministic rounding of
// that SDP as the optimum, then run the requested solver+rounder methods.
// The reported optimum is clamped to the best feasible objective found so
// that emitted ratios never exceed 1 on certified instances.
inline TaskResult run_task(const ExperimentConfig& cfg, int m, double sigma,
                           std::uint64_t task_seed) {
  TaskResult out;
  ProblemInstance inst;
  sdp::SDPSolution conv_sol;
  bool screened = false;
  std::uint64_t inst_seed = 0;
  for (int attempt = 0; attempt < cfg.screen_max_retries; ++attempt) {
    inst_seed = derive_seed(task_seed, 1000 + static_cast<std::uint64_t>(attempt));
    inst = gen_group_sync(m, cfg.degree, cfg.n, sigma, cfg.group, inst_seed);
    try {
      conv_sol = sdp::solve_conv_so(inst, cfg.sdp_cfg);
    } catch (const ConvergenceError&) {
      out.screening_rejections++;
      continue;
    }
    if (conv_sol.exact_certificate) {
      screened = true;
      break;
    }
    out.screening_rejections++;
  }
  if (!screened) {
    std::ostringstream os;
    os << "skipped m=" << m << " sigma=" << sigma << " task_seed=" << task_seed << " after "
       << cfg.screen_max_retries << " screening attempts";
    out.skip_note = os.str();
    return out;
  }

  const double opt0 = rounding::round_cr_gram(conv_sol.M, inst).objective_value;

  // Shared lazily computed artifacts.
  std::optional<LNCGHamiltonian> ham;
  auto hamiltonian_of = [&]() -> const LNCGHamiltonian& {
    if (!ham) ham = build_H(inst, cfg.qubit_budget);
    return *ham;
  };
  std::optional<rounding::RoundedSolution> gw_result;
  std::optional<sdp::SDPSolution> basic_sol;
  auto gw_of = [&]() -> const rounding::RoundedSolution& {
    if (!gw_result) {
      basic_sol = sdp::solve_basic(inst, cfg.sdp_cfg);
      const auto factors = sdp::factorize(basic_sol->M, inst.n);
      Rng gw_rng(derive_seed(inst_seed, 2));
      gw_result = rounding::round_gw(factors, inst, cfg.gw_trials, gw_rng);
    }
    return *gw_result;
  };

  std::vector<detail::MethodOutcome> outcomes;
  for (const auto& method : cfg.methods) {
    const std::int64_t t0 = detail::now_ms();
    detail::MethodOutcome res;
    if (method == "cr-eig") {
      const auto& h = hamiltonian_of();
      const auto eig = engine::max_eigenpair(h.op, 1e-10, 600, derive_seed(inst_seed, 3));
      const auto rep = engine::gram_matrix(eig.vector, h);
      res.objective = rounding::round_cr(rep, inst).objective_value;
      res.relaxed = eig.value;
      res.iterations = eig.iterations;
    } else if (method == "vr-eig") {
      const auto& h = hamiltonian_of();
      const auto hz = regularize(h, cfg.zeta);
      const auto eig = engine::max_eigenpair(hz.op, 1e-10, 600, derive_seed(inst_seed, 4));
      ExpectationReport rep;
      for (int v = 0; v < m; ++v)
        rep.vertex_moments.push_back(
            engine::vertex_moments(eig.vector, m, inst.n, inst.group, v));
      res.objective = rounding::round_vr(rep, inst).objective_value;
      res.relaxed = engine::checked_real(h.op.expectation(eig.vector.amplitudes), "vr-eig");
      res.iterations = eig.iterations;
    } else if (method == "gw-sdp") {
      const auto& gw = gw_of();
      res.objective = gw.objective_value;
      res.relaxed = basic_sol->objective;
      res.iterations = basic_sol->iterations;
    } else if (method == "cr-anneal") {
      const auto& h = hamiltonian_of();
      const auto& init = gw_of();
      auto [psi0, h_i] = engine::initial_product_state(inst, init.matrices);
      int steps = 0;
      const auto psi_t = engine::evolve(h_i, h.op, {cfg.total_time, 0}, psi0, &steps);
      const auto rep = engine::gram_matrix(psi_t, h);
      res.objective = rounding::round_cr(rep, inst).objective_value;
      res.relaxed = rep.energy;
      res.iterations = steps;
    }
    res.wall_ms = detail::now_ms() - t0;
    outcomes.push_back(res);
  }

  double opt_eff = opt0;
  for (const auto& r : outcomes) opt_eff = std::max(opt_eff, r.objective);
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    ResultRow row;
    row.m = m;
    row.n = inst.n;
    row.group = inst.group;
    row.sigma = sigma;
    row.seed = inst_seed;
    row.method = cfg.methods[i];
    row.ratio = outcomes[i].objective / opt_eff;
    row.relaxed_energy_norm = outcomes[i].relaxed / opt_eff;
    row.optimum = opt_eff;
    row.iterations = outcomes[i].iterations;
    row.wall_ms = outcomes[i].wall_ms;
    out.rows.push_back(std::move(row));
  }
  return out;
}

// Runs the full sweep. Header lines (including the timestamp) go to `out`
// first, then the column line and one row per (instance, method). Rows are
// computed in parallel but merged in deterministic (m, sigma, rep) order.
inline void run_experiment(const ExperimentConfig& cfg, std::ostream& out,
                           bool with_timestamp = true) {
  cfg.validate();
  struct Task {
    int m;
    int sigma_idx;
    int rep;
  };
  std::vector<Task> tasks;
  for (int m : cfg.m_list)
    for (int si = 0; si < static_cast<int>(cfg.sigma_list.size()); ++si)
      for (int rep = 0; rep < cfg.reps; ++rep) tasks.push_back({m, si, rep});
  std::vector<TaskResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& t = tasks[i];
      const std::uint64_t task_seed =
          derive_seed(cfg.master_seed, (static_cast<std::uint64_t>(t.m) << 40) ^
                                           (static_cast<std::uint64_t>(t.sigma_idx) << 24) ^
                                           static_cast<std::uint64_t>(t.rep));
      try {
        results[i] = run_task(cfg, t.m, cfg.sigma_list[t.sigma_idx], task_seed);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  const int nthreads = std::max(1, cfg.threads);
  std::vector<std::thread> pool;
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  out << "# lncg-experiment v1\n";
  if (with_timestamp) {
    const std::time_t now = std::time(nullptr);
    char ts[64];
    std::strftime(ts, sizeof(ts), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "# timestamp: " << ts << "\n";
  }
  out << "# config: " << cfg.echo() << "\n";
  out << "# rng: " << Rng::kAlgorithm << "\n";
  out << "# note: wall_ms is measured time, excluded from the determinism guarantee\n";
  out << csv_columns() << "\n";
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (results[i].skip_note) out << "# " << *results[i].skip_note << "\n";
    if (results[i].screening_rejections > 0)
      out << "# screening: " << results[i].screening_rejections << " rejected draws for m="
          << tasks[i].m << " sigma=" << cfg.sigma_list[tasks[i].sigma_idx]
          << " rep=" << tasks[i].rep << "\n";
    for (const auto& row : results[i].rows) out << format_row(row) << "\n";
  }
}

// CSV body with the wall_ms field removed from every data row; this is the
// byte-comparable portion (timing and the timestamp line are measurement,
// not results).
inline std::string deterministic_body(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# timestamp:", 0) == 0) continue;
    if (!line.empty() && line[0] != '#') {
      const auto pos = line.find_last_of(',');
      if (pos != std::string::npos) line = line.substr(0, pos);
    }
    out << line << "\n";
  }
  return out.str();
}

}  // namespace experiment
}  // namespace lncg
