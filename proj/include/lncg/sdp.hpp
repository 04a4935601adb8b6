#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "lncg/instance.hpp"
#include "lncg/orthlin.hpp"

namespace lncg {
namespace sdp {

struct SolverConfig {
  double penalty = 1.0;       // ADMM step; adapted by residual balancing
  double tol_primal = 1e-6;   // Frobenius norm of X - Z
  double tol_dual = 1e-6;     // rho * Frobenius norm of Z - Z_prev
  int max_iter = 20000;
  bool adapt_penalty = true;
};

struct SDPSolution {
  MatrixXd M;
  double objective = 0.0;  // sum over unordered edges of <C_uv, M_uv>
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  int numerical_rank = 0;
  bool exact_certificate = false;
  std::vector<double> residual_history;  // max(r, s) per iteration
};

inline int rank_certificate(const MatrixXd& m, double tol = 1e-6) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  if (lmax <= 0) return 0;
  int rank = 0;
  for (int i = 0; i < eig.eigenvalues().size(); ++i)
    if (eig.eigenvalues()[i] > tol * lmax) rank++;
  return rank;
}

namespace detail {

// Gradient matrix G with <G, M> = sum_edges <C_uv, M_uv> for symmetric M.
inline MatrixXd objective_gradient(const ProblemInstance& inst) {
  const int n = inst.n, mn = inst.graph.m * n;
  MatrixXd g = MatrixXd::Zero(mn, mn);
  for (std::size_t e = 0; e < inst.graph.edges.size(); ++e) {
    const auto [u, v] = inst.graph.edges[e];
    g.block(u * n, v * n, n, n) = 0.5 * inst.blocks[e];
    g.block(v * n, u * n, n, n) = 0.5 * inst.blocks[e].transpose();
  }
  return g;
}

inline double edge_objective(const ProblemInstance& inst, const MatrixXd& m) {
  const int n = inst.n;
  double acc = 0.0;
  for (std::size_t e = 0; e < inst.graph.edges.size(); ++e) {
    const auto [u, v] = inst.graph.edges[e];
    acc += (inst.blocks[e].transpose() * m.block(u * n, v * n, n, n)).trace();
  }
  return acc;
}

inline MatrixXd project_psd(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(a);
  const VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
}

// Projection onto the affine/feasible block set: diagonal blocks to identity,
// off-diagonal blocks optionally onto conv SO(n). Blocks occupy disjoint
// coordinates, so the blockwise map is the exact Euclidean projection onto
// the intersection.
inline MatrixXd project_blocks(const ProblemInstance& inst, MatrixXd a, bool conv_so) {
  const int n = inst.n, m = inst.graph.m;
  for (int v = 0; v < m; ++v) a.block(v * n, v * n, n, n) = MatrixXd::Identity(n, n);
  if (conv_so) {
    for (int u = 0; u < m; ++u)
      for (int v = u + 1; v < m; ++v) {
        const MatrixXd b =
            0.5 * (a.block(u * n, v * n, n, n) + a.block(v * n, u * n, n, n).transpose());
        const MatrixXd p = orthlin::in_conv_SO(b, 1e-12) ? b : orthlin::project_conv_SO(b);
        a.block(u * n, v * n, n, n) = p;
        a.block(v * n, u * n, n, n) = p.transpose();
      }
  }
  return a;
}

inline SDPSolution solve_splitting(const ProblemInstance& inst, const SolverConfig& cfg,
                                   bool conv_so) {
  inst.validate();
  if (conv_so && inst.group != Group::SO)
    throw std::invalid_argument("solve_conv_so: instance group must be SO");
  const int mn = inst.graph.m * inst.n;
  const MatrixXd g = objective_gradient(inst);
  MatrixXd z = MatrixXd::Identity(mn, mn);
  MatrixXd x = z, u = MatrixXd::Zero(mn, mn);
  double rho = cfg.penalty;
  SDPSolution sol;
  sol.residual_history.reserve(static_cast<std::size_t>(cfg.max_iter));
  for (int it = 1; it <= cfg.max_iter; ++it) {
    x = project_psd(z - u);
    const MatrixXd z_prev = z;
    z = project_blocks(inst, x + u + g / rho, conv_so);
    u += x - z;
    const double r = (x - z).norm();
    const double s = rho * (z - z_prev).norm();
    sol.residual_history.push_back(std::max(r, s));
    if (r < cfg.tol_primal && s < cfg.tol_dual) {
      sol.M = x;
      sol.objective = edge_objective(inst, x);
      sol.primal_residual = r;
      sol.dual_residual = s;
      sol.iterations = it;
      sol.numerical_rank = rank_certificate(x);
      sol.exact_certificate = sol.numerical_rank == inst.n;
      return sol;
    }
    if (cfg.adapt_penalty) {
      if (r > 10 * s && rho < 1e4) {
        rho *= 2;
        u /= 2;
      } else if (s > 10 * r && rho > 1e-4) {
        rho /= 2;
        u *= 2;
      }
    }
  }
  const double r = (x - z).norm();
  throw ConvergenceError("sdp splitting exceeded max_iter=" + std::to_string(cfg.max_iter), r);
}

}  // namespace detail

// Orthogonal-cut SDP: maximize the edge objective over M >= 0, M_vv = I.
inline SDPSolution solve_basic(const ProblemInstance& inst, const SolverConfig& cfg = {}) {
  return detail::solve_splitting(inst, cfg, false);
}

// conv SO(n)-augmented SDP: additionally M_uv in conv SO(n) for all pairs.
inline SDPSolution solve_conv_so(const ProblemInstance& inst, const SolverConfig& cfg = {}) {
  return detail::solve_splitting(inst, cfg, true);
}

// M = X X^T with rows grouped per vertex; each X_v is renormalized so that
// X_v X_v^T = I before use by randomized rounding.
inline std::vector<MatrixXd> factorize(const MatrixXd& m, int n) {
  const int mn = static_cast<int>(m.rows());
  if (mn % n != 0) throw std::invalid_argument("factorize: size not a multiple of n");
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m);
  if (eig.eigenvalues().minCoeff() < -1e-7)
    throw std::invalid_argument("factorize: matrix indefinite beyond tolerance");
  const VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  const MatrixXd x = eig.eigenvectors() * clipped.cwiseSqrt().asDiagonal();
  const double scale = std::max(m.norm(), 1e-12);
  if ((m - x * x.transpose()).norm() > 1e-5 * scale)
    throw std::runtime_error("factorize: reconstruction residual too large");
  std::vector<MatrixXd> factors;
  for (int v = 0; v < mn / n; ++v) {
    MatrixXd xv = x.middleRows(v * n, n);
    const MatrixXd s = xv * xv.transpose();
    if ((s - MatrixXd::Identity(n, n)).norm() > 1e-6) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> se(s);
      if (se.eigenvalues().minCoeff() < 1e-12)
        throw std::runtime_error("factorize: vertex block is rank deficient");
      xv = se.eigenvectors() * se.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
           se.eigenvectors().transpose() * xv;
    }
    factors.push_back(std::move(xv));
  }
  return factors;
}

inline constexpr int kSolutionFileVersion = 1;

inline void save_sdp_solution(const SDPSolution& sol, const SolverConfig& cfg,
                              const std::string& variant, const std::string& path) {
  nlohmann::json j;
  j["version"] = kSolutionFileVersion;
  j["kind"] = "lncg-sdp-solution";
  j["tool"] = kToolVersion;
  j["rng"] = Rng::kAlgorithm;
  j["variant"] = variant;
  j["mn"] = sol.M.rows();
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(sol.M.size()));
  for (int i = 0; i < sol.M.rows(); ++i)
    for (int k = 0; k < sol.M.cols(); ++k) flat.push_back(sol.M(i, k));
  j["M"] = flat;
  j["objective"] = sol.objective;
  j["primal_residual"] = sol.primal_residual;
  j["dual_residual"] = sol.dual_residual;
  j["iterations"] = sol.iterations;
  j["numerical_rank"] = sol.numerical_rank;
  j["exact_certificate"] = sol.exact_certificate;
  j["config"] = {{"penalty", cfg.penalty},
                 {"tol_primal", cfg.tol_primal},
                 {"tol_dual", cfg.tol_dual},
                 {"max_iter", cfg.max_iter}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(1) << "\n";
}

inline SDPSolution load_sdp_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("version").get<int>() != kSolutionFileVersion)
      throw IoError("solution file version mismatch in '" + path + "'");
    SDPSolution sol;
    const int mn = j.at("mn").get<int>();
    const auto& flat = j.at("M");
    if (static_cast<int>(flat.size()) != mn * mn) throw IoError("solution file: bad M length");
    sol.M.resize(mn, mn);
    int k = 0;
    for (int i = 0; i < mn; ++i)
      for (int c = 0; c < mn; ++c) sol.M(i, c) = flat[k++].get<double>();
    sol.objective = j.at("objective").get<double>();
    sol.primal_residual = j.at("primal_residual").get<double>();
    sol.dual_residual = j.at("dual_residual").get<double>();
    sol.iterations = j.at("iterations").get<int>();
    sol.numerical_rank = j.at("numerical_rank").get<int>();
    sol.exact_certificate = j.at("exact_certificate").get<bool>();
    return sol;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("invalid solution file '" + path + "': " + e.what());
  }
}

}  // namespace sdp
}  // namespace lncg
