#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lncg/engine.hpp"
#include "lncg/instance.hpp"
#include "lncg/orthlin.hpp"

namespace lncg {
namespace rounding {

struct RoundedSolution {
  std::vector<MatrixXd> matrices;
  double objective_value = 0.0;
  std::string method;  // CR, VR or GW
  int trials_used = 0;
};

namespace detail {

// Deterministic tie-break: the zero matrix rounds to the identity.
inline MatrixXd project_block(const MatrixXd& b, Group g) {
  if (b.norm() < 1e-12) return MatrixXd::Identity(b.rows(), b.cols());
  return orthlin::nearest_group_element(b, g);
}

inline RoundedSolution finish(std::vector<MatrixXd> mats, const ProblemInstance& inst,
                              const char* method, int trials) {
  RoundedSolution sol;
  sol.objective_value = objective(inst, mats);
  sol.matrices = std::move(mats);
  sol.method = method;
  sol.trials_used = trials;
  return sol;
}

}  // namespace detail

// conv G-based rounding of an mn x mn Gram matrix (quantum M or SDP M):
// R_1 = I and R_v is the group projection of the (v,1) block, so that the
// recovered list satisfies R_u R_v^T ~ n * M_uv in the R_1 = I gauge.
inline RoundedSolution round_cr_gram(const MatrixXd& gram, const ProblemInstance& inst) {
  const int n = inst.n, m = inst.graph.m;
  if (gram.rows() != m * n || gram.cols() != m * n)
    throw std::invalid_argument("round_cr_gram: Gram matrix size mismatch");
  std::vector<MatrixXd> mats;
  mats.push_back(MatrixXd::Identity(n, n));
  for (int v = 1; v < m; ++v)
    mats.push_back(detail::project_block(gram.block(v * n, 0, n, n), inst.group));
  return detail::finish(std::move(mats), inst, "CR", 1);
}

inline RoundedSolution round_cr(const ExpectationReport& report, const ProblemInstance& inst) {
  return round_cr_gram(report.gram, inst);
}

// Vertex-marginal rounding: R_v is the group projection of Q_v.
inline RoundedSolution round_vr(const ExpectationReport& report, const ProblemInstance& inst) {
  if (static_cast<int>(report.vertex_moments.size()) != inst.graph.m)
    throw std::invalid_argument("round_vr: vertex moments missing");
  std::vector<MatrixXd> mats;
  for (const auto& q : report.vertex_moments)
    mats.push_back(detail::project_block(q, inst.group));
  return detail::finish(std::move(mats), inst, "VR", 1);
}

// Gaussian randomized rounding of SDP factors: per trial draw Z (mn x n,
// N(0, 1/n) entries), project X_v Z onto the group and keep the best
// objective over `trials`.
inline RoundedSolution round_gw(const std::vector<MatrixXd>& factors,
                                const ProblemInstance& inst, int trials, Rng& rng) {
  const int n = inst.n, m = inst.graph.m;
  if (static_cast<int>(factors.size()) != m)
    throw std::invalid_argument("round_gw: need one factor block per vertex");
  for (const auto& xv : factors) {
    if (xv.rows() != n || xv.cols() != m * n)
      throw std::invalid_argument("round_gw: factor block must be n x mn");
    if ((xv * xv.transpose() - MatrixXd::Identity(n, n)).norm() > 1e-6)
      throw std::invalid_argument("round_gw: factor rows are not orthonormal");
  }
  if (trials < 1) throw std::invalid_argument("round_gw: trials must be >= 1");
  const double sd = 1.0 / std::sqrt(static_cast<double>(n));
  RoundedSolution best;
  best.objective_value = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    MatrixXd z(m * n, n);
    for (int i = 0; i < z.rows(); ++i)
      for (int j = 0; j < z.cols(); ++j) z(i, j) = sd * rng.gaussian();
    std::vector<MatrixXd> mats;
    mats.reserve(static_cast<std::size_t>(m));
    for (int v = 0; v < m; ++v) mats.push_back(detail::project_block(factors[v] * z, inst.group));
    const double obj = objective(inst, mats);
    if (obj > best.objective_value) {
      best.objective_value = obj;
      best.matrices = std::move(mats);
    }
  }
  best.method = "GW";
  best.trials_used = trials;
  return best;
}

inline constexpr int kRoundedFileVersion = 1;

inline void save_rounded(const RoundedSolution& sol, const std::string& path) {
  nlohmann::json j;
  j["version"] = kRoundedFileVersion;
  j["kind"] = "lncg-rounded-solution";
  j["tool"] = kToolVersion;
  j["method"] = sol.method;
  j["trials_used"] = sol.trials_used;
  j["objective_value"] = sol.objective_value;
  nlohmann::json mats = nlohmann::json::array();
  for (const auto& r : sol.matrices) {
    std::vector<double> flat;
    for (int i = 0; i < r.rows(); ++i)
      for (int c = 0; c < r.cols(); ++c) flat.push_back(r(i, c));
    mats.push_back(flat);
  }
  j["matrices"] = std::move(mats);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(1) << "\n";
}

inline RoundedSolution load_rounded(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("version").get<int>() != kRoundedFileVersion)
      throw IoError("rounded file version mismatch in '" + path + "'");
    RoundedSolution sol;
    sol.method = j.at("method").get<std::string>();
    sol.trials_used = j.at("trials_used").get<int>();
    sol.objective_value = j.at("objective_value").get<double>();
    for (const auto& flat : j.at("matrices")) {
      if (static_cast<int>(flat.size()) != n * n) throw IoError("rounded file: bad matrix size");
      MatrixXd r(n, n);
      int k = 0;
      for (int i = 0; i < n; ++i)
        for (int c = 0; c < n; ++c) r(i, c) = flat[k++].get<double>();
      sol.matrices.push_back(std::move(r));
    }
    return sol;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("invalid rounded file '" + path + "': " + e.what());
  }
}

}  // namespace rounding
}  // namespace lncg
