#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "lncg/orthlin.hpp"
#include "lncg/pauli.hpp"
#include "lncg/sparse.hpp"

namespace lncg {
namespace free_fermion {

// F(C) = sum_ij C_ij P_ij on n qubits.
inline SparseSymmetricOperator build_F(const MatrixXd& c) {
  orthlin::require_finite(c, "build_F");
  const int n = static_cast<int>(c.rows());
  if (c.cols() != n || n < 1) throw std::invalid_argument("build_F: C must be square");
  const std::int64_t dim = std::int64_t{1} << n;
  std::vector<SparseSymmetricOperator::Triplet> trip;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      const double w = c(i - 1, j - 1);
      if (w == 0.0) continue;
      for (const auto& t : to_sparse(p_ij(i, j, n)).triplets())
        trip.push_back({t.row, t.col, w * t.value});
    }
  return SparseSymmetricOperator::from_triplets(dim, std::move(trip));
}

// All 2^n eigenvalues of F(C): E_b = sum_k (-1)^{b_k} sigma_k(C), with bit 1
// of b corresponding to mode 1 (MSB of the index).
inline std::vector<std::pair<std::uint64_t, double>> spectrum_free(const MatrixXd& c) {
  orthlin::require_finite(c, "spectrum_free");
  const int n = static_cast<int>(c.rows());
  const VectorXd sigma = orthlin::svd(c).sigma;
  std::vector<std::pair<std::uint64_t, double>> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
    double e = 0.0;
    for (int k = 0; k < n; ++k) {
      const bool occupied = (b >> (n - 1 - k)) & 1u;
      e += occupied ? -sigma[k] : sigma[k];
    }
    out.push_back({b, e});
  }
  return out;
}

struct GaussianState {
  int modes = 0;
  VectorXd amplitudes;  // length 2^modes, unit norm
  int parity = 0;       // +1 or -1, the snapped <Z^n> expectation
};

inline double parity_expectation(const VectorXd& psi) {
  double acc = 0.0;
  for (std::int64_t b = 0; b < psi.size(); ++b) {
    const double w = psi[b] * psi[b];
    acc += (__builtin_parityll(static_cast<std::uint64_t>(b)) ? -w : w);
  }
  return acc;
}

// Maximal eigenvector of F(R) for orthogonal R: eigenvalue n, nondegenerate
// (gap 2 sigma_n = 2), with <P_ij> = R_ij. Uses dense diagonalization; the
// desk-scale mode counts make this the simplest faithful route.
inline GaussianState gaussian_state(const MatrixXd& r) {
  const int n = static_cast<int>(r.rows());
  if (!orthlin::is_orthogonal(r, 1e-8))
    throw std::invalid_argument("gaussian_state: input is not orthogonal");
  const Eigen::MatrixXd f = build_F(r).to_dense();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(f);
  VectorXd psi = eig.eigenvectors().col(f.rows() - 1);
  // Fix the overall sign: largest-magnitude amplitude positive.
  int imax = 0;
  psi.cwiseAbs().maxCoeff(&imax);
  if (psi[imax] < 0) psi = -psi;
  GaussianState st;
  st.modes = n;
  st.amplitudes = psi / psi.norm();
  const double par = parity_expectation(st.amplitudes);
  if (std::abs(std::abs(par) - 1.0) > 1e-6)
    throw std::runtime_error("gaussian_state: parity expectation not +-1");
  st.parity = par > 0 ? 1 : -1;
  return st;
}

// Pi_0 as a map on amplitudes: even basis states b1 b2..bn -> b2..bn.
inline VectorXd project_state_even(const GaussianState& state) {
  if (state.parity != 1)
    throw std::invalid_argument("project_state_even: state has odd parity");
  const int n = state.modes;
  const std::int64_t half = std::int64_t{1} << (n - 1);
  VectorXd out = VectorXd::Zero(half);
  for (std::int64_t b = 0; b < state.amplitudes.size(); ++b) {
    if (__builtin_parityll(static_cast<std::uint64_t>(b))) continue;
    out[b & (half - 1)] = state.amplitudes[b];
  }
  const double nrm = out.norm();
  if (std::abs(nrm - 1.0) > 1e-9)
    throw std::runtime_error("project_state_even: projected norm deviates from 1");
  return out / nrm;
}

}  // namespace free_fermion
}  // namespace lncg
