#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "lncg/common.hpp"

namespace lncg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace orthlin {

inline void require_finite(const MatrixXd& x, const char* who) {
  if (!x.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite input");
}

struct Svd {
  MatrixXd u;
  VectorXd sigma;  // descending
  MatrixXd v;
};

inline Svd svd(const MatrixXd& x) {
  require_finite(x, "svd");
  Eigen::JacobiSVD<MatrixXd> dec(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

// X = U diag(sigma_tilde) V_tilde^T with det(U V_tilde^T) = +1; the sign
// det(UV^T) is absorbed into the smallest singular value.
struct SpecialSVD {
  MatrixXd u;
  VectorXd sigma;        // ordinary singular values, descending
  VectorXd sigma_tilde;  // last entry signed by det(UV^T)
  MatrixXd v_tilde;
};

inline SpecialSVD special_svd(const MatrixXd& x) {
  Svd s = svd(x);
  const int n = static_cast<int>(x.rows());
  const double d = s.u.determinant() * s.v.determinant();
  const double sign = d >= 0.0 ? 1.0 : -1.0;
  SpecialSVD out;
  out.u = s.u;
  out.sigma = s.sigma;
  out.sigma_tilde = s.sigma;
  out.sigma_tilde[n - 1] *= sign;
  out.v_tilde = s.v;
  out.v_tilde.col(n - 1) *= sign;
  return out;
}

inline MatrixXd nearest_orthogonal(const MatrixXd& x) {
  Svd s = svd(x);
  return s.u * s.v.transpose();
}

inline MatrixXd nearest_rotation(const MatrixXd& x) {
  SpecialSVD s = special_svd(x);
  return s.u * s.v_tilde.transpose();
}

inline MatrixXd nearest_group_element(const MatrixXd& x, Group g) {
  return g == Group::O ? nearest_orthogonal(x) : nearest_rotation(x);
}

inline bool is_orthogonal(const MatrixXd& x, double tol = 1e-8) {
  const int n = static_cast<int>(x.rows());
  return x.cols() == n && x.allFinite() &&
         (x.transpose() * x - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_rotation(const MatrixXd& x, double tol = 1e-8) {
  return is_orthogonal(x, tol) && std::abs(x.determinant() - 1.0) <= tol * 10;
}

inline bool in_conv_O(const MatrixXd& x, double tol) {
  require_finite(x, "in_conv_O");
  return svd(x).sigma[0] <= 1.0 + tol;
}

// Sign patterns a in {+-1}^n with an odd number of -1 entries; the hull
// constraints read <a, sigma_tilde> <= n - 2.
inline std::vector<VectorXd> odd_subset_signs(int n) {
  std::vector<VectorXd> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) % 2 == 0) continue;
    VectorXd a(n);
    for (int i = 0; i < n; ++i) a[i] = (mask >> i) & 1u ? -1.0 : 1.0;
    out.push_back(std::move(a));
  }
  return out;
}

inline bool in_conv_SO(const MatrixXd& x, double tol) {
  require_finite(x, "in_conv_SO");
  const int n = static_cast<int>(x.rows());
  const VectorXd st = special_svd(x).sigma_tilde;
  for (const auto& a : odd_subset_signs(n))
    if (a.dot(st) > n - 2 + tol) return false;
  return true;
}

inline bool in_conv(const MatrixXd& x, Group g, double tol) {
  return g == Group::O ? in_conv_O(x, tol) : in_conv_SO(x, tol);
}

// Frobenius projection onto conv SO(n): Dykstra's alternating projection of
// the special singular values onto the 2^{n-1} half-spaces, then reassembly
// in the same special-SVD frame. The sweep-movement tolerance is relative to
// the input magnitude.
inline MatrixXd project_conv_SO(const MatrixXd& x, int max_sweeps = 10000,
                                double move_tol = 1e-10) {
  require_finite(x, "project_conv_SO");
  const int n = static_cast<int>(x.rows());
  const SpecialSVD s = special_svd(x);
  const auto signs = odd_subset_signs(n);
  VectorXd v = s.sigma_tilde;
  // Every Dykstra correction is an outward multiple of its half-space normal,
  // so a scalar coefficient per constraint carries the full state and the
  // iterate update v -> v - ((a.v - rhs)/n) a never mixes magnitudes.
  std::vector<double> correction(signs.size(), 0.0);
  const double rhs = n - 2;
  const double eps_floor =
      16 * std::numeric_limits<double>::epsilon() * std::max(1.0, s.sigma_tilde.norm());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const VectorXd before = v;
    for (std::size_t k = 0; k < signs.size(); ++k) {
      const VectorXd& a = signs[k];
      const double slack = (a.dot(v) - rhs) / n;
      const double excess = slack + correction[k];
      if (excess > 0) {
        v -= slack * a;
        correction[k] = excess;
      } else {
        v += correction[k] * a;
        correction[k] = 0.0;
      }
    }
    double violation = 0.0;
    for (const auto& a : signs) violation = std::max(violation, a.dot(v) - rhs);
    const double moved = (v - before).norm();
    const double feas_tol =
        std::min(1e-8, std::max(1e-10 * std::max(1.0, v.norm()), eps_floor));
    const double move_limit = std::max(move_tol * std::max(1.0, v.norm()), eps_floor);
    if (moved < move_limit && violation <= feas_tol)
      return s.u * v.asDiagonal() * s.v_tilde.transpose();
  }
  double worst = 0.0;
  for (const auto& a : signs) worst = std::max(worst, a.dot(v) - rhs);
  throw ConvergenceError("project_conv_SO did not converge", worst);
}

// Haar sampling via QR of a Gaussian matrix with R-diagonal sign fixing.
inline MatrixXd haar_orthogonal(int n, Rng& rng) {
  MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.gaussian();
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ();
  const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

inline MatrixXd haar_rotation(int n, Rng& rng) {
  MatrixXd q = haar_orthogonal(n, rng);
  if (q.determinant() < 0) q.col(n - 1) *= -1.0;
  return q;
}

inline MatrixXd haar_sample(int n, Group g, Rng& rng) {
  return g == Group::O ? haar_orthogonal(n, rng) : haar_rotation(n, rng);
}

}  // namespace orthlin
}  // namespace lncg
