#pragma once

#include <complex>
#include <fstream>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "lncg/hamiltonian.hpp"
#include "lncg/sparse.hpp"

namespace lncg {

using Eigen::VectorXcd;

struct StateVector {
  std::int64_t dim = 0;
  VectorXcd amplitudes;

  static StateVector from_real(const VectorXd& v) {
    StateVector s;
    s.dim = v.size();
    s.amplitudes = v.cast<std::complex<double>>();
    return s;
  }

  double norm() const { return amplitudes.norm(); }
};

struct AnnealSchedule {
  double total_time = 1.0;
  int steps = 0;  // 0 selects max(200, ceil(40 * T * norm scale))
};

struct ExpectationReport {
  std::vector<MatrixXd> vertex_moments;           // Q_v, one n x n matrix per vertex
  std::map<std::pair<int, int>, MatrixXd> edge_moments;  // T_uv for u < v (all pairs)
  MatrixXd gram;                                  // mn x mn, identity diagonal blocks
  double energy = 0.0;
};

namespace engine {

struct EigenPair {
  double value = 0.0;
  StateVector vector;
  int iterations = 0;
  double residual = 0.0;
};

// Power-iteration estimate of the spectral norm, deterministic start.
inline double spectral_norm_est(const SparseSymmetricOperator& op, int iters = 60) {
  VectorXd v = VectorXd::Ones(op.dim());
  for (std::int64_t i = 0; i < op.dim(); ++i) v[i] += 0.37 * std::sin(0.71 * double(i + 1));
  v.normalize();
  double est = 0.0;
  VectorXd w;
  for (int it = 0; it < iters; ++it) {
    op.apply(v, w);
    est = w.norm();
    if (est == 0.0) return 0.0;
    v = w / est;
  }
  return est;
}

// Lanczos with full reorthogonalization for the maximal eigenpair of a real
// symmetric operator. Residual criterion is ||H psi - lambda psi|| <= tol * scale,
// scale being the current top Ritz magnitude.
inline EigenPair max_eigenpair(const SparseSymmetricOperator& op, double tol = 1e-10,
                               int max_iter = 600, std::uint64_t seed = 12345) {
  const std::int64_t dim = op.dim();
  if (dim == 1) {
    EigenPair p;
    p.value = op.entry(0, 0);
    p.vector = StateVector::from_real(VectorXd::Ones(1));
    p.iterations = 1;
    return p;
  }
  max_iter = static_cast<int>(std::min<std::int64_t>(max_iter, dim));
  Rng rng(seed);
  std::vector<VectorXd> basis;
  basis.reserve(static_cast<std::size_t>(max_iter) + 1);
  VectorXd v0(dim);
  for (std::int64_t i = 0; i < dim; ++i) v0[i] = rng.gaussian();
  v0.normalize();
  basis.push_back(v0);
  std::vector<double> alpha, beta;
  double best_residual = std::numeric_limits<double>::infinity();
  VectorXd w;
  for (int j = 0; j < max_iter; ++j) {
    op.apply(basis.back(), w);
    alpha.push_back(basis.back().dot(w));
    // Full reorthogonalization, twice for numerical safety.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) w -= q.dot(w) * q;
    const double b = w.norm();
    const int k = j + 1;
    // Tridiagonal Ritz problem.
    MatrixXd t = MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(t);
    const int top = k - 1;
    const double theta = eig.eigenvalues()[top];
    const VectorXd y = eig.eigenvectors().col(top);
    const double scale = std::max(std::abs(theta), 1e-30);
    const double resid = b * std::abs(y[k - 1]);
    best_residual = std::min(best_residual, resid);
    if (resid <= tol * scale || b < 1e-14 || k == dim) {
      VectorXd psi = VectorXd::Zero(dim);
      for (int i = 0; i < k; ++i) psi += y[i] * basis[i];
      psi.normalize();
      EigenPair p;
      p.value = theta;
      p.vector = StateVector::from_real(psi);
      p.iterations = k;
      p.residual = resid;
      return p;
    }
    beta.push_back(b);
    basis.push_back(w / b);
  }
  throw ConvergenceError("max_eigenpair: no convergence after " + std::to_string(max_iter) +
                             " iterations",
                         best_residual);
}

// Fixed-step RK4 for i d/dt psi = H(t) psi with the linear schedule
// H(t) = (1 - t/T) H_i + (t/T) H_f. The state is renormalized every step and
// the run is rejected if the pre-renormalization drift exceeds 1e-6.
inline StateVector evolve(const SparseSymmetricOperator& h_i, const SparseSymmetricOperator& h_f,
                          const AnnealSchedule& schedule, const StateVector& psi0,
                          int* steps_used = nullptr) {
  if (h_i.dim() != h_f.dim() || psi0.dim != h_i.dim())
    throw std::invalid_argument("evolve: dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("evolve: initial state not normalized");
  const double t_total = schedule.total_time;
  int steps = schedule.steps;
  if (steps <= 0) {
    const double scale = std::max(spectral_norm_est(h_i), spectral_norm_est(h_f));
    steps = static_cast<int>(std::max(200.0, std::ceil(40.0 * t_total * scale)));
  }
  if (steps_used) *steps_used = steps;
  const double h = t_total / steps;
  const std::complex<double> mi(0.0, -1.0);
  VectorXcd psi = psi0.amplitudes;
  VectorXcd hi_x, hf_x, k1, k2, k3, k4, tmp;
  auto rhs = [&](const VectorXcd& x, double t, VectorXcd& out) {
    const double s = t / t_total;
    h_i.apply(x, hi_x);
    h_f.apply(x, hf_x);
    out = mi * ((1.0 - s) * hi_x + s * hf_x);
  };
  for (int step = 0; step < steps; ++step) {
    const double t = step * h;
    rhs(psi, t, k1);
    tmp = psi + (h / 2) * k1;
    rhs(tmp, t + h / 2, k2);
    tmp = psi + (h / 2) * k2;
    rhs(tmp, t + h / 2, k3);
    tmp = psi + h * k3;
    rhs(tmp, t + h, k4);
    psi += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double nrm = psi.norm();
    if (std::abs(nrm - 1.0) > 1e-6)
      throw ConvergenceError("evolve: norm drift exceeded 1e-6 in one step; increase steps",
                             std::abs(nrm - 1.0));
    psi /= nrm;
  }
  StateVector out;
  out.dim = psi.size();
  out.amplitudes = std::move(psi);
  return out;
}

// psi(0) = (x)_v (projected) Gaussian states of R_v, and its parent
// Hamiltonian H_i = sum_v Pi_0 F(R_v) Pi_0^T (projection dropped for O).
inline std::pair<StateVector, SparseSymmetricOperator> initial_product_state(
    const ProblemInstance& inst, const std::vector<MatrixXd>& r_list) {
  const VectorXd psi = feasible_product_state(inst, r_list);
  const int sites = local_site_count(inst.n, inst.group);
  const std::int64_t dim = std::int64_t{1} << (static_cast<std::int64_t>(sites) * inst.graph.m);
  std::vector<SparseSymmetricOperator::Triplet> trip;
  for (int v = 0; v < inst.graph.m; ++v) {
    for (int i = 1; i <= inst.n; ++i)
      for (int j = 1; j <= inst.n; ++j) {
        const double w = r_list[v](i - 1, j - 1);
        if (w == 0.0) continue;
        PauliWord word = inst.group == Group::O ? p_ij(i, j, inst.n) : p_tilde_ij(i, j, inst.n);
        detail::append_word_triplets(embed(word, v, inst.graph.m), w, trip);
      }
  }
  auto h_i = SparseSymmetricOperator::from_triplets(dim, std::move(trip));
  return {StateVector::from_real(psi), std::move(h_i)};
}

inline double checked_real(std::complex<double> z, const char* who) {
  if (std::abs(z.imag()) > 1e-8)
    throw std::runtime_error(std::string(who) + ": expectation has imaginary part " +
                             std::to_string(z.imag()));
  return z.real();
}

// Q_v: entries <psi| P_ij^{(v)} |psi> (P~ under SO).
inline MatrixXd vertex_moments(const StateVector& psi, int m, int n, Group group, int v) {
  if (v < 0 || v >= m) throw std::out_of_range("vertex_moments: vertex id");
  const auto ops = site_operators(n, group);
  MatrixXd q(n, n);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      q(i - 1, j - 1) = checked_real(
          word_expectation(embed(ops[i - 1][j - 1], v, m), psi.amplitudes), "vertex_moments");
  return q;
}

// T_uv: entries (1/n) <psi| Gamma_ij^{(u,v)} |psi>.
inline MatrixXd edge_moments(const StateVector& psi, int m, int n, Group group, int u, int v) {
  if (u == v) throw std::invalid_argument("edge_moments: u and v must differ");
  const auto ops = site_operators(n, group);
  MatrixXd t(n, n);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      std::complex<double> acc = 0.0;
      for (int k = 1; k <= n; ++k) {
        const PauliWord w =
            multiply(embed(ops[i - 1][k - 1], u, m), embed(ops[j - 1][k - 1], v, m));
        acc += word_expectation(w, psi.amplitudes);
      }
      t(i - 1, j - 1) = checked_real(acc, "edge_moments") / n;
    }
  return t;
}

// Quantum Gram matrix over all vertex pairs, plus vertex moments and energy.
inline ExpectationReport gram_matrix(const StateVector& psi, const LNCGHamiltonian& ham) {
  if (psi.dim != ham.total_dim) throw std::invalid_argument("gram_matrix: dimension mismatch");
  const int m = ham.m, n = ham.n;
  ExpectationReport rep;
  rep.gram = MatrixXd::Identity(m * n, m * n);
  for (int v = 0; v < m; ++v)
    rep.vertex_moments.push_back(vertex_moments(psi, m, n, ham.group, v));
  for (int u = 0; u < m; ++u)
    for (int v = u + 1; v < m; ++v) {
      const MatrixXd t = edge_moments(psi, m, n, ham.group, u, v);
      rep.edge_moments[{u, v}] = t;
      rep.gram.block(u * n, v * n, n, n) = t;
      rep.gram.block(v * n, u * n, n, n) = t.transpose();
    }
  rep.energy = checked_real(ham.op.expectation(psi.amplitudes), "gram_matrix");
  return rep;
}

inline constexpr const char* kStateMagic = "lncg-state 1";

inline void save_state(const StateVector& psi, const std::string& path,
                       const std::vector<std::string>& meta = {}) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << kStateMagic << "\n";
  for (const auto& line : meta) out << "# " << line << "\n";
  out << psi.dim << "\n";
  char buf[96];
  for (std::int64_t i = 0; i < psi.dim; ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", psi.amplitudes[i].real(),
                  psi.amplitudes[i].imag());
    out << buf;
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline StateVector load_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kStateMagic)
    throw IoError("bad state file header in '" + path + "'");
  while (in.peek() == '#') std::getline(in, line);
  std::int64_t dim = 0;
  in >> dim;
  if (dim <= 0) throw IoError("bad state dimension in '" + path + "'");
  StateVector psi;
  psi.dim = dim;
  psi.amplitudes.resize(dim);
  for (std::int64_t i = 0; i < dim; ++i) {
    double re = 0.0, im = 0.0;
    if (!(in >> re >> im)) throw IoError("truncated state file '" + path + "'");
    psi.amplitudes[i] = {re, im};
  }
  return psi;
}

}  // namespace engine
}  // namespace lncg
