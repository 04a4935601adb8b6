#pragma once

#include <cstdint>
#include <vector>

#include "lncg/free_fermion.hpp"
#include "lncg/instance.hpp"
#include "lncg/pauli.hpp"
#include "lncg/sparse.hpp"

namespace lncg {

// Vertex-local operator table: P_ij on n sites for group O, the projected
// P~_ij on n-1 sites for group SO. Indexed [i-1][j-1].
inline std::vector<std::vector<PauliWord>> site_operators(int n, Group group) {
  if (n < 1) throw std::invalid_argument("site_operators: n must be >= 1");
  if (group == Group::SO && n < 2)
    throw std::invalid_argument("site_operators: group SO requires n >= 2");
  std::vector<std::vector<PauliWord>> ops(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      ops[i - 1].push_back(group == Group::O ? p_ij(i, j, n) : p_tilde_ij(i, j, n));
  return ops;
}

inline int local_site_count(int n, Group group) { return group == Group::O ? n : n - 1; }

struct LNCGHamiltonian {
  Group group = Group::SO;
  int m = 0;
  int n = 0;
  int local_sites = 0;
  std::int64_t local_dim = 0;
  std::int64_t total_dim = 0;
  double zeta = 0.0;
  SparseSymmetricOperator op;
};

namespace detail {

inline void append_word_triplets(const PauliWord& w, double coeff,
                                 std::vector<SparseSymmetricOperator::Triplet>& trip) {
  if (w.is_zero() || coeff == 0.0) return;
  const auto act = word_action(w);
  const std::int64_t dim = std::int64_t{1} << w.sites;
  for (std::int64_t c = 0; c < dim; ++c) {
    const std::int64_t r = c ^ static_cast<std::int64_t>(act.flip_mask);
    const double sgn = parity_bits(static_cast<std::uint64_t>(c) & act.sign_mask) ? -1.0 : 1.0;
    trip.push_back({r, c, coeff * act.base * sgn});
  }
}

}  // namespace detail

// Gamma_ij^{(u,v)} = sum_k P_ik^{(u)} (x) P_jk^{(v)} embedded into m vertex
// factors (identity elsewhere). i, j are 1-based matrix indices; u, v are
// 0-based vertex ids.
inline SparseSymmetricOperator edge_operator(int i, int j, int u, int v, int n, Group group,
                                             int m) {
  if (u == v) throw std::invalid_argument("edge_operator: u and v must differ");
  if (u < 0 || u >= m || v < 0 || v >= m) throw std::out_of_range("edge_operator: vertex id");
  const auto ops = site_operators(n, group);
  const int sites = local_site_count(n, group);
  const std::int64_t dim = std::int64_t{1} << (static_cast<std::int64_t>(sites) * m);
  std::vector<SparseSymmetricOperator::Triplet> trip;
  for (int k = 1; k <= n; ++k) {
    const PauliWord w = multiply(embed(ops[i - 1][k - 1], u, m), embed(ops[j - 1][k - 1], v, m));
    detail::append_word_triplets(w, 1.0, trip);
  }
  return SparseSymmetricOperator::from_triplets(dim, std::move(trip));
}

// H = sum_{(u,v) in E} sum_ij [C_uv]_ij Gamma_ij^{(u,v)}, with P~ operators
// under group SO.
inline LNCGHamiltonian build_H(const ProblemInstance& inst, int qubit_budget = 22) {
  inst.validate();
  const int sites = local_site_count(inst.n, inst.group);
  const std::int64_t qubits = static_cast<std::int64_t>(sites) * inst.graph.m;
  if (qubits > qubit_budget)
    throw BudgetError("build_H: " + std::to_string(qubits) + " qubits exceed budget " +
                      std::to_string(qubit_budget));
  const auto ops = site_operators(inst.n, inst.group);
  LNCGHamiltonian h;
  h.group = inst.group;
  h.m = inst.graph.m;
  h.n = inst.n;
  h.local_sites = sites;
  h.local_dim = std::int64_t{1} << sites;
  h.total_dim = std::int64_t{1} << qubits;
  std::vector<SparseSymmetricOperator::Triplet> trip;
  for (std::size_t e = 0; e < inst.graph.edges.size(); ++e) {
    const auto [u, v] = inst.graph.edges[e];
    const MatrixXd& c = inst.blocks[e];
    for (int i = 1; i <= inst.n; ++i)
      for (int j = 1; j <= inst.n; ++j) {
        const double w = c(i - 1, j - 1);
        if (w == 0.0) continue;
        for (int k = 1; k <= inst.n; ++k) {
          const PauliWord word =
              multiply(embed(ops[i - 1][k - 1], u, h.m), embed(ops[j - 1][k - 1], v, h.m));
          detail::append_word_triplets(word, w, trip);
        }
      }
  }
  h.op = SparseSymmetricOperator::from_triplets(h.total_dim, std::move(trip));
  return h;
}

// One-body regularizer H_1 = sum_v sum_i P_ii^{(v)}.
inline SparseSymmetricOperator build_H1(int m, int n, Group group) {
  const auto ops = site_operators(n, group);
  const int sites = local_site_count(n, group);
  const std::int64_t dim = std::int64_t{1} << (static_cast<std::int64_t>(sites) * m);
  std::vector<SparseSymmetricOperator::Triplet> trip;
  for (int v = 0; v < m; ++v)
    for (int i = 1; i <= n; ++i)
      detail::append_word_triplets(embed(ops[i - 1][i - 1], v, m), 1.0, trip);
  return SparseSymmetricOperator::from_triplets(dim, std::move(trip));
}

inline LNCGHamiltonian regularize(const LNCGHamiltonian& h, double zeta = 1e-6) {
  if (zeta < 0.0) throw std::invalid_argument("regularize: zeta must be nonnegative");
  LNCGHamiltonian out = h;
  out.zeta = zeta;
  if (zeta > 0.0) out.op = h.op.plus(build_H1(h.m, h.n, h.group), zeta);
  return out;
}

// Product state over (projected) Gaussian states for a feasible R-list.
inline VectorXd feasible_product_state(const ProblemInstance& inst,
                                       const std::vector<MatrixXd>& r_list) {
  const int sites = local_site_count(inst.n, inst.group);
  const std::int64_t local_dim = std::int64_t{1} << sites;
  VectorXd psi = VectorXd::Ones(1);
  for (int v = 0; v < inst.graph.m; ++v) {
    const auto st = free_fermion::gaussian_state(r_list[v]);
    const VectorXd local =
        inst.group == Group::O ? st.amplitudes : free_fermion::project_state_even(st);
    VectorXd next(psi.size() * local_dim);
    for (std::int64_t a = 0; a < psi.size(); ++a)
      for (std::int64_t b = 0; b < local_dim; ++b) next[a * local_dim + b] = psi[a] * local[b];
    psi = std::move(next);
  }
  return psi;
}

// <psi| H |psi> for the product of (projected) Gaussian states; equals
// objective(inst, r_list) by the embedding identity.
inline double feasible_energy(const ProblemInstance& inst, const std::vector<MatrixXd>& r_list,
                              const LNCGHamiltonian& h) {
  const VectorXd psi = feasible_product_state(inst, r_list);
  return h.op.expectation(psi);
}

inline double feasible_energy(const ProblemInstance& inst, const std::vector<MatrixXd>& r_list) {
  return feasible_energy(inst, r_list, build_H(inst));
}

}  // namespace lncg
