#include <catch2/catch.hpp>

#include "lncg/hamiltonian.hpp"

#include "test_helpers.hpp"

using namespace lncg;
using lncg_test::CMat;
using lncg_test::dense_word;
using lncg_test::kron;

namespace {

ProblemInstance make_instance(Graph g, int n, Group group, std::vector<MatrixXd> blocks) {
  ProblemInstance inst;
  inst.graph = std::move(g);
  inst.n = n;
  inst.group = group;
  inst.blocks = std::move(blocks);
  return inst;
}

Eigen::VectorXd sorted_spectrum(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

}  // namespace

TEST_CASE("edge operators at small n", "[hamiltonian]") {
  // n = 1: Gamma_11 = Z (x) Z.
  const MatrixXd g11 = edge_operator(1, 1, 0, 1, 1, Group::O, 2).to_dense();
  const CMat zz = kron(dense_word(parity_word(1)), dense_word(parity_word(1)));
  CHECK((g11.cast<std::complex<double>>() - zz).cwiseAbs().maxCoeff() == 0.0);

  // n = 2 under SO: single qubit per vertex, Gamma~_11 = ZZ + XX.
  const MatrixXd gso = edge_operator(1, 1, 0, 1, 2, Group::SO, 2).to_dense();
  MatrixXd expect = MatrixXd::Zero(4, 4);
  expect += to_sparse(multiply(embed(p_tilde_ij(1, 1, 2), 0, 2),
                               embed(p_tilde_ij(1, 1, 2), 1, 2)))
                .to_dense();
  expect += to_sparse(multiply(embed(p_tilde_ij(1, 2, 2), 0, 2),
                               embed(p_tilde_ij(1, 2, 2), 1, 2)))
                .to_dense();
  CHECK((gso - expect).cwiseAbs().maxCoeff() == 0.0);
  // Literal form: Z(x)Z + X(x)X.
  MatrixXd xy = MatrixXd::Zero(4, 4);
  xy(0, 0) = xy(3, 3) = 1;
  xy(1, 1) = xy(2, 2) = -1;
  xy(0, 3) = xy(3, 0) = xy(1, 2) = xy(2, 1) = 1;
  CHECK((gso - xy).cwiseAbs().maxCoeff() == 0.0);

  // Operator norm of projected edge operators is at most n (n = 3, 16x16).
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      const auto spec = sorted_spectrum(edge_operator(i, j, 0, 1, 3, Group::SO, 2).to_dense());
      CHECK(std::max(std::abs(spec[0]), std::abs(spec[spec.size() - 1])) <= 3.0 + 1e-12);
    }

  CHECK_THROWS_AS(edge_operator(1, 1, 0, 0, 2, Group::O, 2), std::invalid_argument);
}

TEST_CASE("n=1 Hamiltonian is the classical Ising model", "[hamiltonian]") {
  Graph tri;
  tri.m = 3;
  tri.edges = {{0, 1}, {0, 2}, {1, 2}};
  std::vector<MatrixXd> blocks;
  const double w[3] = {0.7, -1.3, 0.4};
  for (double x : w) {
    MatrixXd b(1, 1);
    b << x;
    blocks.push_back(b);
  }
  const auto inst = make_instance(tri, 1, Group::O, blocks);
  const auto h = build_H(inst);
  CHECK(h.total_dim == 8);
  MatrixXd expect = MatrixXd::Zero(8, 8);
  int e = 0;
  for (auto [u, v] : tri.edges) {
    expect += w[e++] * to_sparse(multiply(embed(parity_word(1), u, 3),
                                          embed(parity_word(1), v, 3)))
                           .to_dense();
  }
  CHECK((h.op.to_dense() - expect).cwiseAbs().maxCoeff() == 0.0);
  // Diagonal with classical Ising energies.
  CHECK(h.op.to_dense().cwiseAbs().sum() ==
        Approx(h.op.to_dense().diagonal().cwiseAbs().sum()));
}

TEST_CASE("SO(2) diag blocks give the XY model spectrum", "[hamiltonian]") {
  Rng rng(301);
  Graph path = path_graph(3);
  std::vector<MatrixXd> blocks;
  std::vector<double> alpha;
  for (std::size_t e = 0; e < path.edges.size(); ++e) {
    alpha.push_back(rng.gaussian());
    MatrixXd c = MatrixXd::Zero(2, 2);
    c(0, 0) = alpha.back();
    blocks.push_back(c);
  }
  const auto h = build_H(make_instance(path, 2, Group::SO, blocks));
  CHECK(h.total_dim == 8);

  // Independent XY-model assembly: sum alpha (XX + YY) on m qubits.
  CMat hxy = CMat::Zero(8, 8);
  int e = 0;
  for (auto [u, v] : path.edges) {
    for (auto letter : {PauliLetter::X, PauliLetter::Y}) {
      std::vector<PauliLetter> l(3, PauliLetter::I);
      l[u] = letter;
      l[v] = letter;
      hxy += alpha[e] * dense_word(PauliWord(3, l, 0));
    }
    e++;
  }
  CHECK(hxy.imag().cwiseAbs().maxCoeff() < 1e-15);
  const Eigen::VectorXd s1 = sorted_spectrum(h.op.to_dense());
  const Eigen::VectorXd s2 = sorted_spectrum(hxy.real());
  CHECK((s1 - s2).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("relaxation upper-bounds feasible product states", "[hamiltonian]") {
  const auto inst = gen_group_sync(2, 1, 3, 0.2, Group::SO, 311);
  const auto h = build_H(inst);
  CHECK(h.total_dim == 16);
  CHECK(h.op.to_dense().trace() == 0.0);  // every Pauli term is traceless
  const double lmax = sorted_spectrum(h.op.to_dense()).maxCoeff();
  CHECK(lmax >= 3.0 - 1e-10);  // identity blocks would achieve n on one edge
  Rng rng(313);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<MatrixXd> rs;
    for (int v = 0; v < 2; ++v) rs.push_back(orthlin::haar_rotation(3, rng));
    CHECK(feasible_energy(inst, rs, h) <= lmax + 1e-9);
  }
}

TEST_CASE("feasible product-state energy equals the classical objective", "[hamiltonian]") {
  Rng rng(317);
  for (Group group : {Group::O, Group::SO}) {
    const auto inst = gen_group_sync(3, 2, 3, 0.4, group, 331);
    ProblemInstance local = inst;
    local.group = group;
    const auto h = build_H(local);
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<MatrixXd> rs;
      for (int v = 0; v < 3; ++v) rs.push_back(orthlin::haar_sample(3, group, rng));
      CHECK(feasible_energy(local, rs, h) == Approx(objective(local, rs)).margin(1e-8));
    }
  }

  // Noiseless planted solution attains n|E| through the Hamiltonian too.
  const auto noiseless = gen_group_sync(4, 3, 3, 0.0, Group::SO, 337);
  const auto h = build_H(noiseless);
  CHECK(feasible_energy(noiseless, *noiseless.planted, h) ==
        Approx(3.0 * noiseless.graph.edges.size()).margin(1e-8));

  // Single edge with identity assignment scores tr(C_uv).
  Graph pair;
  pair.m = 2;
  pair.edges = {{0, 1}};
  Rng rng2(341);
  MatrixXd c(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) c(i, j) = rng2.gaussian();
  const auto single = make_instance(pair, 3, Group::O, {c});
  std::vector<MatrixXd> ident(2, MatrixXd::Identity(3, 3));
  CHECK(feasible_energy(single, ident) == Approx(c.trace()).margin(1e-8));
}

TEST_CASE("H commutes with per-vertex parity under group O", "[hamiltonian]") {
  const auto inst = gen_group_sync(2, 1, 3, 0.5, Group::O, 347);
  const MatrixXd h = build_H(inst).op.to_dense();
  for (int v = 0; v < 2; ++v) {
    const MatrixXd par = to_sparse(embed(parity_word(3), v, 2)).to_dense();
    CHECK((h * par - par * h).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("one-body regularizer H1", "[hamiltonian]") {
  const MatrixXd h1_min = build_H1(1, 1, Group::O).to_dense();
  CHECK((h1_min - to_sparse(parity_word(1)).to_dense()).cwiseAbs().maxCoeff() == 0.0);

  const MatrixXd h1 = build_H1(2, 3, Group::O).to_dense();
  MatrixXd expect = MatrixXd::Zero(64, 64);
  for (int v = 0; v < 2; ++v)
    for (int i = 1; i <= 3; ++i)
      expect += to_sparse(embed(p_ij(i, i, 3), v, 2)).to_dense();
  CHECK((h1 - expect).cwiseAbs().maxCoeff() == 0.0);
  CHECK(h1.trace() == 0.0);

  // Expectation on a product of Gaussian states is sum_v tr(R_v).
  Rng rng(349);
  Graph pair;
  pair.m = 2;
  pair.edges = {{0, 1}};
  const auto inst = make_instance(pair, 3, Group::O, {MatrixXd::Identity(3, 3)});
  std::vector<MatrixXd> rs = {orthlin::haar_orthogonal(3, rng), orthlin::haar_orthogonal(3, rng)};
  const VectorXd psi = feasible_product_state(inst, rs);
  const double val = psi.dot(h1 * psi);
  CHECK(val == Approx(rs[0].trace() + rs[1].trace()).margin(1e-8));
}

TEST_CASE("regularization shifts and symmetry breaking", "[hamiltonian]") {
  const auto inst = gen_group_sync(2, 1, 3, 0.0, Group::SO, 353);
  const auto h = build_H(inst);
  const auto same = regularize(h, 0.0);
  CHECK((same.op.to_dense() - h.op.to_dense()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(regularize(h, -1.0), std::invalid_argument);

  const double zeta = 1e-3;
  const auto reg = regularize(h, zeta);
  const double l0 = sorted_spectrum(h.op.to_dense()).maxCoeff();
  const double l1 = sorted_spectrum(reg.op.to_dense()).maxCoeff();
  // Weyl: the top eigenvalue moves by at most zeta * ||H1|| <= zeta * m * n.
  CHECK(std::abs(l1 - l0) <= zeta * 2 * 3 + 1e-12);
}

TEST_CASE("qubit budget is enforced", "[hamiltonian]") {
  const auto inst = gen_group_sync(6, 3, 2, 0.0, Group::SO, 359);
  CHECK_THROWS_AS(build_H(inst, 5), BudgetError);  // needs 6 qubits
  CHECK_NOTHROW(build_H(inst, 6));
}

TEST_CASE("local O(n) symmetry under closed-form plane rotations", "[hamiltonian]") {
  // U = cos(theta/2) I + sin(theta/2) gamma_k gamma_l applied on every vertex
  // commutes with the unregularized H.
  Rng rng(367);
  const auto inst = gen_group_sync(2, 1, 3, 0.3, Group::O, 373);
  const MatrixXd h = build_H(inst).op.to_dense();
  for (int rep = 0; rep < 5; ++rep) {
    const int k = 1 + static_cast<int>(rng.uniform_int(3));
    int l = 1 + static_cast<int>(rng.uniform_int(3));
    while (l == k) l = 1 + static_cast<int>(rng.uniform_int(3));
    const double theta = 6.283185307179586 * rng.uniform01();
    const CMat gk = dense_word(majorana(MajoranaKind::Gamma, k, 3));
    const CMat gl = dense_word(majorana(MajoranaKind::Gamma, l, 3));
    const CMat u_local = std::cos(theta / 2) * CMat::Identity(8, 8) + std::sin(theta / 2) * gk * gl;
    const CMat u = kron(u_local, u_local);
    CHECK((u * u.adjoint() - CMat::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-12);
    const CMat conj = u * h.cast<std::complex<double>>() * u.adjoint();
    CHECK((conj - h.cast<std::complex<double>>()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("noiseless instances are spectrum-equivalent to identity blocks", "[hamiltonian]") {
  for (Group group : {Group::O, Group::SO}) {
    const auto inst = gen_group_sync(2, 1, 3, 0.0, group, 379);
    std::vector<MatrixXd> ident_blocks(inst.blocks.size(), MatrixXd::Identity(3, 3));
    const auto ident = make_instance(inst.graph, 3, group, ident_blocks);
    const Eigen::VectorXd s1 = sorted_spectrum(build_H(inst).op.to_dense());
    const Eigen::VectorXd s2 = sorted_spectrum(build_H(ident).op.to_dense());
    CHECK((s1 - s2).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("operator coordinate dump", "[hamiltonian]") {
  const auto inst = gen_group_sync(2, 1, 2, 0.0, Group::SO, 383);
  const auto h = build_H(inst);
  const std::string path = "/tmp/lncg_test_operator.txt";
  h.op.save_coordinate_text(path);
  std::ifstream in(path);
  std::string magic;
  std::getline(in, magic);
  CHECK(magic == "lncg-operator 1");
  std::int64_t dim = 0;
  std::size_t nnz = 0;
  in >> dim >> nnz;
  CHECK(dim == h.total_dim);
  CHECK(nnz == h.op.nonzeros());
  std::int64_t r, c;
  double val;
  in >> r >> c >> val;
  CHECK(val == h.op.entry(r, c));
  std::remove(path.c_str());
}
