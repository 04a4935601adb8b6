#include <catch2/catch.hpp>

#include "lncg/pauli.hpp"

#include "test_helpers.hpp"

using namespace lncg;
using lncg_test::CMat;
using lncg_test::dense_word;

namespace {

PauliWord word_of(const std::string& letters, int phase = 0) {
  std::vector<PauliLetter> l;
  for (char c : letters) {
    switch (c) {
      case 'I': l.push_back(PauliLetter::I); break;
      case 'X': l.push_back(PauliLetter::X); break;
      case 'Y': l.push_back(PauliLetter::Y); break;
      case 'Z': l.push_back(PauliLetter::Z); break;
      default: FAIL("bad letter");
    }
  }
  return PauliWord(static_cast<int>(letters.size()), std::move(l), phase);
}

CMat dense_majorana(MajoranaKind k, int i, int n) { return dense_word(majorana(k, i, n)); }

}  // namespace

TEST_CASE("majorana constructors produce Jordan-Wigner strings", "[pauli]") {
  CHECK(majorana(MajoranaKind::Gamma, 1, 1) == word_of("X"));
  CHECK(majorana(MajoranaKind::GammaTilde, 2, 3) == word_of("ZYI"));
  CHECK(majorana(MajoranaKind::Gamma, 3, 3) == word_of("ZZX"));
  CHECK_THROWS_AS(majorana(MajoranaKind::Gamma, 0, 2), std::out_of_range);
  CHECK_THROWS_AS(majorana(MajoranaKind::Gamma, 3, 2), std::out_of_range);
}

TEST_CASE("gamma and gamma-tilde anticommute", "[pauli]") {
  // {gamma_1, gammatilde_1} on n=2 assembles to the zero operator.
  const CMat g = dense_majorana(MajoranaKind::Gamma, 1, 2);
  const CMat gt = dense_majorana(MajoranaKind::GammaTilde, 1, 2);
  CHECK((g * gt + gt * g).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("majorana anticommutation relations hold densely for n <= 4", "[pauli]") {
  for (int n = 1; n <= 4; ++n) {
    const CMat id = CMat::Identity(1 << n, 1 << n);
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        const CMat gi = dense_majorana(MajoranaKind::Gamma, i, n);
        const CMat gj = dense_majorana(MajoranaKind::Gamma, j, n);
        const CMat ti = dense_majorana(MajoranaKind::GammaTilde, i, n);
        const CMat tj = dense_majorana(MajoranaKind::GammaTilde, j, n);
        const double delta = i == j ? 2.0 : 0.0;
        CHECK((gi * gj + gj * gi - delta * id).cwiseAbs().maxCoeff() < 1e-15);
        CHECK((ti * tj + tj * ti - delta * id).cwiseAbs().maxCoeff() < 1e-15);
        CHECK((gi * tj + tj * gi).cwiseAbs().maxCoeff() < 1e-15);
      }
  }
}

TEST_CASE("p_ij matches its closed form", "[pauli]") {
  CHECK(p_ij(1, 1, 1) == word_of("Z"));
  CHECK(p_ij(1, 3, 3) == word_of("XZX", 2));
  CHECK(p_ij(3, 1, 3) == word_of("YZY", 2));
  CHECK(p_ij(2, 2, 3) == word_of("IZI"));
  CHECK_THROWS_AS(p_ij(0, 1, 2), std::out_of_range);
}

TEST_CASE("p_ij equals i gammatilde_i gamma_j for all n <= 5", "[pauli]") {
  const std::complex<double> im(0.0, 1.0);
  for (int n = 1; n <= 5; ++n)
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        const CMat lhs = to_sparse(p_ij(i, j, n)).to_dense().cast<std::complex<double>>();
        const CMat rhs = im * dense_majorana(MajoranaKind::GammaTilde, i, n) *
                         dense_majorana(MajoranaKind::Gamma, j, n);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() == 0.0);
      }
}

TEST_CASE("p_ij realizations square to identity and are real symmetric", "[pauli]") {
  for (int n = 1; n <= 4; ++n)
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        const PauliWord w = p_ij(i, j, n);
        CHECK(w.real_symmetric());
        const Eigen::MatrixXd m = to_sparse(w).to_dense();
        CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
        const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m.rows(), m.cols());
        CHECK((m * m - id).cwiseAbs().maxCoeff() == 0.0);
      }
}

TEST_CASE("p_ij commutes with the parity operator exactly", "[pauli]") {
  for (int n = 1; n <= 4; ++n) {
    const Eigen::MatrixXd par = to_sparse(parity_word(n)).to_dense();
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) {
        const Eigen::MatrixXd m = to_sparse(p_ij(i, j, n)).to_dense();
        CHECK((m * par - par * m).cwiseAbs().maxCoeff() == 0.0);
      }
  }
}

TEST_CASE("parity word", "[pauli]") {
  CHECK(parity_word(1) == word_of("Z"));
  CHECK(parity_word(2) == word_of("ZZ"));
}

TEST_CASE("project_even conditional table", "[pauli]") {
  // Anticommuting words vanish.
  CHECK(project_even(word_of("XI")).is_zero());
  CHECK(project_even(word_of("YZ")).is_zero());
  // Z (x) Z drops to the identity on one site.
  const PauliWord zz = project_even(word_of("ZZ"));
  REQUIRE(!zz.is_zero());
  CHECK(zz == word_of("I"));
  // Spot checks of each branch against a dense block-extraction oracle:
  // Pi0 A Pi0^T computed from the explicit 2^{n-1} x 2^n isometry.
  for (const auto& letters : {"ZZ", "XX", "YY", "IZ", "ZI", "II", "XYZ", "YYI", "ZXX", "IYY"}) {
    const PauliWord w = word_of(letters);
    const int n = w.sites;
    const int half = 1 << (n - 1);
    Eigen::MatrixXcd pi0 = Eigen::MatrixXcd::Zero(half, 1 << n);
    for (int b = 0; b < (1 << n); ++b) {
      if (__builtin_parity(static_cast<unsigned>(b))) continue;
      pi0(b & (half - 1), b) = 1.0;
    }
    const CMat expected = pi0 * dense_word(w) * pi0.transpose();
    const CMat got = dense_word(project_even(w));
    CHECK((expected - got).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("projected p_ij table for n=3 matches the two-qubit closed forms", "[pauli]") {
  // Rows i, columns j of the projected table.
  const PauliWord expected[3][3] = {
      {word_of("ZZ"), word_of("XI", 2), word_of("ZX", 2)},
      {word_of("XZ"), word_of("ZI"), word_of("XX", 2)},
      {word_of("IX"), word_of("YY", 2), word_of("IZ")},
  };
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      CAPTURE(i, j);
      CHECK(p_tilde_ij(i, j, 3) == expected[i - 1][j - 1]);
    }
}

TEST_CASE("projected p_ij never vanishes and keeps small cases", "[pauli]") {
  CHECK(p_tilde_ij(1, 1, 3) == word_of("ZZ"));
  CHECK(p_tilde_ij(3, 2, 3) == word_of("YY", 2));
  CHECK(p_tilde_ij(1, 1, 2) == word_of("Z"));
  for (int n = 2; n <= 5; ++n)
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) CHECK(!p_tilde_ij(i, j, n).is_zero());
}

TEST_CASE("to_sparse realizations", "[pauli]") {
  const Eigen::MatrixXd z = to_sparse(word_of("Z")).to_dense();
  CHECK(z(0, 0) == 1.0);
  CHECK(z(1, 1) == -1.0);
  CHECK(z(0, 1) == 0.0);

  const Eigen::MatrixXd xx = to_sparse(word_of("XX")).to_dense();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) CHECK(xx(r, c) == (r + c == 3 ? 1.0 : 0.0));

  // -Y (x) Y against the dense Kronecker oracle.
  const PauliWord myy = word_of("YY", 2);
  const CMat oracle = dense_word(myy);
  CHECK(oracle.imag().cwiseAbs().maxCoeff() == 0.0);
  const Eigen::MatrixXd got = to_sparse(myy).to_dense();
  CHECK((got.cast<std::complex<double>>() - oracle).cwiseAbs().maxCoeff() == 0.0);
  CHECK((got - got.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      CHECK((got(r, c) == 0.0 || got(r, c) == 1.0 || got(r, c) == -1.0));

  // Words with imaginary entries are rejected.
  CHECK_THROWS_AS(to_sparse(word_of("YX")), std::invalid_argument);
  CHECK_THROWS_AS(to_sparse(word_of("Z", 1)), std::invalid_argument);
}

TEST_CASE("word multiply matches dense products", "[pauli]") {
  const auto words = {word_of("XZ"), word_of("YY", 2), word_of("ZI"), word_of("XY", 1),
                      word_of("IZ", 2)};
  for (const auto& a : words)
    for (const auto& b : words) {
      const CMat expect = dense_word(a) * dense_word(b);
      const CMat got = dense_word(multiply(a, b));
      CHECK((expect - got).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("embed places local words at the right slot", "[pauli]") {
  const PauliWord w = word_of("XZ", 2);
  CHECK(embed(w, 0, 3) == word_of("XZIIII", 2));
  CHECK(embed(w, 2, 3) == word_of("IIIIXZ", 2));
  CHECK_THROWS_AS(embed(w, 3, 3), std::out_of_range);
}

TEST_CASE("random words agree with the dense Kronecker oracle", "[pauli]") {
  // Generator-based property check: realization, products and projections of
  // arbitrary words all match the independent dense path.
  Rng rng(47);
  auto random_word = [&rng](int n) {
    std::vector<PauliLetter> l;
    for (int k = 0; k < n; ++k) l.push_back(static_cast<PauliLetter>(rng.uniform_int(4)));
    return PauliWord(n, std::move(l), static_cast<int>(rng.uniform_int(4)));
  };
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform_int(3));
    const PauliWord a = random_word(n);
    const PauliWord b = random_word(n);
    // Product.
    const CMat prod = dense_word(multiply(a, b));
    CHECK((prod - dense_word(a) * dense_word(b)).cwiseAbs().maxCoeff() < 1e-15);
    // Realization, when real symmetric.
    if (a.real_symmetric()) {
      const Eigen::MatrixXd m = to_sparse(a).to_dense();
      CHECK((m.cast<std::complex<double>>() - dense_word(a)).cwiseAbs().maxCoeff() == 0.0);
    }
    // Projection against the explicit isometry.
    const int half = 1 << (n - 1);
    Eigen::MatrixXcd pi0 = Eigen::MatrixXcd::Zero(half, 1 << n);
    for (int bb = 0; bb < (1 << n); ++bb) {
      if (__builtin_parity(static_cast<unsigned>(bb))) continue;
      pi0(bb & (half - 1), bb) = 1.0;
    }
    const CMat expected = pi0 * dense_word(a) * pi0.transpose();
    CHECK((expected - dense_word(project_even(a))).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("sparse operator assembly merges and prunes", "[pauli]") {
  using Op = SparseSymmetricOperator;
  auto op = Op::from_triplets(2, {{0, 1, 0.5}, {0, 1, 0.5}, {1, 0, 1.0}, {0, 0, 1e-16}});
  CHECK(op.nonzeros() == 2);
  CHECK(op.entry(0, 1) == 1.0);
  CHECK(op.entry(0, 0) == 0.0);
  CHECK_THROWS_AS(Op::from_triplets(2, {{0, 1, 1.0}}), std::invalid_argument);
  Eigen::VectorXd x(2);
  x << 2.0, 3.0;
  const Eigen::VectorXd y = op.apply(x);
  CHECK(y[0] == 3.0);
  CHECK(y[1] == 2.0);
}
