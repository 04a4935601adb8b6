#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lncg/common.hpp"
#include "lncg/sparse.hpp"

namespace lncg {

enum class PauliLetter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char to_char(PauliLetter p) { return "IXYZ"[static_cast<int>(p)]; }

// Signed tensor product of single-site Pauli letters. The operator value is
// i^phase * (letters[0] x letters[1] x ... ), with site 1 stored first and
// owning the most significant bit of the basis index. A distinguished ZERO
// value survives projection (see project_even).
struct PauliWord {
  int sites = 0;
  std::vector<PauliLetter> letters;
  int phase = 0;  // power of i, mod 4
  bool zero = false;

  PauliWord() = default;
  PauliWord(int n, std::vector<PauliLetter> l, int ph)
      : sites(n), letters(std::move(l)), phase(((ph % 4) + 4) % 4) {
    if (static_cast<int>(letters.size()) != sites)
      throw std::invalid_argument("PauliWord: letter count does not match site count");
  }

  static PauliWord zero_word(int n) {
    PauliWord w;
    w.sites = n;
    w.letters.assign(static_cast<std::size_t>(n), PauliLetter::I);
    w.zero = true;
    return w;
  }

  static PauliWord identity(int n) {
    return PauliWord(n, std::vector<PauliLetter>(static_cast<std::size_t>(n), PauliLetter::I), 0);
  }

  bool is_zero() const { return zero; }

  int count(PauliLetter p) const {
    int c = 0;
    for (auto l : letters) c += (l == p);
    return c;
  }

  // Entries are real iff phase + #Y is even; the matrix is additionally
  // symmetric (Hermitian real) iff phase and #Y are both even.
  bool real_entries() const { return (phase + count(PauliLetter::Y)) % 2 == 0; }
  bool real_symmetric() const { return phase % 2 == 0 && count(PauliLetter::Y) % 2 == 0; }

  // Commutes with Z^{(x)n} iff the number of X/Y letters is even.
  bool commutes_with_parity() const {
    return (count(PauliLetter::X) + count(PauliLetter::Y)) % 2 == 0;
  }

  std::string to_string() const {
    if (zero) return "0";
    static const char* pre[4] = {"+", "+i", "-", "-i"};
    std::string s = pre[phase];
    for (auto l : letters) s += to_char(l);
    return s;
  }

  bool operator==(const PauliWord& o) const {
    if (zero || o.zero) return zero == o.zero && sites == o.sites;
    return sites == o.sites && phase == o.phase && letters == o.letters;
  }
};

namespace detail {

// a * b = i^k * c for single-site letters.
inline std::pair<PauliLetter, int> letter_product(PauliLetter a, PauliLetter b) {
  using P = PauliLetter;
  if (a == P::I) return {b, 0};
  if (b == P::I) return {a, 0};
  if (a == b) return {P::I, 0};
  // XY=iZ, YZ=iX, ZX=iY and the reversed orders pick up i^3.
  const int ia = static_cast<int>(a), ib = static_cast<int>(b);
  const int ic = 6 - ia - ib;  // the remaining letter index
  const bool cyclic = (ib - ia + 3) % 3 == 1;  // X->Y->Z->X
  return {static_cast<PauliLetter>(ic), cyclic ? 1 : 3};
}

}  // namespace detail

enum class MajoranaKind { Gamma, GammaTilde };

// Jordan-Wigner Majorana strings: gamma_i = Z..Z X I..I, gammatilde_i = Z..Z Y I..I.
inline PauliWord majorana(MajoranaKind kind, int index, int n) {
  if (index < 1 || index > n) throw std::out_of_range("majorana: index out of range");
  std::vector<PauliLetter> l(static_cast<std::size_t>(n), PauliLetter::I);
  for (int k = 1; k < index; ++k) l[k - 1] = PauliLetter::Z;
  l[index - 1] = kind == MajoranaKind::Gamma ? PauliLetter::X : PauliLetter::Y;
  return PauliWord(n, std::move(l), 0);
}

// P_ij: -X_i Z..Z X_j (i<j), Z_i (i=j), -Y_j Z..Z Y_i (i>j). Equals
// i * gammatilde_i * gamma_j as a matrix product.
inline PauliWord p_ij(int i, int j, int n) {
  if (i < 1 || i > n || j < 1 || j > n) throw std::out_of_range("p_ij: index out of range");
  std::vector<PauliLetter> l(static_cast<std::size_t>(n), PauliLetter::I);
  if (i == j) {
    l[i - 1] = PauliLetter::Z;
    return PauliWord(n, std::move(l), 0);
  }
  const int lo = std::min(i, j), hi = std::max(i, j);
  for (int k = lo + 1; k < hi; ++k) l[k - 1] = PauliLetter::Z;
  const PauliLetter end = i < j ? PauliLetter::X : PauliLetter::Y;
  l[lo - 1] = end;
  l[hi - 1] = end;
  return PauliWord(n, std::move(l), 2);
}

inline PauliWord parity_word(int n) {
  return PauliWord(n, std::vector<PauliLetter>(static_cast<std::size_t>(n), PauliLetter::Z), 0);
}

// Pi_0 A Pi_0^T for an n-site word A: zero if A anticommutes with the parity
// operator; otherwise drop site 1 and rewrite the remaining sites according to
// the first letter (I/X pass through, Y gains a factor i and Z both multiply
// every remaining letter by Z on the right).
inline PauliWord project_even(const PauliWord& word) {
  if (word.sites < 2) throw std::invalid_argument("project_even: needs at least 2 sites");
  if (word.is_zero()) return PauliWord::zero_word(word.sites - 1);
  if (!word.commutes_with_parity()) return PauliWord::zero_word(word.sites - 1);
  const PauliLetter w1 = word.letters[0];
  int phase = word.phase;
  std::vector<PauliLetter> l(word.letters.begin() + 1, word.letters.end());
  if (w1 == PauliLetter::Y || w1 == PauliLetter::Z) {
    if (w1 == PauliLetter::Y) phase += 1;
    for (auto& lk : l) {
      auto [prod, ph] = detail::letter_product(lk, PauliLetter::Z);
      lk = prod;
      phase += ph;
    }
  }
  return PauliWord(word.sites - 1, std::move(l), phase);
}

// Projected P_ij on n-1 sites; never zero since P_ij commutes with parity.
inline PauliWord p_tilde_ij(int i, int j, int n) { return project_even(p_ij(i, j, n)); }

namespace detail {

struct WordAction {
  std::uint64_t flip_mask = 0;  // bits where the column index is flipped (X or Y)
  std::uint64_t sign_mask = 0;  // bits contributing (-1)^bit to the value (Y or Z)
  double base = 1.0;            // i^(phase + #Y) as a real number (word must be real)
};

inline WordAction word_action(const PauliWord& w) {
  if (!w.real_entries())
    throw std::invalid_argument("PauliWord '" + w.to_string() + "' has imaginary entries");
  WordAction a;
  int ipow = w.phase;
  for (int k = 0; k < w.sites; ++k) {
    const std::uint64_t bit = std::uint64_t{1} << (w.sites - 1 - k);  // site 1 = MSB
    switch (w.letters[static_cast<std::size_t>(k)]) {
      case PauliLetter::I:
        break;
      case PauliLetter::X:
        a.flip_mask |= bit;
        break;
      case PauliLetter::Y:
        a.flip_mask |= bit;
        a.sign_mask |= bit;
        ipow += 1;
        break;
      case PauliLetter::Z:
        a.sign_mask |= bit;
        break;
    }
  }
  a.base = (ipow % 4 == 0) ? 1.0 : -1.0;  // ipow is even for real words
  return a;
}

inline int parity_bits(std::uint64_t x) { return __builtin_parityll(x); }

}  // namespace detail

// Matrix realization: one +-1 entry per row, dimension 2^sites. Rejects words
// that are not Hermitian with real entries.
inline SparseSymmetricOperator to_sparse(const PauliWord& word) {
  const std::int64_t dim = std::int64_t{1} << word.sites;
  if (word.is_zero()) return SparseSymmetricOperator::from_triplets(dim, {});
  if (!word.real_symmetric())
    throw std::invalid_argument("to_sparse: word '" + word.to_string() +
                                "' is not real symmetric");
  const auto act = detail::word_action(word);
  std::vector<SparseSymmetricOperator::Triplet> trip;
  trip.reserve(static_cast<std::size_t>(dim));
  for (std::int64_t c = 0; c < dim; ++c) {
    const std::int64_t r = c ^ static_cast<std::int64_t>(act.flip_mask);
    const double v = act.base * (detail::parity_bits(static_cast<std::uint64_t>(c) & act.sign_mask)
                                     ? -1.0
                                     : 1.0);
    trip.push_back({r, c, v});
  }
  return SparseSymmetricOperator::from_triplets(dim, std::move(trip), 1e-15, false);
}

// y += coeff * W x without materializing the matrix.
template <typename Scalar>
inline void accumulate_apply(const PauliWord& word, double coeff,
                             const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
                             Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y) {
  if (word.is_zero()) return;
  const auto act = detail::word_action(word);
  const std::int64_t dim = std::int64_t{1} << word.sites;
  for (std::int64_t c = 0; c < dim; ++c) {
    const std::int64_t r = c ^ static_cast<std::int64_t>(act.flip_mask);
    const double sgn =
        detail::parity_bits(static_cast<std::uint64_t>(c) & act.sign_mask) ? -1.0 : 1.0;
    y[r] += coeff * act.base * sgn * x[c];
  }
}

// <psi| W |psi> for real words.
template <typename Scalar>
inline Scalar word_expectation(const PauliWord& word,
                               const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& psi) {
  if (word.is_zero()) return Scalar{};
  const auto act = detail::word_action(word);
  const std::int64_t dim = std::int64_t{1} << word.sites;
  Scalar acc{};
  for (std::int64_t c = 0; c < dim; ++c) {
    const std::int64_t r = c ^ static_cast<std::int64_t>(act.flip_mask);
    const double sgn =
        detail::parity_bits(static_cast<std::uint64_t>(c) & act.sign_mask) ? -1.0 : 1.0;
    if constexpr (std::is_same_v<Scalar, std::complex<double>>)
      acc += std::conj(psi[r]) * (act.base * sgn) * psi[c];
    else
      acc += psi[r] * (act.base * sgn) * psi[c];
  }
  return acc;
}

// Place a vertex-local word at slot `vertex` of `m` identical factors.
inline PauliWord embed(const PauliWord& word, int vertex, int m) {
  if (vertex < 0 || vertex >= m) throw std::out_of_range("embed: vertex out of range");
  if (word.is_zero()) return PauliWord::zero_word(word.sites * m);
  std::vector<PauliLetter> l(static_cast<std::size_t>(word.sites) * m, PauliLetter::I);
  std::copy(word.letters.begin(), word.letters.end(),
            l.begin() + static_cast<std::ptrdiff_t>(vertex) * word.sites);
  return PauliWord(word.sites * m, std::move(l), word.phase);
}

// Tensor product of two words on disjoint trailing sites (a occupies the
// leading sites).
inline PauliWord tensor(const PauliWord& a, const PauliWord& b) {
  if (a.is_zero() || b.is_zero()) return PauliWord::zero_word(a.sites + b.sites);
  std::vector<PauliLetter> l;
  l.reserve(static_cast<std::size_t>(a.sites + b.sites));
  l.insert(l.end(), a.letters.begin(), a.letters.end());
  l.insert(l.end(), b.letters.begin(), b.letters.end());
  return PauliWord(a.sites + b.sites, std::move(l), a.phase + b.phase);
}

// Full word product with phase tracking.
inline PauliWord multiply(const PauliWord& a, const PauliWord& b) {
  if (a.sites != b.sites) throw std::invalid_argument("multiply: site count mismatch");
  if (a.is_zero() || b.is_zero()) return PauliWord::zero_word(a.sites);
  std::vector<PauliLetter> l(static_cast<std::size_t>(a.sites));
  int phase = a.phase + b.phase;
  for (int k = 0; k < a.sites; ++k) {
    auto [prod, ph] = detail::letter_product(a.letters[k], b.letters[k]);
    l[k] = prod;
    phase += ph;
  }
  return PauliWord(a.sites, std::move(l), phase);
}

}  // namespace lncg
