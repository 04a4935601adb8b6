#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "lncg/common.hpp"

namespace lncg {

// Real symmetric sparse matrix in CSR form. Assembly merges duplicate
// coordinates by summation, drops magnitudes below 1e-15 and verifies
// symmetry entrywise.
class SparseSymmetricOperator {
 public:
  struct Triplet {
    std::int64_t row;
    std::int64_t col;
    double value;
  };

  SparseSymmetricOperator() = default;

  static SparseSymmetricOperator from_triplets(std::int64_t dim, std::vector<Triplet> triplets,
                                               double prune = 1e-15, bool check_symmetry = true) {
    if (dim <= 0) throw std::invalid_argument("sparse dimension must be positive");
    // Stable sort keeps duplicates in generation order, so the (r,c) and
    // (c,r) merges accumulate in the same sequence and symmetry stays exact.
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseSymmetricOperator op;
    op.dim_ = dim;
    op.rowptr_.assign(static_cast<std::size_t>(dim) + 1, 0);
    std::vector<std::int64_t> cols;
    std::vector<double> vals;
    cols.reserve(triplets.size());
    vals.reserve(triplets.size());
    std::size_t i = 0;
    while (i < triplets.size()) {
      const std::int64_t r = triplets[i].row;
      const std::int64_t c = triplets[i].col;
      if (r < 0 || r >= dim || c < 0 || c >= dim)
        throw std::invalid_argument("sparse triplet out of range");
      double v = 0.0;
      while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c)
        v += triplets[i++].value;
      if (std::abs(v) > prune) {
        cols.push_back(c);
        vals.push_back(v);
        op.rowptr_[static_cast<std::size_t>(r) + 1]++;
      }
    }
    for (std::size_t r = 0; r < static_cast<std::size_t>(dim); ++r)
      op.rowptr_[r + 1] += op.rowptr_[r];
    op.col_ = std::move(cols);
    op.val_ = std::move(vals);
    if (check_symmetry && !op.is_symmetric(0.0))
      throw std::invalid_argument("sparse assembly is not symmetric");
    return op;
  }

  std::int64_t dim() const { return dim_; }
  std::size_t nonzeros() const { return col_.size(); }

  bool is_symmetric(double tol) const {
    for (std::int64_t r = 0; r < dim_; ++r) {
      for (std::size_t k = rowptr_[r]; k < rowptr_[r + 1]; ++k) {
        if (std::abs(val_[k] - entry(col_[k], r)) > tol) return false;
      }
    }
    return true;
  }

  double entry(std::int64_t r, std::int64_t c) const {
    const auto begin = col_.begin() + static_cast<std::ptrdiff_t>(rowptr_[r]);
    const auto end = col_.begin() + static_cast<std::ptrdiff_t>(rowptr_[r + 1]);
    const auto it = std::lower_bound(begin, end, c);
    if (it == end || *it != c) return 0.0;
    return val_[static_cast<std::size_t>(it - col_.begin())];
  }

  template <typename Scalar>
  void apply(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
             Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y) const {
    y.resize(dim_);
    const std::int64_t kParallelCutoff = 1 << 11;
    if (dim_ < kParallelCutoff) {
      apply_rows(x, y, 0, dim_);
      return;
    }
    const std::int64_t mid = dim_ / 2;
    std::thread worker([&] { apply_rows(x, y, 0, mid); });
    apply_rows(x, y, mid, dim_);
    worker.join();
  }

  template <typename Scalar>
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply(
      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y;
    apply(x, y);
    return y;
  }

  template <typename Scalar>
  Scalar expectation(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y;
    apply(x, y);
    return x.dot(y);  // conjugate-linear in x for complex scalars
  }

  Eigen::MatrixXd to_dense() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim_, dim_);
    for (std::int64_t r = 0; r < dim_; ++r)
      for (std::size_t k = rowptr_[r]; k < rowptr_[r + 1]; ++k) d(r, col_[k]) += val_[k];
    return d;
  }

  std::vector<Triplet> triplets() const {
    std::vector<Triplet> out;
    out.reserve(col_.size());
    for (std::int64_t r = 0; r < dim_; ++r)
      for (std::size_t k = rowptr_[r]; k < rowptr_[r + 1]; ++k)
        out.push_back({r, static_cast<std::int64_t>(col_[k]), val_[k]});
    return out;
  }

  SparseSymmetricOperator scaled(double a) const {
    auto t = triplets();
    for (auto& e : t) e.value *= a;
    return from_triplets(dim_, std::move(t), 0.0, false);
  }

  SparseSymmetricOperator plus(const SparseSymmetricOperator& other, double scale = 1.0) const {
    if (other.dim_ != dim_) throw std::invalid_argument("sparse plus: dimension mismatch");
    auto t = triplets();
    for (const auto& e : other.triplets()) t.push_back({e.row, e.col, scale * e.value});
    return from_triplets(dim_, std::move(t));
  }

  SparseSymmetricOperator shifted(double c) const {
    auto t = triplets();
    for (std::int64_t r = 0; r < dim_; ++r) t.push_back({r, r, c});
    return from_triplets(dim_, std::move(t));
  }

  // Coordinate-list text dump (row col value, 17 significant digits).
  void save_coordinate_text(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "lncg-operator 1\n" << dim_ << " " << nonzeros() << "\n";
    char buf[64];
    for (std::int64_t r = 0; r < dim_; ++r)
      for (std::size_t k = rowptr_[r]; k < rowptr_[r + 1]; ++k) {
        std::snprintf(buf, sizeof(buf), "%lld %lld %.17g\n", static_cast<long long>(r),
                      static_cast<long long>(col_[k]), val_[k]);
        out << buf;
      }
    if (!out) throw IoError("write failed for '" + path + "'");
  }

 private:
  std::int64_t dim_ = 0;
  std::vector<std::size_t> rowptr_;
  std::vector<std::int64_t> col_;
  std::vector<double> val_;

  template <typename Scalar>
  void apply_rows(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
                  Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y, std::int64_t r0,
                  std::int64_t r1) const {
    for (std::int64_t r = r0; r < r1; ++r) {
      Scalar acc{};
      for (std::size_t k = rowptr_[r]; k < rowptr_[r + 1]; ++k) acc += val_[k] * x[col_[k]];
      y[r] = acc;
    }
  }
};

}  // namespace lncg
