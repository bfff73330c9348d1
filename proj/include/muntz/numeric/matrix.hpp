#pragma once

#include <cstddef>
#include <vector>

#include "muntz/numeric/real.hpp"

namespace muntz {

/// Small dense row-major matrix of Reals.
class RealMatrix {
 public:
  RealMatrix(std::size_t rows, std::size_t cols, Precision p)
      : rows_(rows), cols_(cols), data_(rows * cols, Real(p)) {}

  static RealMatrix identity(std::size_t n, Precision p) {
    RealMatrix m(n, n, p);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Real(1, p);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  Real& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Real& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Precision precision() const {
    Precision p(1L << 30);
    for (const Real& x : data_) p = coarser(p, x.precision());
    return p;
  }

  /// Induced infinity norm (maximum absolute row sum); bounds the spectral radius.
  Real norm_inf() const {
    Real best(precision());
    for (std::size_t r = 0; r < rows_; ++r) {
      Real s(best.precision());
      for (std::size_t c = 0; c < cols_; ++c) s += abs((*this)(r, c));
      if (s > best) best = s;
    }
    return best;
  }

  friend RealMatrix operator*(const RealMatrix& a, const RealMatrix& b) {
    if (a.cols_ != b.rows_) throw DomainError("matrix dimension mismatch");
    RealMatrix out(a.rows_, b.cols_, coarser(a.precision(), b.precision()));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k).is_zero()) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) add_product(out(i, j), a(i, k), b(k, j));
      }
    return out;
  }
  friend RealMatrix operator*(const RealMatrix& a, const Real& s) {
    RealMatrix out = a;
    for (Real& x : out.data_) x *= s;
    return out;
  }
  RealMatrix& operator+=(const RealMatrix& b) {
    if (rows_ != b.rows_ || cols_ != b.cols_) throw DomainError("matrix dimension mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += b.data_[i];
    return *this;
  }

  std::vector<Real> apply(const std::vector<Real>& v) const {
    if (v.size() != cols_) throw DomainError("matrix-vector dimension mismatch");
    std::vector<Real> out(rows_, Real(precision()));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) add_product(out[i], (*this)(i, j), v[j]);
    return out;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Real> data_;
};

}  // namespace muntz
