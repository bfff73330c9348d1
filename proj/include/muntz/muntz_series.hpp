#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "muntz/numeric/complex.hpp"
#include "muntz/rational.hpp"

namespace muntz {

/// Equispaced Muntz exponents l/q, l = 0, 1, 2, ...
class MuntzGrid {
 public:
  explicit MuntzGrid(long q) : q_(q) {
    if (q < 2) throw DomainError("Muntz grid requires q >= 2");
  }
  long q() const noexcept { return q_; }
  Rational eta() const { return {1, q_}; }
  /// Exponent of the l-th Muntz monomial.
  Rational exponent(long l) const { return {l, q_}; }
  /// Grid index of exponent r; GridMismatchError if r is not a multiple of 1/q.
  long index_of(Rational r) const {
    const Rational scaled = r * Rational(q_);
    if (!scaled.is_integer()) {
      throw GridMismatchError("exponent " + r.str() + " is not a multiple of 1/" + std::to_string(q_) +
                              "; enlarge q");
    }
    return static_cast<long>(scaled.num());
  }
  friend bool operator==(const MuntzGrid&, const MuntzGrid&) = default;

 private:
  long q_;
};

/// Truncated series sum_{mu=0}^{M} a_mu t^{mu/q}; coefficients beyond M are unknown,
/// not zero.
class MuntzSeries {
 public:
  /// Zero series with truncation order `m`.
  MuntzSeries(MuntzGrid grid, long m, Precision p) : grid_(grid), coeffs_(static_cast<std::size_t>(m + 1), Complex(p)) {
    if (m < 0) throw TruncationError("negative truncation order");
  }
  MuntzSeries(MuntzGrid grid, std::vector<Complex> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw TruncationError("series needs at least one coefficient");
  }

  const MuntzGrid& grid() const noexcept { return grid_; }
  long truncation() const noexcept { return static_cast<long>(coeffs_.size()) - 1; }
  Precision precision() const { return coeffs_.front().precision(); }
  const std::vector<Complex>& coeffs() const noexcept { return coeffs_; }
  std::vector<Complex>& coeffs() noexcept { return coeffs_; }

  const Complex& operator[](long mu) const {
    if (mu < 0 || mu > truncation()) throw TruncationError("coefficient " + std::to_string(mu) + " beyond truncation");
    return coeffs_[static_cast<std::size_t>(mu)];
  }
  Complex& operator[](long mu) {
    if (mu < 0 || mu > truncation()) throw TruncationError("coefficient " + std::to_string(mu) + " beyond truncation");
    return coeffs_[static_cast<std::size_t>(mu)];
  }

  /// The same series truncated to a lower order.
  MuntzSeries truncated(long m) const {
    if (m > truncation()) throw TruncationError("cannot extend a truncated series");
    return {grid_, std::vector<Complex>(coeffs_.begin(), coeffs_.begin() + m + 1)};
  }

  /// Re-express on a finer grid whose q is a multiple of this grid's q.
  MuntzSeries regrid(const MuntzGrid& finer) const {
    if (finer.q() % grid_.q() != 0) throw GridMismatchError("regrid target q must be a multiple of the source q");
    const long f = finer.q() / grid_.q();
    MuntzSeries out(finer, truncation() * f, precision());
    for (long mu = 0; mu <= truncation(); ++mu) out.coeffs_[static_cast<std::size_t>(mu * f)] = coeffs_[static_cast<std::size_t>(mu)];
    return out;
  }

  /// Horner evaluation in s = t^{1/q}.
  Complex eval(const Real& t) const {
    if (t.sign() < 0) throw DomainError("series evaluation requires t >= 0");
    const Real s = root(t, static_cast<unsigned long>(grid_.q()));
    return eval_in_root(s);
  }
  /// Evaluation given s = t^{1/q} directly.
  Complex eval_in_root(const Real& s) const {
    Complex acc = coeffs_.back();
    for (long mu = truncation() - 1; mu >= 0; --mu) {
      acc = acc * s;
      acc += coeffs_[static_cast<std::size_t>(mu)];
    }
    return acc;
  }

  friend MuntzSeries operator+(const MuntzSeries& a, const MuntzSeries& b) { return combine(a, b, false); }
  friend MuntzSeries operator-(const MuntzSeries& a, const MuntzSeries& b) { return combine(a, b, true); }

  /// Cauchy product; the result keeps min(orders), the tail is discarded.
  friend MuntzSeries operator*(const MuntzSeries& a, const MuntzSeries& b) {
    check_grid(a, b);
    const long m = std::min(a.truncation(), b.truncation());
    MuntzSeries out(a.grid_, m, coarser(a.precision(), b.precision()));
    for (long i = 0; i <= m; ++i) {
      const Complex& ai = a.coeffs_[static_cast<std::size_t>(i)];
      if (ai.is_zero()) continue;
      for (long j = 0; i + j <= m; ++j) {
        const Complex& bj = b.coeffs_[static_cast<std::size_t>(j)];
        if (!bj.is_zero()) add_product(out.coeffs_[static_cast<std::size_t>(i + j)], ai, bj);
      }
    }
    return out;
  }
  friend MuntzSeries operator*(const MuntzSeries& a, const Complex& c) {
    MuntzSeries out = a;
    for (Complex& x : out.coeffs_) x = x * c;
    return out;
  }
  friend MuntzSeries operator*(const Complex& c, const MuntzSeries& a) { return a * c; }

 private:
  MuntzGrid grid_;
  std::vector<Complex> coeffs_;

  static void check_grid(const MuntzSeries& a, const MuntzSeries& b) {
    if (!(a.grid_ == b.grid_)) throw GridMismatchError("series on different grids; regrid to the lcm first");
  }
  static MuntzSeries combine(const MuntzSeries& a, const MuntzSeries& b, bool subtract) {
    check_grid(a, b);
    const long m = std::min(a.truncation(), b.truncation());
    MuntzSeries out(a.grid_, m, coarser(a.precision(), b.precision()));
    for (long mu = 0; mu <= m; ++mu) {
      const std::size_t k = static_cast<std::size_t>(mu);
      out.coeffs_[k] = subtract ? a.coeffs_[k] - b.coeffs_[k] : a.coeffs_[k] + b.coeffs_[k];
    }
    return out;
  }
};

}  // namespace muntz
