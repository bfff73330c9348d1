#pragma once

#include <utility>
#include <vector>

#include "muntz/muntz_series.hpp"
#include "muntz/numeric/special.hpp"

namespace muntz {

/// Caputo order theta = gamma/q_j, a positive non-integer rational in lowest terms.
class RationalOrder {
 public:
  explicit RationalOrder(Rational theta) : theta_(theta) {
    if (theta <= Rational(0)) throw ValidationError("order must be positive, got " + theta.str());
    if (theta.is_integer()) throw ValidationError("integer order " + theta.str() + " is not supported");
  }
  RationalOrder(std::int64_t num, std::int64_t den) : RationalOrder(Rational(num, den)) {}

  Rational value() const noexcept { return theta_; }
  std::int64_t gamma_num() const noexcept { return theta_.num(); }
  std::int64_t q_denom() const noexcept { return theta_.den(); }
  long ceil() const noexcept { return static_cast<long>(theta_.ceil()); }
  /// Band offset theta*q on a grid; GridMismatchError if q is not a multiple of q_j.
  long shift(const MuntzGrid& g) const { return g.index_of(theta_); }

  friend bool operator==(const RationalOrder&, const RationalOrder&) = default;

 private:
  Rational theta_;
};

/// I^alpha u^beta = Gamma(beta+1)/Gamma(alpha+beta+1) u^{alpha+beta}.
inline std::pair<Real, Rational> frac_integral_monomial(Rational alpha, Rational beta, Precision p) {
  if (beta < Rational(0)) throw DomainError("fractional integral of a monomial needs beta >= 0");
  if (alpha <= Rational(0)) throw DomainError("fractional integral order must be positive");
  const Precision w = p + 16;
  Real c = gamma_ratio(Real(beta + 1, w), Real(alpha + beta + 1, w)).rounded(p);
  return {std::move(c), alpha + beta};
}

/// theta^m = Gamma(m/q + 1) / Gamma(m/q + theta + 1), m = 0..max_m. Only the first q
/// entries need Gamma evaluations; the rest follow the exact ladder
///   theta^m = theta^{m-q} * m / (m + theta q).
class VarthetaTable {
 public:
  VarthetaTable(Rational theta, const MuntzGrid& g, long max_m, Precision p) : p_(p) {
    const long shift = g.index_of(theta);
    const long q = g.q();
    const Precision w = p + 16 + 8;  // the ladder accumulates max_m/q roundings
    std::vector<Real> work;
    work.reserve(static_cast<std::size_t>(max_m + 1));
    for (long m = 0; m <= max_m; ++m) {
      if (m < q) {
        const Rational x = Rational(m, q) + 1;
        work.push_back(gamma_ratio(Real(x, w), Real(x + theta, w)));
      } else {
        Real v = work[static_cast<std::size_t>(m - q)] * m;
        v /= m + shift;
        work.push_back(std::move(v));
      }
    }
    values_.reserve(work.size());
    for (const Real& v : work) values_.push_back(v.rounded(p));
  }
  const Real& operator()(long m) const { return values_.at(static_cast<std::size_t>(m)); }
  long size() const noexcept { return static_cast<long>(values_.size()); }

 private:
  Precision p_;
  std::vector<Real> values_;
};

/// Coefficient families of the fractional operators for a set of orders on one grid.
class FracCoeffs {
 public:
  FracCoeffs(std::vector<RationalOrder> orders, MuntzGrid g, long max_m, Precision p)
      : orders_(std::move(orders)), grid_(g), p_(p) {
    for (const RationalOrder& o : orders_) tables_.emplace_back(o.value(), g, max_m, p);
  }
  /// theta_j^m = Gamma(m/q + 1)/Gamma(m/q + theta_j + 1).
  const Real& vartheta(std::size_t j, long m) const { return tables_.at(j)(m); }
  /// xi_{j,i}^m = theta_j^{i+m}.
  const Real& xi(std::size_t j, long i, long m) const { return vartheta(j, i + m); }
  /// Gamma(mu/q - theta_j + 1)/Gamma(mu/q + 1), evaluated directly (no ladder).
  Real xi_bar(std::size_t j, long mu) const {
    const Rational x = Rational(mu, grid_.q()) + 1;
    const Precision w = p_ + 16;
    return gamma_ratio(Real(x - orders_.at(j).value(), w), Real(x, w)).rounded(p_);
  }
  const MuntzGrid& grid() const noexcept { return grid_; }

 private:
  std::vector<RationalOrder> orders_;
  MuntzGrid grid_;
  Precision p_;
  std::vector<VarthetaTable> tables_;
};

/// Termwise I^theta on a series, output truncation min(M + theta q, cap) (cap < 0: no cap).
inline MuntzSeries frac_integral_series(Rational theta, const MuntzSeries& s, long cap) {
  if (theta <= Rational(0)) throw DomainError("fractional integral order must be positive");
  const long shift = s.grid().index_of(theta);
  long m_out = s.truncation() + shift;
  if (cap >= 0) m_out = std::min(m_out, cap);
  MuntzSeries out(s.grid(), m_out, s.precision());
  if (m_out < shift) return out;
  const VarthetaTable vt(theta, s.grid(), m_out - shift, s.precision());
  for (long mu = 0; mu + shift <= m_out; ++mu) {
    const Complex& a = s[mu];
    if (!a.is_zero()) out[mu + shift] = a * vt(mu);
  }
  return out;
}

inline MuntzSeries frac_integral_series(Rational theta, const MuntzSeries& s) { return frac_integral_series(theta, s, -1); }
inline MuntzSeries frac_integral_series(const RationalOrder& theta, const MuntzSeries& s, long cap = -1) {
  return frac_integral_series(theta.value(), s, cap);
}

/// Termwise Caputo derivative: D^theta t^nu = Gamma(nu+1)/Gamma(nu-theta+1) t^{nu-theta};
/// integer powers below ceil(theta) are annihilated. Output truncation M - theta q.
inline MuntzSeries caputo_derivative_series(const RationalOrder& theta, const MuntzSeries& s) {
  const MuntzGrid& g = s.grid();
  const long shift = theta.shift(g);
  const long m_out = s.truncation() - shift;
  if (m_out < 0) throw TruncationError("series too short for a Caputo derivative of order " + theta.value().str());
  const Precision p = s.precision();
  const Precision w = p + 16;
  MuntzSeries out(g, m_out, p);
  const long q = g.q();
  for (long mu = 0; mu <= s.truncation(); ++mu) {
    const Complex& a = s[mu];
    if (a.is_zero()) continue;
    const Rational nu(mu, q);
    if (nu.is_integer() && nu.num() < theta.ceil()) continue;  // annihilated
    if (mu < shift || !(nu > Rational(theta.ceil() - 1))) {
      throw InadmissibleExponentError("exponent " + nu.str() + " has no Caputo derivative of order " +
                                      theta.value().str() + " in the Muntz space");
    }
    const Real c = gamma_ratio(Real(nu + 1, w), Real(nu + 1 - theta.value(), w)).rounded(p);
    out[mu - shift] = a * c;
  }
  return out;
}

/// Square matrix with a single nonzero diagonal at column offset `offset`:
/// (B)_{m, m+offset} = diag[m].
class BandMatrix {
 public:
  BandMatrix(long size, long offset, std::vector<Real> diag) : size_(size), offset_(offset), diag_(std::move(diag)) {}

  long size() const noexcept { return size_; }
  long offset() const noexcept { return offset_; }
  const std::vector<Real>& diagonal() const noexcept { return diag_; }

  /// Entry (r, c); zero off the band.
  Real entry(long r, long c, Precision p) const {
    if (c - r != offset_ || r < 0 || r >= static_cast<long>(diag_.size())) return Real(p);
    return diag_[static_cast<std::size_t>(r)];
  }
  bool is_zero() const noexcept { return diag_.empty(); }

  /// Row vector times matrix: (x B)_c = x_{c - offset} diag[c - offset].
  std::vector<Complex> left_apply(const std::vector<Complex>& x) const {
    std::vector<Complex> out(static_cast<std::size_t>(size_), Complex(x.front().precision()));
    for (std::size_t r = 0; r < diag_.size(); ++r) {
      out[r + static_cast<std::size_t>(offset_)] = x[r] * diag_[r];
    }
    return out;
  }

 private:
  long size_;
  long offset_;
  std::vector<Real> diag_;
};

/// Q_j of order N: the matrix with I^theta U = Q U on the monomial vector
/// U = [1, u^{1/q}, ..., u^{N/q}], truncated to N+1 columns.
inline BandMatrix q_matrix(const RationalOrder& theta, const MuntzGrid& g, long n, Precision p) {
  const long shift = theta.shift(g);
  if (shift > n) return {n + 1, shift, {}};
  const VarthetaTable vt(theta.value(), g, n - shift, p);
  std::vector<Real> diag;
  for (long m = 0; m + shift <= n; ++m) diag.push_back(vt(m));
  return {n + 1, shift, std::move(diag)};
}

}  // namespace muntz
