#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "muntz/numeric/complex.hpp"
#include "muntz/numeric/matrix.hpp"
#include "muntz/numeric/real.hpp"

namespace muntz {

namespace detail {

// Spouge's formula:
//   Gamma(z+1) = (z+a)^(z+1/2) e^-(z+a) [c_0 + sum_{k=1}^{a-1} c_k / (z+k) + eps]
// with relative error below a^-1/2 (2 pi)^-(a+1/2). The c_k alternate in sign and
// reach ~e^a in size, so the sum is formed with about 2a guard bits.
struct SpougeTable {
  long a;
  Precision work;
  std::vector<Real> c;
};

inline long spouge_terms(long bits) { return static_cast<long>(std::ceil(0.38 * static_cast<double>(bits))) + 2; }

inline const SpougeTable& spouge_table(long bits) {
  bits = ((bits + 63) / 64) * 64;  // share tables between neighbouring precisions
  static std::mutex mutex;
  static std::map<long, std::unique_ptr<SpougeTable>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(bits);
  if (it != cache.end()) return *it->second;

  const long a = spouge_terms(bits);
  const Precision work(bits + 2 * a + 32);
  auto table = std::make_unique<SpougeTable>(SpougeTable{a, work, {}});
  table->c.reserve(static_cast<std::size_t>(a));
  table->c.push_back(sqrt(Real::pi(work) * 2L));
  Real fact(1, work);  // (k-1)!
  const Real half = Real(1, work) / 2L;
  for (long k = 1; k < a; ++k) {
    if (k > 1) fact *= (k - 1);
    const Real base(a - k, work);
    Real ck = pow(base, Real(k, work) - half) * exp(base) / fact;
    if (k % 2 == 0) ck = -ck;
    table->c.push_back(std::move(ck));
  }
  const SpougeTable& ref = *table;
  cache.emplace(bits, std::move(table));
  return ref;
}

/// ln Gamma(z+1) for z >= 0, accurate to about 2^-bits absolutely relative to the result's size.
inline Real lgamma1p_spouge(const Real& z, long bits) {
  const SpougeTable& t = spouge_table(bits);
  const Real zw = z.rounded(t.work);
  Real s = t.c[0];
  for (long k = 1; k < t.a; ++k) s += t.c[static_cast<std::size_t>(k)] / (zw + k);
  if (s.sign() <= 0) throw PrecisionError("Spouge sum lost all significant digits");
  const Real za = zw + t.a;
  const Real half = Real(1, t.work) / 2L;
  return (zw + half) * log(za) - za + log(s);
}

/// Extra bits needed so that exp(L) keeps `bits` relative bits when |L| ~ x ln x.
inline long log_guard(double x) {
  const double l = std::abs(x * std::log(std::max(x, 2.0))) + 2.0;
  return static_cast<long>(std::ceil(std::log2(l))) + 8;
}

constexpr long kFactorialLimit = 1000000;
constexpr double kRatioThreshold = 1000.0;

}  // namespace detail

/// ln Gamma(x) for x > 0, computed at the precision of `x`.
inline Real lgamma(const Real& x) {
  if (x.sign() <= 0) throw DomainError("lgamma requires x > 0");
  const Precision p = x.precision();
  const Precision w = p + 16;
  if (x < 1L) {
    // ln Gamma(x) = ln Gamma(x+1) - ln x
    const Real xw = x.rounded(w);
    return (detail::lgamma1p_spouge(xw, w.bits()) - log(xw)).rounded(p);
  }
  const Precision wl = w + detail::log_guard(x.to_double());
  return detail::lgamma1p_spouge(x.rounded(wl) - 1L, wl.bits()).rounded(p);
}

/// Gamma(x) for x > 0 at the precision of `x`; exact (correctly rounded) at integers.
inline Real gamma(const Real& x) {
  if (x.sign() <= 0) throw DomainError("gamma requires x > 0");
  const Precision p = x.precision();
  if (x.is_integer() && x <= detail::kFactorialLimit) {
    return Real::factorial(static_cast<unsigned long>(x.to_long() - 1), p);
  }
  if (x < 1L) {
    const Precision w = p + 16;
    const Real xw = x.rounded(w);
    return (gamma(xw + 1L) / xw).rounded(p);
  }
  const Precision w = p + 16 + detail::log_guard(x.to_double());
  const Real l = detail::lgamma1p_spouge(x.rounded(w) - 1L, w.bits());
  return exp(l).rounded(p);
}

/// Gamma(a)/Gamma(b) for a, b > 0 without intermediate overflow.
inline Real gamma_ratio(const Real& a, const Real& b) {
  if (a.sign() <= 0 || b.sign() <= 0) throw DomainError("gamma_ratio requires a, b > 0");
  const Precision p = coarser(a.precision(), b.precision());
  const Precision w = p + 16;
  const Real d = a - b;
  if (d.is_zero()) return Real(1, p);
  if (d.is_integer() && abs(d) <= 64L) {
    // rising factorial: Gamma(b+k)/Gamma(b) = b (b+1) ... (b+k-1)
    const long k = d.to_long();
    const Real& lo = k > 0 ? b : a;
    Real prod(1, w);
    for (long i = 0; i < std::abs(k); ++i) prod *= lo.rounded(w) + i;
    return (k > 0 ? prod : Real(1, w) / prod).rounded(p);
  }
  if (a.to_double() <= detail::kRatioThreshold && b.to_double() <= detail::kRatioThreshold) {
    return (gamma(a.rounded(w)) / gamma(b.rounded(w))).rounded(p);
  }
  const long extra = detail::log_guard(std::max(a.to_double(), b.to_double()));
  const Precision wl = w + extra;
  return exp(lgamma(a.rounded(wl)) - lgamma(b.rounded(wl))).rounded(p);
}

/// Bessel function of the first kind J_c(z) for integer c >= 0, by its power series.
inline Complex bessel_j(long c, const Complex& z) {
  if (c < 0) throw DomainError("bessel_j requires a non-negative order");
  const Precision p = z.precision();
  const double mag = abs(z).to_double();
  if (mag > 1e3) throw DomainError("bessel_j requires |z| <= 1000");
  if (z.is_zero()) return Complex(c == 0 ? 1 : 0, p);
  // terms peak near (|z|/2)^(2m)/(m!)^2 ~ e^|z|; add that many bits on top of the guard
  const Precision g = p + 32 + static_cast<long>(std::ceil(1.45 * mag));
  const Complex half_z = z.rounded(g) / 2L;
  const Complex w = -(half_z * half_z);
  Complex term = pow(half_z, c) / Real::factorial(static_cast<unsigned long>(c), g);
  Complex sum = term;
  const Real tol = Real::pow2(-p.bits() - 16, g);
  for (long m = 1;; ++m) {
    term = term * w / (m * (m + c));
    sum += term;
    if (static_cast<double>(m) > mag / 2.0 + 1.0 && abs(term) <= tol * abs(sum)) break;
    if (m > 200000) throw PrecisionError("bessel_j series did not converge");
  }
  return sum.rounded(p);
}

namespace detail {

inline void check_ml_order(Rational alpha) {
  if (alpha <= Rational(0) || alpha.den() > 12) throw DomainError("Mittag-Leffler order must be k/m > 0 with m <= 12");
}

/// Guard bits for summing sum z^k / Gamma(alpha k + 1) with |z| = mag: the largest term
/// is roughly exp(mag^(1/alpha)), and for alpha < 1 that dominates 3.5 |z|.
inline long ml_guard(Rational alpha, double mag) {
  const double peak = std::pow(mag, 1.0 / alpha.to_double());
  return static_cast<long>(std::ceil(3.5 * mag)) + static_cast<long>(std::ceil(1.45 * peak)) + 16;
}

/// Generates 1/Gamma(alpha k + 1), k = 0, 1, ..., using the exact ladder
/// Gamma(alpha (k+m) + 1) = Gamma(alpha k + 1) prod_{i=0}^{a-1} (alpha k + 1 + i) for alpha = a/m.
class InverseGammaLadder {
 public:
  InverseGammaLadder(Rational alpha, Precision p) : alpha_(alpha), p_(p) {
    const long m = alpha.den();
    base_.reserve(static_cast<std::size_t>(m));
    for (long k = 0; k < m; ++k) {
      if (k == 0) {
        base_.emplace_back(1, p);
      } else {
        base_.push_back(Real(1, p) / gamma(Real(alpha * Rational(k) + Rational(1), p)));
      }
    }
  }

  /// 1/Gamma(alpha k + 1); k must advance by one per call, starting at 0.
  Real next() {
    const long m = alpha_.den();
    const long a = alpha_.num();
    const std::size_t slot = static_cast<std::size_t>(k_ % m);
    Real out = base_[slot];
    // advance the slot to k + m
    Real denom(1, p_);
    for (long i = 0; i < a; ++i) denom *= a * k_ + m * (1 + i);
    base_[slot] = base_[slot] * pow(Real(m, p_), a) / denom;
    ++k_;
    return out;
  }

 private:
  Rational alpha_;
  Precision p_;
  std::vector<Real> base_;
  long k_ = 0;
};

inline long ml_min_terms(Rational alpha, double mag) {
  // terms decrease once (alpha k)^alpha > |z|
  return static_cast<long>(std::ceil(std::pow(mag, 1.0 / alpha.to_double()) / alpha.to_double())) + 2;
}

}  // namespace detail

/// One-parameter Mittag-Leffler function E_alpha(z) = sum_k z^k / Gamma(alpha k + 1).
/// `max_terms` caps the series (0 = no cap besides convergence).
inline Complex mittag_leffler(Rational alpha, const Complex& z, long max_terms = 0) {
  detail::check_ml_order(alpha);
  const Precision p = z.precision();
  const double mag = abs(z).to_double();
  if (mag > 1e3) throw DomainError("mittag_leffler requires |z| <= 1000");
  if (z.is_zero()) return Complex(1, p);
  const Precision g = p + detail::ml_guard(alpha, mag);
  detail::InverseGammaLadder inv(alpha, g);
  const Complex zg = z.rounded(g);
  Complex zk(1, g);
  Complex sum(g);
  Real max_term(g);
  const Real tol = Real::pow2(-p.bits() - 16, g);
  const long min_terms = detail::ml_min_terms(alpha, mag);
  for (long k = 0;; ++k) {
    Complex term = zk * inv.next();
    const Real at = abs(term);
    if (at > max_term) max_term = at;
    sum += term;
    if (max_terms > 0 && k + 1 >= max_terms) break;
    if (k >= min_terms && at <= tol * abs(sum)) break;
    if (k > 1000000) throw PrecisionError("mittag_leffler series did not converge");
    zk = zk * zg;
  }
  const Real as = abs(sum);
  if (as.is_zero() || max_term.magnitude_log2() - as.magnitude_log2() > g.bits() - p.bits() - 8) {
    throw PrecisionError("mittag_leffler lost all significant digits to cancellation");
  }
  return sum.rounded(p);
}

/// E_alpha(M) for a real square matrix of dimension <= 8.
inline RealMatrix matrix_mittag_leffler(Rational alpha, const RealMatrix& m) {
  detail::check_ml_order(alpha);
  if (!m.is_square() || m.rows() > 8) throw DomainError("matrix_mittag_leffler requires a square matrix of dim <= 8");
  const Precision p = m.precision();
  const double nu = m.norm_inf().to_double();
  if (nu > 1e2 * static_cast<double>(m.rows())) throw DomainError("matrix norm too large for the series");
  const Precision g = p + detail::ml_guard(alpha, nu);
  RealMatrix mg(m.rows(), m.cols(), g);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) mg(i, j) = m(i, j).rounded(g);
  detail::InverseGammaLadder inv(alpha, g);
  RealMatrix power = RealMatrix::identity(m.rows(), g);
  RealMatrix sum(m.rows(), m.cols(), g);
  const Real tol = Real::pow2(-p.bits() - 16, g);
  const long min_terms = detail::ml_min_terms(alpha, nu);
  for (long k = 0;; ++k) {
    RealMatrix term = power * inv.next();
    sum += term;
    if (k >= min_terms && term.norm_inf() <= tol * sum.norm_inf()) break;
    if (k > 1000000) throw PrecisionError("matrix_mittag_leffler series did not converge");
    power = power * mg;
  }
  RealMatrix out(m.rows(), m.cols(), p);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = sum(i, j).rounded(p);
  return out;
}

/// E_alpha(M) v without forming matrix powers: sum_k M^k v / Gamma(alpha k + 1).
inline std::vector<Real> matrix_mittag_leffler_apply(Rational alpha, const RealMatrix& m, const std::vector<Real>& v) {
  detail::check_ml_order(alpha);
  if (!m.is_square() || m.rows() > 8 || v.size() != m.rows()) {
    throw DomainError("matrix_mittag_leffler_apply requires a square matrix of dim <= 8 and a matching vector");
  }
  Precision p = m.precision();
  for (const Real& x : v) p = coarser(p, x.precision());
  const double nu = m.norm_inf().to_double();
  if (nu > 1e2 * static_cast<double>(m.rows())) throw DomainError("matrix norm too large for the series");
  const Precision g = p + detail::ml_guard(alpha, nu);
  RealMatrix mg(m.rows(), m.cols(), g);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) mg(i, j) = m(i, j).rounded(g);
  std::vector<Real> x;
  for (const Real& vi : v) x.push_back(vi.rounded(g));
  std::vector<Real> sum(v.size(), Real(g));
  detail::InverseGammaLadder inv(alpha, g);
  const Real tol = Real::pow2(-p.bits() - 16, g);
  const long min_terms = detail::ml_min_terms(alpha, nu);
  auto max_abs = [](const std::vector<Real>& u) {
    Real r(u.front().precision());
    for (const Real& e : u) r = max(r, abs(e));
    return r;
  };
  for (long k = 0;; ++k) {
    const Real c = inv.next();
    Real tmax(g);
    for (std::size_t i = 0; i < x.size(); ++i) {
      Real t = x[i] * c;
      tmax = max(tmax, abs(t));
      sum[i] += t;
    }
    if (k >= min_terms && tmax <= tol * max_abs(sum)) break;
    if (k > 1000000) throw PrecisionError("matrix_mittag_leffler_apply series did not converge");
    x = mg.apply(x);
  }
  std::vector<Real> out;
  for (const Real& s : sum) out.push_back(s.rounded(p));
  return out;
}

}  // namespace muntz
