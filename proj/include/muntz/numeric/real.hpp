#pragma once

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <compare>
#include <concepts>
#include <type_traits>
#include <cstdint>
#include <cstdlib>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

#include "muntz/errors.hpp"
#include "muntz/rational.hpp"

namespace muntz {

/// Binary precision (significand bits) of a multiprecision value.
class Precision {
 public:
  static constexpr long kMinBits = 64;

  explicit Precision(long bits) : bits_(bits) {
    if (bits < kMinBits) throw DomainError("precision below 64 bits: " + std::to_string(bits));
  }

  long bits() const noexcept { return bits_; }

  /// Precision widened by `extra` guard bits.
  Precision operator+(long extra) const { return Precision(bits_ + extra); }

  friend bool operator==(Precision, Precision) = default;
  friend auto operator<=>(Precision, Precision) = default;

  /// Working precision tied to an approximation degree: the largest entries of the
  /// conversion matrix between the Jacobi and monomial bases grow like (3 + 2 sqrt 2)^N,
  /// about 2^{2.54 N}, so 2.7N bits are spent as headroom on top of 64 working bits.
  static Precision for_degree(long degree) {
    const long policy = (27 * degree + 9) / 10 + 64;  // ceil(2.7 N) in integers
    return Precision(std::max(128L, policy));
  }

 private:
  long bits_;
};

inline Precision coarser(Precision a, Precision b) { return a.bits() <= b.bits() ? a : b; }

/// Radix-2 multiprecision real carrying its own precision. Binary operations round
/// to the coarser of the two operand precisions. NaN and infinities are never
/// produced: the operation throws DomainError or OverflowError instead.
class Real {
 public:
  explicit Real(Precision p) {
    mpfr_init2(v_, p.bits());
    mpfr_set_zero(v_, 1);
  }
  template <std::integral I>
  Real(I value, Precision p) {
    mpfr_init2(v_, p.bits());
    if constexpr (std::is_signed_v<I>) {
      mpfr_set_si(v_, static_cast<long>(value), MPFR_RNDN);
    } else {
      mpfr_set_ui(v_, static_cast<unsigned long>(value), MPFR_RNDN);
    }
  }
  Real(double value, Precision p) {
    if (!std::isfinite(value)) throw DomainError("non-finite double converted to Real");
    mpfr_init2(v_, p.bits());
    mpfr_set_d(v_, value, MPFR_RNDN);
  }
  Real(Rational r, Precision p) {
    mpfr_init2(v_, p.bits());
    if (r.is_integer()) {
      mpfr_set_si(v_, static_cast<long>(r.num()), MPFR_RNDN);
    } else {
      mpfr_set_si(v_, static_cast<long>(r.num()), MPFR_RNDN);
      mpfr_div_si(v_, v_, static_cast<long>(r.den()), MPFR_RNDN);
    }
  }

  /// Parses a decimal literal ("12", "-0.5", "1.25e-3") directly at precision `p`.
  static Real parse(std::string_view text, Precision p) {
    Real r(p);
    std::string buf(text);
    char* end = nullptr;
    if (!buf.empty()) mpfr_strtofr(r.v_, buf.c_str(), &end, 10, MPFR_RNDN);
    if (buf.empty() || end != buf.c_str() + buf.size()) {
      throw ValidationError("malformed decimal literal '" + buf + "'");
    }
    r.check("parse");
    return r;
  }

  static Real pi(Precision p) {
    Real r(p);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }
  static Real log2_const(Precision p) {
    Real r(p);
    mpfr_const_log2(r.v_, MPFR_RNDN);
    return r;
  }
  /// n! correctly rounded.
  static Real factorial(unsigned long n, Precision p) {
    Real r(p);
    mpfr_fac_ui(r.v_, n, MPFR_RNDN);
    r.check("factorial");
    return r;
  }
  /// 2^e exactly.
  static Real pow2(long e, Precision p) {
    Real r(p);
    mpfr_set_ui_2exp(r.v_, 1, e, MPFR_RNDN);
    return r;
  }

  Real(const Real& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  Real(Real&& other) noexcept {
    *v_ = *other.v_;
    other.v_->_mpfr_d = nullptr;
  }
  Real& operator=(const Real& other) {
    if (this != &other) {
      if (v_->_mpfr_d == nullptr) {
        mpfr_init2(v_, mpfr_get_prec(other.v_));
      } else if (mpfr_get_prec(v_) != mpfr_get_prec(other.v_)) {
        mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      }
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& other) noexcept {
    if (this != &other) std::swap(*v_, *other.v_);
    return *this;
  }
  ~Real() {
    if (v_->_mpfr_d != nullptr) mpfr_clear(v_);
  }

  Precision precision() const { return Precision(static_cast<long>(mpfr_get_prec(v_))); }
  mpfr_srcptr get() const noexcept { return v_; }
  mpfr_ptr get_mutable() noexcept { return v_; }

  bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
  int sign() const noexcept { return mpfr_sgn(v_); }
  bool is_integer() const noexcept { return mpfr_integer_p(v_) != 0; }
  double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const noexcept { return mpfr_get_si(v_, MPFR_RNDN); }

  /// log2 of the magnitude, rounded down; a large negative value for zero.
  long magnitude_log2() const noexcept {
    if (is_zero()) return -(1L << 40);
    return static_cast<long>(mpfr_get_exp(v_)) - 1;
  }

  /// Value re-rounded to precision `p`.
  Real rounded(Precision p) const {
    Real r(p);
    mpfr_set(r.v_, v_, MPFR_RNDN);
    return r;
  }

  /// Decimal representation with `digits` significant digits (0 = enough to round-trip).
  std::string str(int digits = 0) const {
    if (digits <= 0) digits = static_cast<int>(std::ceil(static_cast<double>(mpfr_get_prec(v_)) * 0.30103)) + 2;
    char* out = nullptr;
    mpfr_asprintf(&out, "%.*Rg", digits - 1 < 0 ? 0 : digits - 1, v_);
    std::string s(out);
    mpfr_free_str(out);
    return s;
  }
  friend std::ostream& operator<<(std::ostream& os, const Real& r) { return os << r.str(20); }

  Real operator-() const {
    Real r(precision());
    mpfr_neg(r.v_, v_, MPFR_RNDN);
    return r;
  }

#define MUNTZ_REAL_BINOP(op, fn, fn_si)                                   \
  friend Real operator op(const Real& a, const Real& b) {                 \
    Real r(coarser(a.precision(), b.precision()));                        \
    fn(r.v_, a.v_, b.v_, MPFR_RNDN);                                      \
    r.check(#op);                                                         \
    return r;                                                             \
  }                                                                       \
  friend Real operator op(const Real& a, long b) {                        \
    Real r(a.precision());                                                \
    fn_si(r.v_, a.v_, b, MPFR_RNDN);                                      \
    r.check(#op);                                                         \
    return r;                                                             \
  }                                                                       \
  Real& operator op##=(const Real& b) {                                   \
    if (mpfr_get_prec(b.v_) < mpfr_get_prec(v_))                          \
      mpfr_prec_round(v_, mpfr_get_prec(b.v_), MPFR_RNDN);                \
    fn(v_, v_, b.v_, MPFR_RNDN);                                          \
    check(#op "=");                                                       \
    return *this;                                                         \
  }                                                                       \
  Real& operator op##=(long b) {                                          \
    fn_si(v_, v_, b, MPFR_RNDN);                                          \
    check(#op "=");                                                       \
    return *this;                                                         \
  }                                                                       \
  friend Real operator op(const Real&, double) = delete;                  \
  Real& operator op##=(double) = delete;

  MUNTZ_REAL_BINOP(+, mpfr_add, mpfr_add_si)
  MUNTZ_REAL_BINOP(-, mpfr_sub, mpfr_sub_si)
  MUNTZ_REAL_BINOP(*, mpfr_mul, mpfr_mul_si)
  MUNTZ_REAL_BINOP(/, mpfr_div, mpfr_div_si)
#undef MUNTZ_REAL_BINOP

  friend Real operator+(long a, const Real& b) { return b + a; }
  friend Real operator*(long a, const Real& b) { return b * a; }
  friend Real operator-(long a, const Real& b) {
    Real r(b.precision());
    mpfr_si_sub(r.v_, a, b.v_, MPFR_RNDN);
    r.check("-");
    return r;
  }
  friend Real operator/(long a, const Real& b) {
    Real r(b.precision());
    mpfr_si_div(r.v_, a, b.v_, MPFR_RNDN);
    r.check("/");
    return r;
  }

  friend bool operator==(const Real& a, const Real& b) noexcept { return mpfr_equal_p(a.v_, b.v_) != 0; }
  friend std::partial_ordering operator<=>(const Real& a, const Real& b) noexcept {
    const int c = mpfr_cmp(a.v_, b.v_);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }
  friend bool operator==(const Real& a, long b) noexcept { return mpfr_cmp_si(a.v_, b) == 0; }
  friend std::partial_ordering operator<=>(const Real& a, long b) noexcept {
    const int c = mpfr_cmp_si(a.v_, b);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
  }

  /// acc += a * b, rounded once at the precision of `acc`.
  friend void add_product(Real& acc, const Real& a, const Real& b) {
    mpfr_fma(acc.v_, a.v_, b.v_, acc.v_, MPFR_RNDN);
    acc.check("fma");
  }
  /// acc -= a * b, rounded once at the precision of `acc`.
  friend void sub_product(Real& acc, const Real& a, const Real& b) {
    mpfr_fms(acc.v_, a.v_, b.v_, acc.v_, MPFR_RNDN);
    mpfr_neg(acc.v_, acc.v_, MPFR_RNDN);
    acc.check("fms");
  }

  void check(const char* what) const {
    if (mpfr_nan_p(v_)) throw DomainError(std::string("NaN produced by ") + what);
    if (mpfr_inf_p(v_)) throw OverflowError(std::string("overflow in ") + what);
  }

 private:
  mpfr_t v_;

  template <typename Fn>
  friend Real apply_unary(const Real& x, Fn fn, const char* what);
};

template <typename Fn>
Real apply_unary(const Real& x, Fn fn, const char* what) {
  Real r(x.precision());
  fn(r.v_, x.v_, MPFR_RNDN);
  r.check(what);
  return r;
}

inline Real abs(const Real& x) { return apply_unary(x, mpfr_abs, "abs"); }
inline Real sqrt(const Real& x) {
  if (x.sign() < 0) throw DomainError("sqrt of negative value");
  return apply_unary(x, mpfr_sqrt, "sqrt");
}
inline Real exp(const Real& x) { return apply_unary(x, mpfr_exp, "exp"); }
inline Real log(const Real& x) {
  if (x.sign() <= 0) throw DomainError("log of non-positive value");
  return apply_unary(x, mpfr_log, "log");
}
inline Real log10(const Real& x) {
  if (x.sign() <= 0) throw DomainError("log10 of non-positive value");
  return apply_unary(x, mpfr_log10, "log10");
}
inline Real sin(const Real& x) { return apply_unary(x, mpfr_sin, "sin"); }
inline Real cos(const Real& x) { return apply_unary(x, mpfr_cos, "cos"); }
inline Real sinh(const Real& x) { return apply_unary(x, mpfr_sinh, "sinh"); }
inline Real cosh(const Real& x) { return apply_unary(x, mpfr_cosh, "cosh"); }

inline Real hypot(const Real& a, const Real& b) {
  Real r(coarser(a.precision(), b.precision()));
  mpfr_hypot(r.get_mutable(), a.get(), b.get(), MPFR_RNDN);
  r.check("hypot");
  return r;
}
inline Real pow(const Real& x, const Real& y) {
  Real r(coarser(x.precision(), y.precision()));
  mpfr_pow(r.get_mutable(), x.get(), y.get(), MPFR_RNDN);
  r.check("pow");
  return r;
}
inline Real pow(const Real& x, long n) {
  Real r(x.precision());
  mpfr_pow_si(r.get_mutable(), x.get(), n, MPFR_RNDN);
  r.check("pow");
  return r;
}
/// x^(1/k) for x >= 0.
inline Real root(const Real& x, unsigned long k) {
  if (x.sign() < 0) throw DomainError("root of negative value");
  Real r(x.precision());
  mpfr_rootn_ui(r.get_mutable(), x.get(), k, MPFR_RNDN);
  r.check("root");
  return r;
}
/// x^r for x >= 0 and rational r >= 0 (0^0 = 1).
inline Real pow(const Real& x, Rational r) {
  if (r.is_integer()) return pow(x, static_cast<long>(r.num()));
  if (x.sign() < 0) throw DomainError("fractional power of negative value");
  return pow(root(x, static_cast<unsigned long>(r.den())), static_cast<long>(r.num()));
}
inline const Real& max(const Real& a, const Real& b) { return (a < b) ? b : a; }
inline const Real& min(const Real& a, const Real& b) { return (b < a) ? b : a; }

/// Relative difference |a-b| / max(|a|,|b|); 0 when both are zero.
inline Real relative_difference(const Real& a, const Real& b) {
  Real scale = max(abs(a), abs(b));
  if (scale.is_zero()) return Real(coarser(a.precision(), b.precision()));
  return abs(a - b) / scale;
}

}  // namespace muntz
