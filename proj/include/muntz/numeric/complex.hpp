#pragma once

#include <ostream>
#include <string>

#include "muntz/numeric/real.hpp"

namespace muntz {

/// Complex number over two Reals. Precision is the coarser of the two parts.
class Complex {
 public:
  explicit Complex(Precision p) : re_(p), im_(p) {}
  Complex(Real re) : re_(std::move(re)), im_(re_.precision()) {}  // NOLINT(google-explicit-constructor)
  Complex(Real re, Real im) : re_(std::move(re)), im_(std::move(im)) {}
  template <std::integral I>
  Complex(I re, Precision p) : re_(re, p), im_(p) {}

  static Complex i(Precision p) { return {Real(p), Real(1, p)}; }

  const Real& re() const noexcept { return re_; }
  const Real& im() const noexcept { return im_; }
  Real& re() noexcept { return re_; }
  Real& im() noexcept { return im_; }

  Precision precision() const { return coarser(re_.precision(), im_.precision()); }
  bool is_real() const noexcept { return im_.is_zero(); }
  bool is_zero() const noexcept { return re_.is_zero() && im_.is_zero(); }

  Complex rounded(Precision p) const { return {re_.rounded(p), im_.rounded(p)}; }
  Complex conj() const { return {re_, -im_}; }
  Complex operator-() const { return {-re_, -im_}; }

  friend Complex operator+(const Complex& a, const Complex& b) { return {a.re_ + b.re_, a.im_ + b.im_}; }
  friend Complex operator-(const Complex& a, const Complex& b) { return {a.re_ - b.re_, a.im_ - b.im_}; }
  friend Complex operator*(const Complex& a, const Complex& b) {
    if (a.is_real() && b.is_real()) {
      Real re = a.re_ * b.re_;
      Real im(re.precision());
      return {std::move(re), std::move(im)};
    }
    return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
  }
  friend Complex operator/(const Complex& a, const Complex& b) {
    if (b.is_zero()) throw DomainError("complex division by zero");
    if (b.is_real()) return {a.re_ / b.re_, a.im_ / b.re_};
    Real den = b.re_ * b.re_ + b.im_ * b.im_;
    return {(a.re_ * b.re_ + a.im_ * b.im_) / den, (a.im_ * b.re_ - a.re_ * b.im_) / den};
  }
  friend Complex operator*(const Complex& a, const Real& s) { return {a.re_ * s, a.im_ * s}; }
  friend Complex operator*(const Real& s, const Complex& a) { return a * s; }
  friend Complex operator/(const Complex& a, const Real& s) {
    if (s.is_zero()) throw DomainError("complex division by zero");
    return {a.re_ / s, a.im_ / s};
  }
  friend Complex operator*(const Complex& a, long s) { return {a.re_ * s, a.im_ * s}; }
  friend Complex operator/(const Complex& a, long s) {
    if (s == 0) throw DomainError("complex division by zero");
    return {a.re_ / s, a.im_ / s};
  }

  Complex& operator+=(const Complex& b) {
    re_ += b.re_;
    im_ += b.im_;
    return *this;
  }
  Complex& operator-=(const Complex& b) {
    re_ -= b.re_;
    im_ -= b.im_;
    return *this;
  }
  Complex& operator*=(const Real& s) {
    re_ *= s;
    im_ *= s;
    return *this;
  }
  Complex& operator*=(const Complex& b) { return *this = *this * b; }

  /// acc += a * b without temporaries, rounded at the precision of `acc`.
  friend void add_product(Complex& acc, const Complex& a, const Complex& b) {
    add_product(acc.re_, a.re_, b.re_);
    if (!a.im_.is_zero()) {
      if (!b.im_.is_zero()) sub_product(acc.re_, a.im_, b.im_);
      add_product(acc.im_, a.im_, b.re_);
    }
    if (!b.im_.is_zero()) add_product(acc.im_, a.re_, b.im_);
  }
  /// acc += a * s for real s.
  friend void add_product(Complex& acc, const Complex& a, const Real& s) {
    add_product(acc.re_, a.re_, s);
    if (!a.im_.is_zero()) add_product(acc.im_, a.im_, s);
  }

  friend bool operator==(const Complex& a, const Complex& b) noexcept {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  /// A complex with zero imaginary part equals the corresponding real.
  friend bool operator==(const Complex& a, const Real& b) noexcept { return a.im_.is_zero() && a.re_ == b; }

  std::string str(int digits = 20) const {
    if (im_.is_zero()) return re_.str(digits);
    std::string im = im_.str(digits);
    if (im.front() != '-') im = "+" + im;
    return re_.str(digits) + im + "i";
  }
  friend std::ostream& operator<<(std::ostream& os, const Complex& c) { return os << c.str(20); }

 private:
  Real re_;
  Real im_;
};

inline Real abs(const Complex& z) { return z.is_real() ? abs(z.re()) : hypot(z.re(), z.im()); }
inline Real norm(const Complex& z) { return z.re() * z.re() + z.im() * z.im(); }

inline Complex exp(const Complex& z) {
  if (z.is_real()) return Complex(exp(z.re()));
  Real m = exp(z.re());
  return {m * cos(z.im()), m * sin(z.im())};
}
inline Complex sin(const Complex& z) {
  if (z.is_real()) return Complex(sin(z.re()));
  return {sin(z.re()) * cosh(z.im()), cos(z.re()) * sinh(z.im())};
}
inline Complex cos(const Complex& z) {
  if (z.is_real()) return Complex(cos(z.re()));
  return {cos(z.re()) * cosh(z.im()), -(sin(z.re()) * sinh(z.im()))};
}
inline Complex pow(const Complex& z, long n) {
  if (n < 0) return Complex(Real(1, z.precision())) / pow(z, -n);
  Complex result(1, z.precision());
  Complex base = z;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

/// Relative difference of two complex numbers in modulus.
inline Real relative_difference(const Complex& a, const Complex& b) {
  Real scale = max(abs(a), abs(b));
  if (scale.is_zero()) return Real(coarser(a.precision(), b.precision()));
  return abs(a - b) / scale;
}

}  // namespace muntz
