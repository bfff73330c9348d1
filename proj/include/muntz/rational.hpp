#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "muntz/errors.hpp"

namespace muntz {

/// Exact rational number with 64-bit numerator and positive denominator,
/// always kept in lowest terms.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t num) : num_(num) {}  // NOLINT(google-explicit-constructor)
  constexpr Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw DomainError("rational with zero denominator");
    if (num_ == INT64_MIN || den_ == INT64_MIN) throw OverflowError("rational arithmetic overflow");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  constexpr std::int64_t num() const noexcept { return num_; }
  constexpr std::int64_t den() const noexcept { return den_; }
  constexpr bool is_integer() const noexcept { return den_ == 1; }

  /// Smallest integer >= this value.
  constexpr std::int64_t ceil() const noexcept {
    if (num_ >= 0) return (num_ + den_ - 1) / den_;
    return -((-num_) / den_);
  }
  constexpr std::int64_t floor() const noexcept {
    if (num_ >= 0) return num_ / den_;
    return -((-num_ + den_ - 1) / den_);
  }

  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend constexpr Rational operator+(Rational a, Rational b) {
    return {add(mul(a.num_, b.den_), mul(b.num_, a.den_)), mul(a.den_, b.den_)};
  }
  friend constexpr Rational operator-(Rational a, Rational b) {
    return {sub(mul(a.num_, b.den_), mul(b.num_, a.den_)), mul(a.den_, b.den_)};
  }
  friend constexpr Rational operator*(Rational a, Rational b) {
    return {mul(a.num_, b.num_), mul(a.den_, b.den_)};
  }
  friend constexpr Rational operator/(Rational a, Rational b) {
    if (b.num_ == 0) throw DomainError("rational division by zero");
    return {mul(a.num_, b.den_), mul(a.den_, b.num_)};
  }
  constexpr Rational operator-() const { return {sub(0, num_), den_}; }

  friend constexpr bool operator==(Rational a, Rational b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend constexpr std::strong_ordering operator<=>(Rational a, Rational b) noexcept {
    return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
  }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }
  friend std::ostream& operator<<(std::ostream& os, Rational r) { return os << r.str(); }

  /// Parses "p", "p/q" (optional leading sign, surrounding blanks ignored).
  static Rational parse(std::string_view text) {
    auto trim = [](std::string_view s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
      return s;
    };
    auto parse_int = [](std::string_view s) -> std::int64_t {
      if (s.empty()) throw ValidationError("empty integer in rational");
      bool neg = false;
      if (s.front() == '-' || s.front() == '+') {
        neg = s.front() == '-';
        s.remove_prefix(1);
      }
      if (s.empty() || s.size() > 18) throw ValidationError("malformed integer in rational");
      std::int64_t v = 0;
      for (char c : s) {
        if (c < '0' || c > '9') throw ValidationError("malformed integer in rational");
        v = v * 10 + (c - '0');
      }
      return neg ? -v : v;
    };
    text = trim(text);
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return {parse_int(text)};
    return {parse_int(trim(text.substr(0, slash))), parse_int(trim(text.substr(slash + 1)))};
  }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;

  static constexpr std::int64_t mul(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("rational arithmetic overflow");
    return r;
  }
  static constexpr std::int64_t add(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("rational arithmetic overflow");
    return r;
  }
  static constexpr std::int64_t sub(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("rational arithmetic overflow");
    return r;
  }
};

inline std::int64_t lcm(std::int64_t a, std::int64_t b) { return std::lcm(a, b); }

}  // namespace muntz
