#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <utility>
#include <vector>

#include "muntz/numeric/real.hpp"
#include "muntz/numeric/special.hpp"
#include "muntz/rational.hpp"

namespace muntz {

/// Parameters of the Jacobi weight; on [0,1] the weight is s^beta (1-s)^alpha.
struct JacobiParams {
  Rational alpha;
  Rational beta;

  JacobiParams(Rational a, Rational b) : alpha(a), beta(b) {
    if (alpha <= Rational(-1) || beta <= Rational(-1)) throw DomainError("Jacobi parameters must exceed -1");
  }
  friend bool operator==(const JacobiParams&, const JacobiParams&) = default;
};

enum class Domain { Unit, Symmetric };  // [0,1] and [-1,1]

namespace detail {

/// Coefficients of the Jacobi three-term recurrence in x on [-1,1]:
///   P_{n+1} = (a_n x + b_n) P_n - c_n P_{n-1},  n >= 1.
struct JacobiStep {
  Real a, b, c;
};

inline JacobiStep jacobi_step(const JacobiParams& jp, long n, Precision p) {
  const Rational al = jp.alpha, be = jp.beta;
  const Rational s = al + be;
  const Rational nn(n);
  const Rational two_n_s = Rational(2) * nn + s;
  const Rational d = Rational(2) * (nn + 1) * (nn + s + 1) * two_n_s;
  const Rational a = (two_n_s + 1) * (two_n_s + 2) * two_n_s / d;
  const Rational b = (two_n_s + 1) * (al * al - be * be) / d;
  const Rational c = Rational(2) * (nn + al) * (nn + be) * (two_n_s + 2) / d;
  return {Real(a, p), Real(b, p), Real(c, p)};
}

/// P_1(x) = (alpha+1) + (alpha+beta+2)(x-1)/2 = k1 x + k0.
inline std::pair<Real, Real> jacobi_first(const JacobiParams& jp, Precision p) {
  const Rational k1 = (jp.alpha + jp.beta + 2) / Rational(2);
  const Rational k0 = jp.alpha + 1 - k1;
  return {Real(k1, p), Real(k0, p)};
}

/// Recurrence coefficients for steps 1..n-1 (index 0 unused), cached per (params, precision)
/// and grown on demand.
inline std::shared_ptr<const std::vector<JacobiStep>> jacobi_steps(const JacobiParams& jp, long n, Precision p) {
  using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t, long>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const std::vector<JacobiStep>>> cache;
  const Key key{jp.alpha.num(), jp.alpha.den(), jp.beta.num(), jp.beta.den(), p.bits()};
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[key];
  if (slot && static_cast<long>(slot->size()) >= n) return slot;
  auto table = std::make_shared<std::vector<JacobiStep>>();
  const long size = std::max(n, slot ? 2 * static_cast<long>(slot->size()) : 64L);
  table->reserve(static_cast<std::size_t>(size));
  table->push_back({Real(p), Real(p), Real(p)});
  for (long k = 1; k < size; ++k) table->push_back(k < static_cast<long>(slot ? slot->size() : 0) ? (*slot)[static_cast<std::size_t>(k)] : jacobi_step(jp, k, p));
  slot = table;
  return slot;
}

/// P_n(x) and P_{n-1}(x) on [-1,1] via the recurrence, at the precision of x.
inline std::pair<Real, Real> jacobi_pair(const JacobiParams& jp, long n, const Real& x) {
  const Precision p = x.precision();
  if (n == 0) return {Real(1, p), Real(p)};
  auto [k1, k0] = jacobi_first(jp, p);
  Real prev(1, p);
  Real cur = k1 * x + k0;
  const auto steps = jacobi_steps(jp, n, p);
  for (long k = 1; k < n; ++k) {
    const JacobiStep& st = (*steps)[static_cast<std::size_t>(k)];
    Real next = (st.a * x + st.b) * cur;
    sub_product(next, st.c, prev);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return {std::move(cur), std::move(prev)};
}

}  // namespace detail

/// Shifted Jacobi polynomial J_i^{(alpha,beta)}(s) = P_i^{(alpha,beta)}(2s-1), s in [0,1],
/// at the precision of `s`.
inline Real jacobi_eval(const JacobiParams& jp, long i, const Real& s) {
  if (s.sign() < 0 || s > 1L) throw DomainError("jacobi_eval requires s in [0,1]");
  return detail::jacobi_pair(jp, i, s * 2L - 1L).first;
}


/// J_0(s), ..., J_N(s) in one sweep of the recurrence.
inline std::vector<Real> jacobi_eval_all(const JacobiParams& jp, long n, const Real& s) {
  const Precision p = s.precision();
  std::vector<Real> out;
  out.reserve(static_cast<std::size_t>(n + 1));
  out.emplace_back(1, p);
  if (n == 0) return out;
  const Real x = s * 2L - 1L;
  auto [k1, k0] = detail::jacobi_first(jp, p);
  out.push_back(k1 * x + k0);
  const auto steps = detail::jacobi_steps(jp, n, p);
  for (long k = 1; k < n; ++k) {
    const detail::JacobiStep& st = (*steps)[static_cast<std::size_t>(k)];
    Real next = (st.a * x + st.b) * out[static_cast<std::size_t>(k)];
    sub_product(next, st.c, out[static_cast<std::size_t>(k - 1)]);
    out.push_back(std::move(next));
  }
  return out;
}

/// Squared L2 norm of J_i against s^beta (1-s)^alpha on [0,1]:
/// Gamma(i+a+1) Gamma(i+b+1) / ((2i+a+b+1) i! Gamma(i+a+b+1)).
inline Real jacobi_norm_sq(const JacobiParams& jp, long i, Precision p) {
  const Precision w = p + 16;
  const Rational al = jp.alpha, be = jp.beta;
  if (i == 0) {
    // Gamma(a+1) Gamma(b+1) / Gamma(a+b+2), regular even when a+b = -1
    return (gamma_ratio(Real(al + 1, w), Real(al + be + 2, w)) * gamma(Real(be + 1, w))).rounded(p);
  }
  const Rational ii(i);
  Real r = gamma_ratio(Real(ii + be + 1, w), Real(ii + al + be + 1, w)) *
           gamma_ratio(Real(ii + al + 1, w), Real(ii + 1, w));
  r /= Real(Rational(2) * ii + al + be + 1, w);
  return r.rounded(p);
}

/// Monomial coefficients Upsilon_j of J_i(s) = sum_j Upsilon_j s^j, j = 0..i.
/// Built by the exact term ratio; for integer parameters every entry is an integer and
/// is reproduced bit-exactly while it fits the precision.
inline std::vector<Real> monomial_row(const JacobiParams& jp, long i, Precision p) {
  std::vector<Real> row;
  row.reserve(static_cast<std::size_t>(i + 1));
  // Upsilon_0 = J_i(0) = (-1)^i prod_{m=1}^{i} (m + beta)/m
  Real u0(1, p);
  for (long m = 1; m <= i; ++m) {
    u0 *= Real(Rational(m) + jp.beta, p);
    u0 /= m;
  }
  if (i % 2 == 1) u0 = -u0;
  row.push_back(std::move(u0));
  const Rational ab = jp.alpha + jp.beta;
  for (long j = 0; j < i; ++j) {
    const Rational num = -Rational(i - j) * (Rational(i + j + 1) + ab);
    const Rational den = (jp.beta + j + 1) * Rational(j + 1);
    const Rational ratio = num / den;
    Real next = row.back();
    if (ratio.is_integer()) {
      next *= static_cast<long>(ratio.num());
    } else {
      next *= static_cast<long>(ratio.num());
      next /= static_cast<long>(ratio.den());
    }
    row.push_back(std::move(next));
  }
  return row;
}

/// Lower-triangular table of monomial coefficients, row i = Upsilon^{(i)}_0..i.
class MonomialCoeffTable {
 public:
  MonomialCoeffTable(const JacobiParams& jp, long order, Precision p) : order_(order) {
    if (order < 0) throw DomainError("monomial_coeffs requires N >= 0");
    rows_.reserve(static_cast<std::size_t>(order + 1));
    for (long i = 0; i <= order; ++i) rows_.push_back(monomial_row(jp, i, p));
  }
  long order() const noexcept { return order_; }
  const std::vector<Real>& row(long i) const { return rows_.at(static_cast<std::size_t>(i)); }
  /// Entry (i, j); zero above the diagonal.
  Real entry(long i, long j) const {
    if (j > i) return Real(rows_.front().front().precision());
    return rows_.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j));
  }

 private:
  long order_;
  std::vector<std::vector<Real>> rows_;
};

inline MonomialCoeffTable monomial_coeffs(const JacobiParams& jp, long n, Precision p) { return {jp, n, p}; }

/// Gauss quadrature rule for the Jacobi weight on [0,1] or [-1,1].
struct QuadratureRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
  Domain domain;
  JacobiParams params;

  std::size_t size() const noexcept { return nodes.size(); }
};

namespace detail {

inline long double jacobi_ld(const JacobiParams& jp, long n, long double x, long double& deriv) {
  const long double al = static_cast<long double>(jp.alpha.to_double());
  const long double be = static_cast<long double>(jp.beta.to_double());
  long double prev = 1.0L;
  long double cur = (al + 1.0L) + (al + be + 2.0L) * (x - 1.0L) / 2.0L;
  if (n == 0) {
    deriv = 0.0L;
    return 1.0L;
  }
  for (long k = 1; k < n; ++k) {
    const long double kk = static_cast<long double>(k);
    const long double t = 2.0L * kk + al + be;
    const long double d = 2.0L * (kk + 1.0L) * (kk + al + be + 1.0L) * t;
    const long double next = ((t + 1.0L) * ((t + 2.0L) * t * x + al * al - be * be) * cur -
                              2.0L * (kk + al) * (kk + be) * (t + 2.0L) * prev) /
                             d;
    prev = cur;
    cur = next;
  }
  // (2n+a+b)(1-x^2) P_n' = n[(a-b) - (2n+a+b) x] P_n + 2(n+a)(n+b) P_{n-1}
  const long double nn = static_cast<long double>(n);
  const long double t = 2.0L * nn + al + be;
  deriv = (nn * ((al - be) - t * x) * cur + 2.0L * (nn + al) * (nn + be) * prev) / (t * (1.0L - x * x));
  return cur;
}

/// Roots of P_n on [-1,1] in long double, ascending, by Newton with deflation.
inline std::vector<long double> jacobi_roots_ld(const JacobiParams& jp, long n) {
  const long double al = static_cast<long double>(jp.alpha.to_double());
  const long double be = static_cast<long double>(jp.beta.to_double());
  const long double pi = 3.141592653589793238462643383279502884L;
  std::vector<long double> roots;
  roots.reserve(static_cast<std::size_t>(n));
  for (long k = 1; k <= n; ++k) {
    long double x = std::cos(pi * (static_cast<long double>(k) - 0.25L + al / 2.0L) /
                             (static_cast<long double>(n) + (al + be + 1.0L) / 2.0L));
    if (k > 1) x = std::min(x, roots.back() - 1e-18L);  // stay below the previous (larger) root
    for (int it = 0; it < 100; ++it) {
      long double d = 0.0L;
      const long double v = jacobi_ld(jp, n, x, d);
      long double defl = 0.0L;
      for (long double r : roots) defl += 1.0L / (x - r);
      const long double step = v / (d - v * defl);
      x -= step;
      if (std::abs(step) <= 1e-19L * std::max(1.0L, std::abs(x))) break;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// Value of P_n and the quantity (1-x^2) P_n'(x) at y, where x = 2y-1 on [0,1] (so 1-x^2 = 4y(1-y))
/// or x = y on [-1,1].
inline std::pair<Real, Real> jacobi_newton_terms(const JacobiParams& jp, long n, const Real& y, Domain dom) {
  const Precision p = y.precision();
  const Real x = dom == Domain::Unit ? y * 2L - 1L : y;
  auto [pn, pm] = detail::jacobi_pair(jp, n, x);
  const Rational t = Rational(2 * n) + jp.alpha + jp.beta;
  // (1-x^2) P_n' = (n[(a-b) - t x] P_n + 2(n+a)(n+b) P_{n-1}) / t
  Real lhs = (Real(jp.alpha - jp.beta, p) - Real(t, p) * x) * pn * n;
  add_product(lhs, Real(Rational(2) * (Rational(n) + jp.alpha) * (Rational(n) + jp.beta), p), pm);
  lhs /= Real(t, p);
  return {std::move(pn), std::move(lhs)};
}

inline QuadratureRule build_gauss_rule(const JacobiParams& jp, long n, Domain dom, Precision p) {
  if (n < 1) throw DomainError("gauss_rule requires at least one point");
  const Precision w = p + 32;
  const std::vector<long double> guess = jacobi_roots_ld(jp, n);
  QuadratureRule rule{{}, {}, dom, jp};
  rule.nodes.reserve(static_cast<std::size_t>(n));
  rule.weights.reserve(static_cast<std::size_t>(n));

  // C_n = 2^{a+b+1} Gamma(n+a+1) Gamma(n+b+1) / (Gamma(n+a+b+1) n!) on [-1,1];
  // the unit-interval weight carries an extra factor 2^{-(a+b+1)}.
  const Rational nn(n);
  Real cn = gamma_ratio(Real(nn + jp.alpha + 1, w), Real(nn + 1, w)) *
            gamma_ratio(Real(nn + jp.beta + 1, w), Real(nn + jp.alpha + jp.beta + 1, w));
  if (dom == Domain::Symmetric) cn *= pow(Real(2, w), Real(jp.alpha + jp.beta + 1, w));

  // symmetric weights: compute the upper half and mirror
  const bool mirror = dom == Domain::Symmetric && jp.alpha == jp.beta;
  int total_iterations = 0;
  for (long k = 0; k < n; ++k) {
    if (mirror && k < n / 2) {
      rule.nodes.emplace_back(p);
      rule.weights.emplace_back(p);
      continue;
    }
    const long double g = dom == Domain::Unit ? (1.0L + guess[static_cast<std::size_t>(k)]) / 2.0L
                                              : guess[static_cast<std::size_t>(k)];
    // Newton with the working precision doubling each step (quadratic convergence)
    long cur_bits = 64;
    Real y(static_cast<double>(g), Precision(std::min(w.bits(), 128L)));
    // long double carries more than a double: add the residual
    y += Real(static_cast<double>(g - static_cast<long double>(static_cast<double>(g))), y.precision());
    int stable = 0;
    for (int it = 0;; ++it) {
      if (++total_iterations > 200 * n || it >= 200) {
        throw PrecisionError("Gauss rule Newton iteration did not converge");
      }
      cur_bits = std::min(w.bits(), 2 * cur_bits);
      const Precision cp(cur_bits);
      Real yc = y.rounded(cp);
      auto [v, dv] = jacobi_newton_terms(jp, n, yc, dom);
      // dP/dy = (1-x^2) P_n' / (1-x^2) * dx/dy
      Real one_minus_x2 = dom == Domain::Unit ? yc * (1L - yc) * 4L : (1L - yc * yc);
      Real deriv = dv / one_minus_x2;
      if (dom == Domain::Unit) deriv *= 2L;
      if (deriv.is_zero()) throw PrecisionError("Gauss rule Newton hit a zero derivative");
      const Real step = v / deriv;
      yc -= step;
      y = std::move(yc);
      if (cur_bits == w.bits()) {
        // relative accuracy on [0,1] (nodes cluster at 0), absolute on [-1,1]
        const long scale = dom == Domain::Unit ? y.magnitude_log2() : 0;
        const bool small = step.is_zero() || step.magnitude_log2() < scale - p.bits() - 8;
        if (small && ++stable >= 1) break;
      }
    }
    auto [v, dv] = jacobi_newton_terms(jp, n, y, dom);
    (void)v;
    // w_k = C_n / ((1-x^2) P_n'(x)^2) = C_n (1-x^2) / ((1-x^2) P_n')^2
    Real one_minus_x2 = dom == Domain::Unit ? y * (1L - y) * 4L : (1L - y * y);
    Real wk = cn * one_minus_x2 / (dv * dv);
    rule.nodes.push_back(y.rounded(p));
    rule.weights.push_back(wk.rounded(p));
  }
  if (mirror) {
    for (long k = 0; k < n / 2; ++k) {
      const std::size_t lo = static_cast<std::size_t>(k), hi = static_cast<std::size_t>(n - 1 - k);
      rule.nodes[lo] = -rule.nodes[hi];
      rule.weights[lo] = rule.weights[hi];
    }
    if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = Real(p);
  }
  return rule;
}

}  // namespace detail

/// Gauss rule with `n` points for the Jacobi weight on the given domain, cached per
/// (params, n, domain, precision). Nodes ascending, weights positive.
inline const QuadratureRule& gauss_rule(const JacobiParams& jp, long n, Domain dom, Precision p) {
  using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t, std::int64_t, long, int, long>;
  static std::mutex mutex;
  static std::map<Key, std::unique_ptr<QuadratureRule>> cache;
  const Key key{jp.alpha.num(), jp.alpha.den(), jp.beta.num(), jp.beta.den(), n, static_cast<int>(dom), p.bits()};
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  auto rule = std::make_unique<QuadratureRule>(detail::build_gauss_rule(jp, n, dom, p));
  std::lock_guard<std::mutex> lock(mutex);
  auto [it, inserted] = cache.emplace(key, std::move(rule));  // first writer wins
  return *it->second;
}

}  // namespace muntz
