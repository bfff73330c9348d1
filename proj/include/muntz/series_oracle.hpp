#pragma once

#include <algorithm>
#include <vector>

#include "muntz/fracops.hpp"

namespace muntz {

/// A linear system D^{theta_j} v_j = sum_r p_{jr} v_r + f_j near t = 0 with every
/// coefficient supplied as a Muntz series in t on one grid.
struct SeriesProblem {
  MuntzGrid grid;
  std::vector<RationalOrder> orders;
  std::vector<std::vector<MuntzSeries>> couplings;  // couplings[j][r] = p_{jr}
  std::vector<MuntzSeries> forcings;                // f_j
  std::vector<std::vector<Complex>> initial;        // initial[j][k] = v_j^{(k)}(0), k < ceil(theta_j)

  std::size_t size() const noexcept { return orders.size(); }
};

struct SeriesSolution {
  std::vector<MuntzSeries> v;    // full coefficients, Taylor part included
  std::vector<MuntzSeries> psi;  // Taylor part alone
  long truncation;
  Real radius_hint;
};

namespace detail {

inline void check_series_problem(const SeriesProblem& sp, long m) {
  const std::size_t n = sp.size();
  if (n == 0) throw ValidationError("empty system");
  if (sp.couplings.size() != n || sp.forcings.size() != n || sp.initial.size() != n) {
    throw ValidationError("coupling, forcing and initial-data counts must match the number of equations");
  }
  long max_shift = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const long shift = sp.orders[j].shift(sp.grid);
    max_shift = std::max(max_shift, shift);
    if (sp.couplings[j].size() != n) throw ValidationError("coupling row " + std::to_string(j) + " has the wrong length");
    if (static_cast<long>(sp.initial[j].size()) != sp.orders[j].ceil()) {
      throw ValidationError("equation " + std::to_string(j) + " needs " + std::to_string(sp.orders[j].ceil()) + " initial values");
    }
    for (const MuntzSeries& s : sp.couplings[j]) {
      if (!(s.grid() == sp.grid)) throw GridMismatchError("coupling series on a different grid");
      if (s.truncation() < m - shift) throw TruncationError("coupling series too short for the requested truncation");
    }
    if (!(sp.forcings[j].grid() == sp.grid)) throw GridMismatchError("forcing series on a different grid");
    if (sp.forcings[j].truncation() < m - shift) throw TruncationError("forcing series too short for the requested truncation");
  }
  if (m < max_shift) throw TruncationError("truncation " + std::to_string(m) + " is below the largest order shift " + std::to_string(max_shift));
}

/// Largest t <= cap at which the last five non-zero terms still decrease.
inline Real radius_from_tail(const MuntzSeries& s, const Real& cap) {
  std::vector<long> idx;
  for (long mu = s.truncation(); mu >= 0 && idx.size() < 5; --mu) {
    if (!s[mu].is_zero()) idx.push_back(mu);
  }
  Real r = cap;
  for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
    // |a_lo| t^{lo/q} > |a_hi| t^{hi/q}  <=>  t < (|a_lo| / |a_hi|)^{q/(hi-lo)}
    const long hi = idx[k], lo = idx[k + 1];
    const Real ratio = abs(s[lo]) / abs(s[hi]);
    r = min(r, pow(ratio, Rational(s.grid().q(), hi - lo)));
  }
  return r;
}

}  // namespace detail

/// Coefficients of the local solution from the Volterra form
///   v_j = psi_j + I^{theta_j}( sum_r p_{jr} v_r + f_j ),
/// one coefficient index at a time: index mu of v_j needs only indices
/// < mu of the unknowns because the integral shifts by theta_j q >= 1.
inline SeriesSolution series_solve(const SeriesProblem& sp, long m, const Real& horizon) {
  detail::check_series_problem(sp, m);
  const std::size_t n = sp.size();
  const Precision p = sp.forcings.front().precision();
  const long q = sp.grid.q();
  const FracCoeffs fc(sp.orders, sp.grid, 0, p);

  std::vector<MuntzSeries> v, psi;
  for (std::size_t j = 0; j < n; ++j) {
    MuntzSeries ps(sp.grid, m, p);
    Real kfact(1, p);
    for (long k = 0; k < sp.orders[j].ceil(); ++k) {
      if (k > 0) kfact *= k;
      if (k * q <= m) ps[k * q] = sp.initial[j][static_cast<std::size_t>(k)] / kfact;
    }
    psi.push_back(ps);
    v.push_back(std::move(ps));
  }

  for (long mu = 1; mu <= m; ++mu) {
    for (std::size_t j = 0; j < n; ++j) {
      const long shift = sp.orders[j].shift(sp.grid);
      const long base = mu - shift;
      if (base < 0) continue;
      Complex acc = sp.forcings[j][base];
      for (std::size_t r = 0; r < n; ++r) {
        const MuntzSeries& pc = sp.couplings[j][r];
        for (long m1 = 0; m1 <= base; ++m1) {
          const Complex& a = pc[m1];
          if (a.is_zero()) continue;
          const Complex& b = v[r][base - m1];
          if (!b.is_zero()) add_product(acc, a, b);
        }
      }
      // Gamma(mu/q - theta + 1) / Gamma(mu/q + 1): the fractional-integral factor of t^{base/q}
      v[j][mu] = acc * fc.xi_bar(j, mu);
    }
  }

  Real radius = horizon;
  for (const MuntzSeries& s : v) radius = min(radius, detail::radius_from_tail(s, horizon));
  return {std::move(v), std::move(psi), m, std::move(radius)};
}

inline Complex series_eval(const SeriesSolution& sol, std::size_t j, const Real& t) { return sol.v.at(j).eval(t); }

/// Forcing terms that make the prescribed series exact solutions:
///   f_j = D^{theta_j} exact_j - sum_r p_{jr} exact_r.
/// The truncation is the smallest of the contributing series.
inline std::vector<MuntzSeries> manufacture_forcing(const std::vector<RationalOrder>& orders,
                                                    const std::vector<MuntzSeries>& exact,
                                                    const std::vector<std::vector<MuntzSeries>>& couplings) {
  const std::size_t n = orders.size();
  if (exact.size() != n || couplings.size() != n) throw ValidationError("manufactured system has mismatched sizes");
  std::vector<MuntzSeries> out;
  for (std::size_t j = 0; j < n; ++j) {
    if (couplings[j].size() != n) throw ValidationError("coupling row " + std::to_string(j) + " has the wrong length");
    MuntzSeries f = caputo_derivative_series(orders[j], exact[j]);
    for (std::size_t r = 0; r < n; ++r) f = f - couplings[j][r] * exact[r];
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace muntz
