#pragma once

#include <functional>
#include <vector>

#include "muntz/muntz_series.hpp"
#include "muntz/orthopoly.hpp"

namespace muntz {

/// Jacobi parameters (0, q-1) underlying the Muntz-Jacobi functions of a grid.
inline JacobiParams muntz_params(const MuntzGrid& g) { return {Rational(0), Rational(g.q() - 1)}; }

/// Muntz-Jacobi function J_i^{(0,q-1)}(u^{1/q}) for u in [0,1].
inline Real muntz_jacobi_eval(const MuntzGrid& g, long i, const Real& u) {
  if (u.sign() < 0 || u > 1L) throw DomainError("muntz_jacobi_eval requires u in [0,1]");
  return jacobi_eval(muntz_params(g), i, root(u, static_cast<unsigned long>(g.q())));
}

/// Squared norm of the i-th Muntz-Jacobi function on [0,1]: q / (2i + q).
inline Real muntz_norm_sq(const MuntzGrid& g, long i, Precision p) {
  return Real(g.q(), p) / (2 * i + g.q());
}

/// Lower-triangular conversion matrix: row i holds the coefficients of the i-th
/// Muntz-Jacobi function in the monomials u^{l/q}.
inline MonomialCoeffTable conversion_table(const MuntzGrid& g, long n, Precision p) {
  return monomial_coeffs(muntz_params(g), n, p);
}

/// Coefficients of a function against the Muntz-Jacobi functions of degree 0..N.
struct BasisVector {
  MuntzGrid grid;
  std::vector<Complex> coeffs;

  long degree() const noexcept { return static_cast<long>(coeffs.size()) - 1; }
};

/// Row vector times conversion matrix: the same function in the monomials u^{l/q}.
/// Rows of the matrix are generated on the fly so memory stays linear in N.
inline MuntzSeries to_monomial(const BasisVector& v) {
  const long n = v.degree();
  const Precision p = v.coeffs.front().precision();
  MuntzSeries out(v.grid, n, p);
  const JacobiParams jp = muntz_params(v.grid);
  for (long i = 0; i <= n; ++i) {
    const Complex& ci = v.coeffs[static_cast<std::size_t>(i)];
    if (ci.is_zero()) continue;
    const std::vector<Real> row = monomial_row(jp, i, p);
    for (long l = 0; l <= i; ++l) add_product(out[l], ci, row[static_cast<std::size_t>(l)]);
  }
  return out;
}

/// Solves c * J = s for c, with J the lower-triangular conversion matrix of order n.
/// Proceeds from the last row upwards so each row of J is needed exactly once.
inline BasisVector from_monomial(const MuntzSeries& s, long n) {
  if (s.truncation() > n) throw TruncationError("series truncation exceeds the target degree");
  const Precision p = s.precision();
  std::vector<Complex> r(static_cast<std::size_t>(n + 1), Complex(p));
  for (long l = 0; l <= s.truncation(); ++l) r[static_cast<std::size_t>(l)] = s[l];
  std::vector<Complex> c(static_cast<std::size_t>(n + 1), Complex(p));
  const JacobiParams jp = muntz_params(s.grid());
  for (long i = n; i >= 0; --i) {
    const std::vector<Real> row = monomial_row(jp, i, p);
    const Real& diag = row[static_cast<std::size_t>(i)];
    if (diag.is_zero()) throw PrecisionError("singular diagonal in the conversion matrix");
    Complex ci = r[static_cast<std::size_t>(i)] / diag;
    if (!ci.is_zero()) {
      const Complex neg = -ci;
      for (long l = 0; l < i; ++l) add_product(r[static_cast<std::size_t>(l)], neg, row[static_cast<std::size_t>(l)]);
    }
    c[static_cast<std::size_t>(i)] = std::move(ci);
  }
  return {s.grid(), std::move(c)};
}

/// L2 projection onto the span of the first N+1 Muntz-Jacobi functions. With u = s^q
/// the inner products become Gauss-Jacobi (0, q-1) sums over 2(N+1) nodes:
///   c_i = (2i+q) sum_k w_k f(s_k^q) J_i(s_k).
class Projector {
 public:
  using Function = std::function<Complex(const Real& u)>;

  Projector(MuntzGrid g, long n, Precision p)
      : grid_(g), n_(n), p_(p), rule_(&gauss_rule(muntz_params(g), 2 * (n + 1), Domain::Unit, p)) {}

  long degree() const noexcept { return n_; }
  const QuadratureRule& rule() const noexcept { return *rule_; }

  /// Points u_k = s_k^q at which functions are sampled, in node order.
  std::vector<Real> sample_points() const {
    std::vector<Real> u;
    for (const Real& s : rule_->nodes) u.push_back(pow(s, grid_.q()));
    return u;
  }

  /// Projects several functions given by their samples at sample_points().
  /// samples[f][k] = f(u_k).
  std::vector<BasisVector> project_samples(const std::vector<std::vector<Complex>>& samples) const {
    const JacobiParams jp = muntz_params(grid_);
    std::vector<std::vector<Complex>> acc(samples.size(),
                                          std::vector<Complex>(static_cast<std::size_t>(n_ + 1), Complex(p_)));
    for (std::size_t k = 0; k < rule_->size(); ++k) {
      const std::vector<Real> jv = jacobi_eval_all(jp, n_, rule_->nodes[k]);
      for (std::size_t f = 0; f < samples.size(); ++f) {
        const Complex wf = samples[f].at(k) * rule_->weights[k];
        if (wf.is_zero()) continue;
        for (long i = 0; i <= n_; ++i) add_product(acc[f][static_cast<std::size_t>(i)], wf, jv[static_cast<std::size_t>(i)]);
      }
    }
    std::vector<BasisVector> out;
    for (auto& a : acc) {
      for (long i = 0; i <= n_; ++i) a[static_cast<std::size_t>(i)] *= Real(2 * i + grid_.q(), p_);
      out.push_back({grid_, std::move(a)});
    }
    return out;
  }

  BasisVector project(const Function& f) const {
    std::vector<Complex> s;
    for (const Real& u : sample_points()) s.push_back(f(u));
    return project_samples({s}).front();
  }

 private:
  MuntzGrid grid_;
  long n_;
  Precision p_;
  const QuadratureRule* rule_;
};

inline BasisVector project(const MuntzGrid& g, long n, const Projector::Function& f, Precision p) {
  return Projector(g, n, p).project(f);
}

/// Evaluates sum_i c_i J_i(u^{1/q}) by the three-term recurrence (no monomial form).
inline Complex evaluate_basis(const BasisVector& v, const Real& u) {
  const Real s = root(u, static_cast<unsigned long>(v.grid.q()));
  const std::vector<Real> jv = jacobi_eval_all(muntz_params(v.grid), v.degree(), s);
  Complex acc(s.precision());
  for (std::size_t i = 0; i < v.coeffs.size(); ++i) add_product(acc, v.coeffs[i], jv[i]);
  return acc;
}

}  // namespace muntz
