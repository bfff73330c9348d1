#pragma once

#include <chrono>
#include <vector>

#include "muntz/basis.hpp"
#include "muntz/problem.hpp"

namespace muntz {

/// The projected problem on u in [0, 1] (t = T u) in the monomials u^{l/q}, l = 0..N:
///   c~_j = sum_r c~_r A_{jr} + P_j,
///   (A_{jr})_{k,l} = T^{theta_j} p^_{jr, l-k-s_j} theta_j^{l-s_j}   (k <= l - s_j),
///   P_{j,l} = psi~_{j,l} + T^{theta_j} p^_{j,n+1, l-s_j} theta_j^{l-s_j},
/// with s_j = theta_j q and theta_j^m = Gamma(m/q+1)/Gamma(m/q+theta_j+1). A_{jr} is only
/// stored through its generating row p^_{jr}: every diagonal of the band is that row
/// scaled column-wise.
class AssembledSystem {
 public:
  AssembledSystem(MuntzGrid g, long n_deg, Precision p, std::vector<RationalOrder> orders)
      : grid_(g), n_(n_deg), p_(p), orders_(std::move(orders)), coeffs_(orders_, g, n_deg, p) {
    for (const RationalOrder& o : orders_) shift_.push_back(o.shift(g));
  }

  long degree() const noexcept { return n_; }
  const MuntzGrid& grid() const noexcept { return grid_; }
  Precision precision() const noexcept { return p_; }
  std::size_t size() const noexcept { return orders_.size(); }
  const std::vector<RationalOrder>& orders() const noexcept { return orders_; }
  long shift(std::size_t j) const { return shift_.at(j); }
  const FracCoeffs& frac_coeffs() const noexcept { return coeffs_; }

  /// (A_{jr})_{k,l}; zero off the band.
  Complex a_entry(std::size_t j, std::size_t r, long k, long l) const {
    const long d = l - k - shift_[j];
    if (d < 0 || l > n_) return Complex(p_);
    return p_hat[j][r][static_cast<std::size_t>(d)] * (t_theta[j] * coeffs_.vartheta(j, l - shift_[j]));
  }
  /// P_{j,l}.
  Complex p_entry(std::size_t j, long l) const {
    Complex v = psi_bar[j][static_cast<std::size_t>(l)];
    const long d = l - shift_[j];
    if (d >= 0) add_product(v, f_hat[j][static_cast<std::size_t>(d)], t_theta[j] * coeffs_.vartheta(j, d));
    return v;
  }
  BandMatrix q_matrix(std::size_t j) const { return muntz::q_matrix(orders_[j], grid_, n_, p_); }

  std::vector<Real> t_theta;                          // T^{theta_j}
  std::vector<std::vector<std::vector<Complex>>> p_hat;  // p_hat[j][r][d], d = 0..N
  std::vector<std::vector<Complex>> f_hat;            // forcing rows, d = 0..N
  std::vector<std::vector<Complex>> psi_bar;          // Taylor part in u, l = 0..N

 private:
  MuntzGrid grid_;
  long n_;
  Precision p_;
  std::vector<RationalOrder> orders_;
  std::vector<long> shift_;
  FracCoeffs coeffs_;
};

struct GalerkinSolution {
  MuntzGrid grid;
  long degree;
  Precision precision;
  Real horizon;
  std::vector<BasisVector> c;         // Muntz-Jacobi coefficients per equation
  std::vector<MuntzSeries> c_tilde;   // monomial coefficients in u per equation
  double seconds = 0;
};

/// psi_j(T u) in the monomials of u: v_j^{(k)}(0) T^k / k! at index k q.
inline std::vector<Complex> transformed_taylor_part(const ProblemSpec& spec, std::size_t j, const MuntzGrid& g, long n,
                                                    const Real& horizon, Precision p) {
  std::vector<Complex> row(static_cast<std::size_t>(n + 1), Complex(p));
  Real scale(1, p);
  for (long k = 0; k < spec.orders[j].ceil(); ++k) {
    if (k > 0) scale = scale * horizon / Real(k, p);
    if (k * g.q() <= n) row[static_cast<std::size_t>(k * g.q())] = spec.initial[j][static_cast<std::size_t>(k)](p) * scale;
  }
  return row;
}

namespace detail {

/// Leading n+1 monomial coefficients (in u) of the degree-m projections of f(T u). The
/// conversion to monomials runs with enough extra bits to absorb its growth.
inline std::vector<std::vector<Complex>> projected_rows(const std::vector<const CoefficientFunction*>& fns, const MuntzGrid& g,
                                                        long m, long n, const Real& horizon, Precision p) {
  const Precision w = p + Precision::for_degree(m).bits();
  const Projector proj(g, m, w);
  const Real hw = horizon.rounded(w);
  std::vector<std::vector<Complex>> samples(fns.size());
  for (const Real& u : proj.sample_points()) {
    const Real t = hw * u;
    for (std::size_t k = 0; k < fns.size(); ++k) samples[k].push_back((*fns[k])(t, w));
  }
  std::vector<std::vector<Complex>> rows;
  for (const BasisVector& c : proj.project_samples(samples)) {
    const MuntzSeries mono = to_monomial(c);
    std::vector<Complex> row;
    for (long mu = 0; mu <= n; ++mu) row.push_back(mono[mu].rounded(p));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline bool rows_settled(const std::vector<Complex>& a, const std::vector<Complex>& b, Precision p) {
  Real scale(p), diff(p);
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = max(scale, abs(b[i]));
    diff = max(diff, abs(a[i] - b[i]));
  }
  return diff.is_zero() || diff <= scale * Real::pow2(24 - p.bits(), p);
}

}  // namespace detail

/// Rows p^ (in u) of f(T u): the leading N+1 coefficients of the full Muntz expansion
/// f(T u) = sum_i p^_i u^{i/q}. Functions with a known expansion are expanded directly.
/// Other functions are projected onto the Muntz-Jacobi basis of a degree m > N and
/// converted to monomials, with m doubled until the retained N+1 coefficients settle;
/// the monomial form of a degree-N projection alone is useless near index N, where the
/// projection error is amplified by the exponential growth of the conversion.
inline std::vector<std::vector<Complex>> project_coefficients(const std::vector<const CoefficientFunction*>& fns,
                                                              const MuntzGrid& g, long n, const Real& horizon,
                                                              Precision p) {
  std::vector<std::vector<Complex>> rows(fns.size(), std::vector<Complex>(static_cast<std::size_t>(n + 1), Complex(p)));
  std::vector<std::size_t> general;
  const Real troot = root(horizon.rounded(p), static_cast<unsigned long>(g.q()));
  for (std::size_t k = 0; k < fns.size(); ++k) {
    const CoefficientFunction& f = *fns[k];
    if (f.shape() == CoefficientFunction::Shape::Zero) continue;
    if (f.shape() == CoefficientFunction::Shape::Constant) {
      rows[k][0] = f(Real(p), p);
    } else if (f.has_series()) {
      const MuntzSeries s = f.expand(g, n, p);
      Real scale(1, p);
      for (long mu = 0; mu <= n; ++mu) {
        if (!s[mu].is_zero()) rows[k][static_cast<std::size_t>(mu)] = s[mu] * scale;
        scale *= troot;
      }
    } else {
      general.push_back(k);
    }
  }
  if (general.empty()) return rows;

  std::vector<const CoefficientFunction*> pending;
  for (std::size_t k : general) pending.push_back(fns[k]);
  long m = 2 * (n + 1);
  std::vector<std::vector<Complex>> prev = detail::projected_rows(pending, g, m, n, horizon, p);
  std::vector<bool> done(general.size(), false);
  for (int round = 0; round < 5; ++round) {
    m *= 2;
    std::vector<const CoefficientFunction*> todo;
    std::vector<std::size_t> at;
    for (std::size_t k = 0; k < general.size(); ++k) {
      if (!done[k]) {
        todo.push_back(fns[general[k]]);
        at.push_back(k);
      }
    }
    if (todo.empty()) break;
    const std::vector<std::vector<Complex>> next = detail::projected_rows(todo, g, m, n, horizon, p);
    for (std::size_t i = 0; i < at.size(); ++i) {
      done[at[i]] = detail::rows_settled(prev[at[i]], next[i], p);
      prev[at[i]] = next[i];
    }
  }
  for (std::size_t k = 0; k < general.size(); ++k) {
    if (!done[k]) throw PrecisionError("Muntz expansion of coefficient '" + fns[general[k]]->text() + "' did not settle");
    rows[general[k]] = std::move(prev[k]);
  }
  return rows;
}

inline AssembledSystem assemble(const ProblemSpec& spec, long n, Precision p) {
  spec.validate();
  const MuntzGrid g = spec.grid();
  long max_shift = 0;
  for (const RationalOrder& o : spec.orders) max_shift = std::max(max_shift, o.shift(g));
  if (n < max_shift) throw TruncationError("degree " + std::to_string(n) + " is below the largest order shift " + std::to_string(max_shift));
  if (!spec.forcings.empty() && spec.forcings.size() != spec.size()) throw ValidationError("forcings: wrong count");

  AssembledSystem sys(g, n, p, spec.orders);
  const Real horizon = spec.horizon(p);
  const std::size_t m = spec.size();
  std::vector<const CoefficientFunction*> fns;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t r = 0; r < m; ++r) fns.push_back(&spec.couplings[j][r]);
  }
  for (std::size_t j = 0; j < m; ++j) fns.push_back(&spec.forcings[j]);
  std::vector<std::vector<Complex>> rows = project_coefficients(fns, g, n, horizon, p);

  sys.p_hat.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t r = 0; r < m; ++r) sys.p_hat[j].push_back(std::move(rows[j * m + r]));
    sys.f_hat.push_back(std::move(rows[m * m + j]));
    sys.t_theta.push_back(pow(horizon, spec.orders[j].value()));
    sys.psi_bar.push_back(transformed_taylor_part(spec, j, g, n, horizon, p));
  }
  return sys;
}

/// Solves for the monomial rows one index l at a time, interleaving the equations:
/// entry l of c~_j depends on entries <= l - s_j < l of every c~_r.
inline std::vector<MuntzSeries> recurrence_solve(const AssembledSystem& sys) {
  const std::size_t m = sys.size();
  const long n = sys.degree();
  const Precision p = sys.precision();
  std::vector<MuntzSeries> ct(m, MuntzSeries(sys.grid(), n, p));
  for (long l = 0; l <= n; ++l) {
    for (std::size_t j = 0; j < m; ++j) {
      const long top = l - sys.shift(j);
      if (top < 0) {
        ct[j][l] = sys.psi_bar[j][static_cast<std::size_t>(l)];
        continue;
      }
      // sum_r sum_k c~_{r,k} p^_{jr, top-k}, then one scaling by T^theta theta^{top}
      Complex acc = sys.f_hat[j][static_cast<std::size_t>(top)];
      for (std::size_t r = 0; r < m; ++r) {
        const std::vector<Complex>& ph = sys.p_hat[j][r];
        for (long k = 0; k <= top; ++k) {
          const Complex& a = ph[static_cast<std::size_t>(top - k)];
          if (a.is_zero()) continue;
          const Complex& b = ct[r][k];
          if (!b.is_zero()) add_product(acc, a, b);
        }
      }
      Complex v = sys.psi_bar[j][static_cast<std::size_t>(l)];
      add_product(v, acc, sys.t_theta[j] * sys.frac_coeffs().vartheta(j, top));
      ct[j][l] = std::move(v);
    }
  }
  return ct;
}

inline GalerkinSolution back_substitute(const AssembledSystem& sys, std::vector<MuntzSeries> c_tilde, const Real& horizon) {
  GalerkinSolution sol{sys.grid(), sys.degree(), sys.precision(), horizon, {}, {}, 0};
  for (const MuntzSeries& s : c_tilde) sol.c.push_back(from_monomial(s, sys.degree()));
  sol.c_tilde = std::move(c_tilde);
  return sol;
}

/// v_j(t) = sum_i c_{j,i} J_i(t / T), evaluated through the three-term recurrence.
inline Complex evaluate(const GalerkinSolution& sol, std::size_t j, const Real& t) {
  const Real u = t / sol.horizon;
  if (u.sign() < 0 || u > 1L) throw DomainError("evaluation point outside [0, T]");
  return evaluate_basis(sol.c.at(j), u);
}

/// All components at one t, sharing one sweep of the basis recurrence.
inline std::vector<Complex> evaluate_all(const GalerkinSolution& sol, const Real& t) {
  const Real u = t / sol.horizon;
  if (u.sign() < 0 || u > 1L) throw DomainError("evaluation point outside [0, T]");
  const Real s = root(u, static_cast<unsigned long>(sol.grid.q()));
  const std::vector<Real> jv = jacobi_eval_all(muntz_params(sol.grid), sol.degree, s);
  std::vector<Complex> out;
  for (const BasisVector& c : sol.c) {
    Complex acc(s.precision());
    for (std::size_t i = 0; i < c.coeffs.size(); ++i) add_product(acc, c.coeffs[i], jv[i]);
    out.push_back(std::move(acc));
  }
  return out;
}

/// assemble + recurrence_solve + back_substitute, timed.
inline GalerkinSolution solve(const ProblemSpec& spec, long n, Precision p) {
  const auto start = std::chrono::steady_clock::now();
  const AssembledSystem sys = assemble(spec, n, p);
  GalerkinSolution sol = back_substitute(sys, recurrence_solve(sys), spec.horizon(p));
  sol.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}
inline GalerkinSolution solve(const ProblemSpec& spec, long n) { return solve(spec, n, Precision::for_degree(n)); }

/// Test oracle: the same system as one dense square solve c~ (I - A) = P by Gaussian
/// elimination with partial pivoting. Limited to N <= 64.
inline std::vector<MuntzSeries> dense_solve(const AssembledSystem& sys) {
  const long n = sys.degree();
  if (n > 64) throw DomainError("dense oracle is limited to N <= 64");
  const std::size_t m = sys.size();
  const std::size_t w = static_cast<std::size_t>(n + 1);
  const std::size_t dim = m * w;
  const Precision p = sys.precision();
  // row (j, l) is the equation for c~_{j,l}; column (r, k) the unknown c~_{r,k}
  std::vector<std::vector<Complex>> a(dim, std::vector<Complex>(dim + 1, Complex(p)));
  for (std::size_t j = 0; j < m; ++j) {
    for (long l = 0; l <= n; ++l) {
      auto& row = a[j * w + static_cast<std::size_t>(l)];
      for (std::size_t r = 0; r < m; ++r) {
        for (long k = 0; k <= n; ++k) row[r * w + static_cast<std::size_t>(k)] = -sys.a_entry(j, r, k, l);
      }
      row[j * w + static_cast<std::size_t>(l)] += Complex(1, p);
      row[dim] = sys.p_entry(j, l);
    }
  }
  for (std::size_t c = 0; c < dim; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < dim; ++r) {
      if (abs(a[r][c]) > abs(a[piv][c])) piv = r;
    }
    if (a[piv][c].is_zero()) throw PrecisionError("singular dense system");
    std::swap(a[c], a[piv]);
    for (std::size_t r = c + 1; r < dim; ++r) {
      if (a[r][c].is_zero()) continue;
      const Complex f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= dim; ++k) {
        if (!a[c][k].is_zero()) a[r][k] -= f * a[c][k];
      }
    }
  }
  std::vector<Complex> x(dim, Complex(p));
  for (std::size_t c = dim; c-- > 0;) {
    Complex s = a[c][dim];
    for (std::size_t k = c + 1; k < dim; ++k) {
      if (!a[c][k].is_zero()) s -= a[c][k] * x[k];
    }
    x[c] = s / a[c][c];
  }
  std::vector<MuntzSeries> out;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<Complex> row(x.begin() + static_cast<long>(j * w), x.begin() + static_cast<long>((j + 1) * w));
    out.emplace_back(sys.grid(), std::move(row));
  }
  return out;
}

}  // namespace muntz
