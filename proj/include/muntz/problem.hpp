#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "muntz/expr.hpp"
#include "muntz/series_oracle.hpp"

namespace muntz {

/// A precision-independent scalar: evaluated on demand at the requested precision.
using ScalarFn = std::function<Complex(Precision)>;
using RealFn = std::function<Real(Precision)>;

inline ScalarFn scalar(long v) {
  return [v](Precision p) { return Complex(v, p); };
}
inline ScalarFn scalar(Rational r) {
  return [r](Precision p) { return Complex(Real(r, p)); };
}

/// A coefficient function of t on [0, T], optionally with an exact Muntz expansion.
class CoefficientFunction {
 public:
  using Value = std::function<Complex(const Real& t, Precision p)>;
  using Series = std::function<MuntzSeries(const MuntzGrid& g, long m, Precision p)>;
  /// Constant: independent of t. Polynomial: the expansion is finite and exact.
  enum class Shape { Zero, Constant, Polynomial, General };

  CoefficientFunction() : CoefficientFunction(zero()) {}

  static CoefficientFunction zero() {
    CoefficientFunction f(Shape::Zero, 1, "0");
    f.value_ = [](const Real&, Precision p) { return Complex(p); };
    f.series_ = [](const MuntzGrid& g, long m, Precision p) { return MuntzSeries(g, m, p); };
    return f;
  }

  static CoefficientFunction from_expr(expr::Expr e) {
    const Shape shape = !expr::depends_on_t(e) ? Shape::Constant : (has_t_atom(e) ? Shape::General : Shape::Polynomial);
    CoefficientFunction f(shape, expr::grid_denominator(e), expr::print(e));
    f.value_ = [e](const Real& t, Precision p) { return expr::eval(e, t, p); };
    f.series_ = [e](const MuntzGrid& g, long m, Precision p) { return expr::expand(e, g, m, p); };
    return f;
  }
  static CoefficientFunction parse(std::string_view src) { return from_expr(expr::parse(src)); }

  /// sum_k c_k t^{nu_k} with exactly known coefficients.
  static CoefficientFunction polynomial(std::vector<std::pair<Rational, ScalarFn>> terms, std::string text) {
    long den = 1;
    for (const auto& [nu, c] : terms) {
      if (nu < Rational(0)) throw ValidationError("negative exponent in polynomial coefficient");
      den = lcm(den, static_cast<long>(nu.den()));
    }
    bool constant = true;
    for (const auto& term : terms) constant = constant && term.first == Rational(0);
    CoefficientFunction f(terms.empty() ? Shape::Zero : (constant ? Shape::Constant : Shape::Polynomial), den, std::move(text));
    auto shared = std::make_shared<const std::vector<std::pair<Rational, ScalarFn>>>(std::move(terms));
    f.value_ = [shared](const Real& t, Precision p) {
      Complex acc(p);
      for (const auto& [nu, c] : *shared) acc += c(p) * Complex(pow(t.rounded(p), nu));
      return acc;
    };
    f.series_ = [shared](const MuntzGrid& g, long m, Precision p) {
      MuntzSeries s(g, m, p);
      for (const auto& [nu, c] : *shared) {
        const long idx = g.index_of(nu);
        if (idx <= m) s[idx] += c(p);
      }
      return s;
    };
    return f;
  }

  /// Arbitrary function; `series` may be empty when no expansion is available.
  static CoefficientFunction general(Value value, Series series, long denominator, std::string text) {
    CoefficientFunction f(Shape::General, denominator, std::move(text));
    f.value_ = std::move(value);
    f.series_ = std::move(series);
    return f;
  }

  Complex operator()(const Real& t, Precision p) const { return value_(t, p); }
  bool has_series() const noexcept { return static_cast<bool>(series_); }
  MuntzSeries expand(const MuntzGrid& g, long m, Precision p) const {
    if (!series_) throw ValidationError("coefficient '" + text_ + "' has no Muntz expansion");
    return series_(g, m, p);
  }
  Shape shape() const noexcept { return shape_; }
  long denominator() const noexcept { return denominator_; }
  const std::string& text() const noexcept { return text_; }

 private:
  CoefficientFunction(Shape s, long den, std::string text) : shape_(s), denominator_(den), text_(std::move(text)) {}

  static bool has_t_atom(const expr::Expr& e) {
    if (!e) return false;
    if (expr::is_atom(e->kind) && expr::depends_on_t(e->lhs)) return true;
    return has_t_atom(e->lhs) || has_t_atom(e->rhs);
  }

  Shape shape_;
  long denominator_;
  std::string text_;
  Value value_;
  Series series_;
};

/// Reference solution: all components at one t.
using Reference = std::function<std::vector<Complex>(const Real& t, Precision p)>;

/// D^{theta_j} v_j = sum_r p_{jr} v_r + p_{j,n+1} on [0, T] with v_j^{(k)}(0) given for k < ceil(theta_j).
struct ProblemSpec {
  std::string name;
  std::vector<RationalOrder> orders;
  std::vector<std::vector<CoefficientFunction>> couplings;
  std::vector<CoefficientFunction> forcings;
  std::vector<std::vector<ScalarFn>> initial;
  RealFn horizon;
  std::string horizon_text;
  std::vector<CoefficientFunction> exact;  // manufactured solutions, if any
  Reference reference;                     // exact solution, if known
  std::string reference_label;             // how the reference is computed, for reports

  std::size_t size() const noexcept { return orders.size(); }

  /// Global q: lcm of every order denominator and every exponent denominator.
  long grid_q() const {
    long q = 1;
    for (const RationalOrder& o : orders) q = lcm(q, o.q_denom());
    for (const auto& row : couplings) {
      for (const CoefficientFunction& c : row) q = lcm(q, c.denominator());
    }
    for (const CoefficientFunction& c : forcings) q = lcm(q, c.denominator());
    for (const CoefficientFunction& c : exact) q = lcm(q, c.denominator());
    return q;
  }
  MuntzGrid grid() const { return MuntzGrid(grid_q()); }

  void validate() const {
    const std::size_t n = size();
    if (n == 0) throw ValidationError("orders: at least one equation is required");
    if (couplings.size() != n) throw ValidationError("couplings: expected " + std::to_string(n) + " rows");
    for (std::size_t j = 0; j < n; ++j) {
      if (couplings[j].size() != n) {
        throw ValidationError("couplings[" + std::to_string(j) + "]: expected " + std::to_string(n) + " entries");
      }
    }
    if (forcings.size() != n) throw ValidationError("forcings: expected " + std::to_string(n) + " entries");
    if (initial.size() != n) throw ValidationError("initial: expected " + std::to_string(n) + " rows");
    for (std::size_t j = 0; j < n; ++j) {
      if (static_cast<long>(initial[j].size()) != orders[j].ceil()) {
        throw ValidationError("initial[" + std::to_string(j) + "]: order " + orders[j].value().str() + " needs " +
                              std::to_string(orders[j].ceil()) + " values");
      }
    }
    if (!horizon) throw ValidationError("T: missing horizon");
    if (horizon(Precision(64)).sign() <= 0) throw ValidationError("T: horizon must be positive");
    if (!exact.empty() && exact.size() != n) throw ValidationError("manufactured.exact: expected " + std::to_string(n) + " entries");
  }
};

namespace detail {

/// Forcing f_j = D^{theta_j} exact_j - sum_r p_{jr} exact_r as an evaluable series. The
/// expansion order is doubled until the tail is negligible on [0, T], and the series
/// is summed with enough guard bits to absorb the cancellation of oscillatory terms.
class ManufacturedForcing {
 public:
  struct Data {
    std::vector<RationalOrder> orders;
    std::vector<std::vector<CoefficientFunction>> couplings;
    std::vector<CoefficientFunction> exact;
    MuntzGrid grid;
    RealFn horizon;
  };
  struct Expansion {
    std::vector<MuntzSeries> forcing;  // one per equation, at guard precision
    Precision guard;
  };

  explicit ManufacturedForcing(Data d) : data_(std::move(d)) {}

  const Expansion& at(Precision p) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(p.bits());
    if (it != cache_.end()) return it->second;
    return cache_.emplace(p.bits(), build(p)).first->second;
  }

  /// Forcing series to order exactly m at precision p (for the series oracle).
  std::vector<MuntzSeries> series(long m, Precision p) const {
    long shift = 0;
    for (const RationalOrder& o : data_.orders) shift = std::max(shift, o.shift(data_.grid));
    return compute(m + shift, p, m);
  }

 private:
  Data data_;
  std::mutex mutex_;
  std::map<long, Expansion> cache_;

  std::vector<MuntzSeries> compute(long m_exact, Precision w, long keep) const {
    const std::size_t n = data_.orders.size();
    std::vector<MuntzSeries> ex;
    std::vector<std::vector<MuntzSeries>> cp(n);
    for (std::size_t j = 0; j < n; ++j) {
      ex.push_back(data_.exact[j].expand(data_.grid, m_exact, w));
      for (std::size_t r = 0; r < n; ++r) cp[j].push_back(data_.couplings[j][r].expand(data_.grid, m_exact, w));
    }
    std::vector<MuntzSeries> f = manufacture_forcing(data_.orders, ex, cp);
    for (MuntzSeries& s : f) s = s.truncated(std::min(keep, s.truncation()));
    return f;
  }

  // log2 of |a_mu| T^{mu/q}, or a very negative number for zero coefficients
  static double term_log2(const Complex& a, long mu, long q, double log2_t) {
    if (a.is_zero()) return -1e18;
    return static_cast<double>(abs(a).magnitude_log2()) + log2_t * static_cast<double>(mu) / static_cast<double>(q);
  }

  Expansion build(Precision p) const {
    const long q = data_.grid.q();
    const double log2_t = std::log2(data_.horizon(Precision(64)).to_double());
    long m = 32 * q;
    Precision guard = p + 64;
    for (int round = 0; round < 16; ++round) {
      std::vector<MuntzSeries> f = compute(m, guard, m);
      double peak = 0, tail = -1e18;
      for (const MuntzSeries& s : f) {
        const long mt = s.truncation();
        for (long mu = 0; mu <= mt; ++mu) {
          const double t = term_log2(s[mu], mu, q, log2_t);
          peak = std::max(peak, t);
          if (mu > mt - 2 * q) tail = std::max(tail, t);
        }
      }
      const Precision need = p + static_cast<long>(std::ceil(peak)) + 32;
      const bool converged = tail < -static_cast<double>(p.bits() + 16);
      if (converged && guard.bits() >= need.bits()) return {std::move(f), guard};
      if (guard.bits() < need.bits()) guard = need + 32;
      if (!converged) m *= 2;
    }
    throw PrecisionError("manufactured forcing expansion did not converge on [0, T]");
  }
};

}  // namespace detail

/// Replaces the forcings of a manufactured problem by D^theta exact - sum p exact, and sets
/// the reference (if absent) to the exact solutions.
inline void resolve_manufactured(ProblemSpec& spec) {
  if (spec.exact.empty()) return;
  const std::size_t n = spec.size();
  for (const CoefficientFunction& e : spec.exact) {
    if (!e.has_series()) throw ValidationError("manufactured.exact: '" + e.text() + "' has no Muntz expansion");
  }
  for (const auto& row : spec.couplings) {
    for (const CoefficientFunction& c : row) {
      if (!c.has_series()) throw ValidationError("couplings: '" + c.text() + "' has no Muntz expansion");
    }
  }
  const MuntzGrid g = spec.grid();
  auto shared = std::make_shared<detail::ManufacturedForcing>(
      detail::ManufacturedForcing::Data{spec.orders, spec.couplings, spec.exact, g, spec.horizon});
  spec.forcings.clear();
  for (std::size_t j = 0; j < n; ++j) {
    auto value = [shared, j](const Real& t, Precision p) {
      const auto& ex = shared->at(p);
      return Complex(ex.forcing[j].eval(t.rounded(ex.guard))).rounded(p);
    };
    auto series = [shared, j, g](const MuntzGrid& grid, long m, Precision p) {
      if (!(grid == g)) throw GridMismatchError("manufactured forcing requested on a foreign grid");
      return shared->series(m, p)[j];
    };
    spec.forcings.push_back(CoefficientFunction::general(value, series, g.q(), "manufactured"));
  }
  if (!spec.reference) {
    spec.reference_label = "manufactured exact solutions";
    const std::vector<CoefficientFunction> exact = spec.exact;
    spec.reference = [exact](const Real& t, Precision p) {
      std::vector<Complex> out;
      for (const CoefficientFunction& e : exact) out.push_back(e(t, p));
      return out;
    };
  }
}

/// The local problem in t with every coefficient expanded to order m, for the series oracle.
inline SeriesProblem to_series_problem(const ProblemSpec& spec, long m, Precision p) {
  const MuntzGrid g = spec.grid();
  SeriesProblem sp{g, spec.orders, {}, {}, {}};
  for (std::size_t j = 0; j < spec.size(); ++j) {
    std::vector<MuntzSeries> row;
    for (const CoefficientFunction& c : spec.couplings[j]) row.push_back(c.expand(g, m, p));
    sp.couplings.push_back(std::move(row));
    sp.forcings.push_back(spec.forcings[j].expand(g, m, p));
    std::vector<Complex> init;
    for (const ScalarFn& v : spec.initial[j]) init.push_back(v(p));
    sp.initial.push_back(std::move(init));
  }
  return sp;
}

}  // namespace muntz
