#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "muntz/harness.hpp"
#include "muntz/numeric/matrix.hpp"
#include "muntz/numeric/special.hpp"

namespace muntz {

struct FixtureOptions {
  bool full_scale = false;      // original frequencies and horizons instead of the reduced ones
  Rational theta{1, 2};         // exm5 only
};

struct Fixture {
  ProblemSpec spec;
  std::vector<long> degrees;  // default sweep
  std::optional<long> bits;   // fixed precision, else the degree policy
};

inline std::vector<std::string> fixture_names() { return {"exm1", "exm3", "exm2", "exm5", "exm6", "exm7", "zero"}; }

namespace detail {

inline std::vector<CoefficientFunction> parse_row(const std::vector<std::string>& row) {
  std::vector<CoefficientFunction> out;
  for (const std::string& s : row) out.push_back(CoefficientFunction::parse(s));
  return out;
}

inline CoefficientFunction constant(Rational c) {
  if (c == Rational(0)) return CoefficientFunction::zero();
  return CoefficientFunction::polynomial({{Rational(0), scalar(c)}}, c.str());
}

inline RealFn horizon_pi(Rational factor) {
  return [factor](Precision p) { return Real::pi(p) * Real(factor, p); };
}
inline RealFn horizon_const(Rational t) {
  return [t](Precision p) { return Real(t, p); };
}

inline Fixture manufactured(ProblemSpec s, std::vector<long> degrees) {
  resolve_manufactured(s);
  return {std::move(s), std::move(degrees), std::nullopt};
}

// Three oscillatory equations with orders 1/4, 1/2, 3/4 on [0, pi/2].
inline Fixture exm1(bool full) {
  const std::string w = full ? "70" : "10";
  ProblemSpec s;
  s.name = full ? "exm1-full" : "exm1";
  s.orders = {RationalOrder(1, 4), RationalOrder(1, 2), RationalOrder(3, 4)};
  s.couplings = {parse_row({"t^(1/2)", "1", "0.5*besselj(0; t^(5/4))"}), parse_row({"1", "t", "2*t^(3/2)"}),
                 parse_row({"sin(2*t^(1/2))", "3", "t"})};
  s.exact = parse_row({"sin(" + w + "*t^(1/4))", "cos(" + w + "*t^(1/2))", "sin(" + w + "*t^(3/4)) + cos(12*t^(3/4))"});
  s.initial = {{scalar(0)}, {scalar(1)}, {scalar(1)}};
  s.horizon = horizon_pi(Rational(1, 2));
  s.horizon_text = "pi/2";
  return manufactured(std::move(s), full ? std::vector<long>{250, 500, 750} : std::vector<long>{32, 64, 96, 128, 160, 192});
}

// Complex oscillatory pair with orders 1/2 and 3/2 on [0, 3 pi/2].
inline Fixture exm3(bool full) {
  const std::string w1 = full ? "80" : "12", w2 = full ? "10" : "3";
  ProblemSpec s;
  s.name = full ? "exm3-full" : "exm3";
  s.orders = {RationalOrder(1, 2), RationalOrder(3, 2)};
  s.couplings = {parse_row({"t^(5/2)", "1"}), parse_row({"1", "cos(t^(3/2))"})};
  s.exact = parse_row({"t^(1/2)*exp(" + w1 + "*i*t^(1/2))", "exp(" + w2 + "*i*t^(3/2))"});
  // values of the exact solutions: v1(0) = 0, v2(0) = 1, v2'(0) = 0
  s.initial = {{scalar(0)}, {scalar(1), scalar(0)}};
  s.horizon = horizon_pi(Rational(3, 2));
  s.horizon_text = "3*pi/2";
  return manufactured(std::move(s), full ? std::vector<long>{400, 800, 1100} : std::vector<long>{64, 128, 192, 256, 320});
}

// Non-smooth solutions on the grid q = 6, orders 1/6, 1/3, 2/3 on [0, 1].
inline Fixture exm2() {
  ProblemSpec s;
  s.name = "exm2";
  s.orders = {RationalOrder(1, 6), RationalOrder(1, 3), RationalOrder(2, 3)};
  s.couplings = {parse_row({"2*t", "t^(1/3)", "sin(2*t^(1/6))"}), parse_row({"t^(11/6)", "t^(1/2)", "5"}),
                 parse_row({"t", "1", "cos(t^(2/3))"})};
  s.exact = parse_row({"sin(10*t^(1/6))", "t^(1/3)", "t^(2/3) + 5*t^(5/6)"});
  s.initial = {{scalar(0)}, {scalar(0)}, {scalar(0)}};
  s.horizon = horizon_const(Rational(1));
  s.horizon_text = "1";
  return manufactured(std::move(s), {16, 32, 48, 64});
}

// D^theta v1 = v2, D^theta v2 = -v1 - v2 + f with v1 = t^{1+theta}, v2 = Gamma(2+theta) t.
inline Fixture exm5(Rational theta) {
  long degree = 0;
  if (theta == Rational(1, 4) || theta == Rational(2, 3)) {
    degree = 5;
  } else if (theta == Rational(2, 5)) {
    degree = 7;
  } else if (theta == Rational(1, 2)) {
    degree = 3;
  } else if (theta > Rational(0) && theta < Rational(1)) {
    degree = 8;
  } else {
    throw ValidationError("theta: exm5 needs 0 < theta < 1");
  }
  const ScalarFn g2 = [theta](Precision p) { return Complex(gamma(Real(theta + 2, p))); };
  const ScalarFn ratio = [theta](Precision p) { return Complex(gamma_ratio(Real(theta + 2, p), Real(Rational(2) - theta, p))); };
  ProblemSpec s;
  s.name = "exm5(theta=" + theta.str() + ")";
  s.orders = {RationalOrder(theta), RationalOrder(theta)};
  s.couplings = {{CoefficientFunction::zero(), constant(Rational(1))}, {constant(Rational(-1)), constant(Rational(-1))}};
  s.forcings = {CoefficientFunction::zero(),
                CoefficientFunction::polynomial({{theta + 1, scalar(1)}, {Rational(1) - theta, ratio}, {Rational(1), g2}},
                                                "t^(1+theta) + Gamma(2+theta)/Gamma(2-theta) t^(1-theta) + Gamma(2+theta) t")};
  s.initial = {{scalar(0)}, {scalar(0)}};
  s.horizon = horizon_const(Rational(1));
  s.horizon_text = "1";
  s.reference = [theta](const Real& t, Precision p) {
    const Real tp = t.rounded(p);
    return std::vector<Complex>{Complex(pow(tp, theta + 1)), Complex(gamma(Real(theta + 2, p)) * tp)};
  };
  s.reference_label = "closed form t^(1+theta), Gamma(2+theta) t";
  return {std::move(s), {degree}, 256};
}

// D^{1/2} v = -v + 1, v(0) = 10; v = 9 E_{1/2}(-t^{1/2}) + 1.
inline Fixture exm6(bool full) {
  ProblemSpec s;
  s.name = full ? "exm6-full" : "exm6";
  s.orders = {RationalOrder(1, 2)};
  s.couplings = {{constant(Rational(-1))}};
  s.forcings = {constant(Rational(1))};
  s.initial = {{scalar(10)}};
  const Rational horizon = full ? Rational(1000) : Rational(1);
  s.horizon = horizon_const(horizon);
  s.horizon_text = horizon.str();
  s.reference = [](const Real& t, Precision p) {
    const Complex e = mittag_leffler(Rational(1, 2), Complex(-sqrt(t.rounded(p))));
    return std::vector<Complex>{e * Complex(9, p) + Complex(1, p)};
  };
  s.reference_label = "9 E_{1/2}(-t^{1/2}) + 1";
  return {std::move(s), full ? std::vector<long>{1000, 2000, 4000, 5480} : std::vector<long>{16, 32, 64}, full ? std::nullopt : std::optional<long>(512)};
}

// Stiff oscillatory 5x5 system D^{1/2} V = A V with V = E_{1/2}(A t^{1/2}) V0.
inline Fixture exm7(bool full) {
  static const long a8[5][5] = {{41, 41, -38, 40, -2}, {-79, 81, 2, 0, -2}, {20, -60, 20, -20, -8}, {-22, 58, -24, 20, -4}, {1, 1, -2, -4, -2}};
  ProblemSpec s;
  s.name = full ? "exm7-full" : "exm7";
  for (int j = 0; j < 5; ++j) {
    s.orders.emplace_back(1, 2);
    std::vector<CoefficientFunction> row;
    for (int r = 0; r < 5; ++r) row.push_back(constant(Rational(a8[j][r], 8)));
    s.couplings.push_back(std::move(row));
    s.forcings.push_back(CoefficientFunction::zero());
    s.initial.push_back({scalar(j + 1)});
  }
  const Rational horizon = full ? Rational(2) : Rational(1, 2);
  s.horizon = horizon_const(horizon);
  s.horizon_text = horizon.str();
  s.reference = [](const Real& t, Precision p) {
    const Real st = sqrt(t.rounded(p));
    RealMatrix m(5, 5, p);
    std::vector<Real> v0;
    for (std::size_t j = 0; j < 5; ++j) {
      for (std::size_t r = 0; r < 5; ++r) m(j, r) = Real(Rational(a8[j][r], 8), p) * st;
      v0.emplace_back(static_cast<long>(j + 1), p);
    }
    std::vector<Complex> out;
    for (Real& x : matrix_mittag_leffler_apply(Rational(1, 2), m, v0)) out.emplace_back(std::move(x));
    return out;
  };
  s.reference_label = "E_{1/2}(A t^{1/2}) V0";
  return {std::move(s), full ? std::vector<long>{1000, 2240} : std::vector<long>{256}, std::nullopt};
}

inline Fixture zero_fixture() {
  ProblemSpec s;
  s.name = "zero";
  s.orders = {RationalOrder(1, 2)};
  s.couplings = {{CoefficientFunction::zero()}};
  s.forcings = {CoefficientFunction::zero()};
  s.initial = {{scalar(0)}};
  s.horizon = horizon_const(Rational(1));
  s.horizon_text = "1";
  s.reference = [](const Real&, Precision p) { return std::vector<Complex>{Complex(p)}; };
  s.reference_label = "zero";
  return {std::move(s), {4, 8, 16}, std::nullopt};
}

}  // namespace detail

/// Built-in problems by name. Reduced (desk-scale) variants unless opts.full_scale.
inline Fixture make_fixture(std::string_view name, const FixtureOptions& opts = {}) {
  if (name == "exm1") return detail::exm1(opts.full_scale);
  if (name == "exm3") return detail::exm3(opts.full_scale);
  if (name == "exm2") return detail::exm2();
  if (name == "exm5") return detail::exm5(opts.theta);
  if (name == "exm6") return detail::exm6(opts.full_scale);
  if (name == "exm7") return detail::exm7(opts.full_scale);
  if (name == "zero") return detail::zero_fixture();
  throw ValidationError("unknown fixture '" + std::string(name) + "'");
}

struct FixtureRun {
  Fixture fixture;
  std::vector<ConvergenceRecord> records;
};

/// Builds the fixture and runs its sweep; `degrees` and `bits` override the defaults.
inline FixtureRun run_fixture(std::string_view name, const FixtureOptions& opts = {}, std::optional<std::vector<long>> degrees = {},
                              std::optional<long> bits = {}) {
  Fixture fx = make_fixture(name, opts);
  RunConfig cfg;
  cfg.degrees = degrees ? *degrees : fx.degrees;
  cfg.bits = bits ? bits : fx.bits;
  auto records = converge(fx.spec, cfg);
  return {std::move(fx), std::move(records)};
}

}  // namespace muntz
