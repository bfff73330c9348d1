// End-to-end acceptance checks. Each test prints one "[criterion k] PASS|FAIL" line.
#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "muntz/expr.hpp"
#include "muntz/fixtures.hpp"
#include "support.hpp"

using namespace muntz;

namespace {

class Verdict {
 public:
  Verdict(int id, std::string what) : id_(id), what_(std::move(what)), start_(std::chrono::steady_clock::now()) {}
  ~Verdict() {
    std::printf("[criterion %d] %s  %s (%.1f s)\n", id_, ::testing::Test::HasFailure() ? "FAIL" : "PASS", what_.c_str(), seconds());
    std::fflush(stdout);
  }
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  int id_;
  std::string what_;
  std::chrono::steady_clock::time_point start_;
};

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool rel_close(const Complex& a, const Complex& b, long log2_tol) {
  const Real d = relative_difference(a, b);
  return d.is_zero() || d.magnitude_log2() < log2_tol;
}

bool below(const Real& x, const Real& bound) { return x.is_zero() || x <= bound; }

Real pow10(long e, Precision p) { return pow(Real(10, p), Rational(e)); }

struct Exm5Case {
  Rational theta;
  long degree;
  double baseline;  // best published competitor error
};

const std::vector<Exm5Case> kExm5 = {
    {Rational(1, 4), 5, 6.00e-10}, {Rational(2, 5), 7, 2.47e-10}, {Rational(1, 2), 3, 5.14e-11}, {Rational(2, 3), 5, 1.44e-11}};

ConvergenceRecord exm5_record(const Exm5Case& c) {
  FixtureOptions opts;
  opts.theta = c.theta;
  const FixtureRun run = run_fixture("exm5", opts, std::vector<long>{c.degree}, 256);
  return run.records.front();
}

MuntzSeries random_series(const MuntzGrid& g, long m, std::mt19937_64& rng, Precision p) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  MuntzSeries s(g, m, p);
  for (long mu = 0; mu <= m; ++mu) s[mu] = Complex(Real(d(rng), p), Real(d(rng), p));
  return s;
}

}  // namespace

TEST(Acceptance, C1_ExactSubspaceReproduction) {
  Verdict v(1, "exm5 at N = 5, 7, 3, 5 and 256 bits: E <= 1e-40, <= 1 s per case");
  for (const Exm5Case& c : kExm5) {
    const auto t0 = std::chrono::steady_clock::now();
    const ConvergenceRecord r = exm5_record(c);
    const double secs = elapsed(t0);
    ASSERT_TRUE(r.error) << r.failure;
    EXPECT_TRUE(below(*r.error, pow10(-40, Precision(256)))) << c.theta.str() << " E = " << r.error->str(6);
    EXPECT_LE(secs, 1.0) << c.theta.str();
    std::printf("    theta = %s  N = %ld  E = %s\n", c.theta.str().c_str(), c.degree, r.error->str(4).c_str());
  }
}

TEST(Acceptance, C2_BeatsPublishedBaselines) {
  Verdict v(2, "exm5 errors below the published baselines by more than 10 orders");
  for (const Exm5Case& c : kExm5) {
    const ConvergenceRecord r = exm5_record(c);
    ASSERT_TRUE(r.error) << r.failure;
    const Real bound = Real(c.baseline, Precision(256)) * pow10(-10, Precision(256));
    EXPECT_LT(*r.error, bound) << c.theta.str();
  }
}

TEST(Acceptance, C3_MittagLefflerRelaxation) {
  Verdict v(3, "exm6 on [0,1] at 512 bits: E(64) <= 1e-10, E(2N)/E(N) <= 1e-2, <= 30 s");
  const auto t0 = std::chrono::steady_clock::now();
  const FixtureRun run = run_fixture("exm6", {}, std::vector<long>{16, 32, 64}, 512);
  const double secs = elapsed(t0);
  ASSERT_EQ(run.records.size(), 3u);
  for (const ConvergenceRecord& r : run.records) {
    ASSERT_TRUE(r.error) << r.failure;
    std::printf("    N = %ld  E = %s\n", r.degree, r.error->str(4).c_str());
  }
  const Precision p(512);
  EXPECT_LE(*run.records[2].error, pow10(-10, p));
  EXPECT_LE(*run.records[1].error / *run.records[0].error, Real(0.01, p));
  EXPECT_LE(*run.records[2].error / *run.records[1].error, Real(0.01, p));
  EXPECT_LE(secs, 30.0);
}

TEST(Acceptance, C4_ExponentialConvergenceShape) {
  Verdict v(4, "exm1 (omega = 10), N = 32..128: log10 E decreasing, concave or linear, slope <= -0.02, <= 5 min");
  const std::vector<long> degrees = {32, 64, 96, 128};
  const auto t0 = std::chrono::steady_clock::now();
  const FixtureRun run = run_fixture("exm1", {}, degrees);
  const double secs = elapsed(t0);
  std::vector<double> lg;
  for (const ConvergenceRecord& r : run.records) {
    ASSERT_TRUE(r.error) << r.degree << ": " << r.failure;
    ASSERT_FALSE(r.error->is_zero());
    lg.push_back(log10(*r.error).to_double());
    std::printf("    N = %ld  log10 E = %.3f  (%d bits)\n", r.degree, lg.back(), static_cast<int>(r.bits));
  }
  for (std::size_t k = 1; k < lg.size(); ++k) EXPECT_LT(lg[k], lg[k - 1]) << "not decreasing at N = " << degrees[k];
  // equally spaced degrees: second differences of a concave-or-linear curve are <= 0, up to
  // a quarter decade of scatter
  for (std::size_t k = 1; k + 1 < lg.size(); ++k) EXPECT_LE(lg[k + 1] - 2 * lg[k] + lg[k - 1], 0.25) << "convex at N = " << degrees[k];
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < lg.size(); ++k) {
    mx += static_cast<double>(degrees[k]);
    my += lg[k];
  }
  mx /= static_cast<double>(lg.size());
  my /= static_cast<double>(lg.size());
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < lg.size(); ++k) {
    sxy += (static_cast<double>(degrees[k]) - mx) * (lg[k] - my);
    sxx += (static_cast<double>(degrees[k]) - mx) * (static_cast<double>(degrees[k]) - mx);
  }
  const double slope = sxy / sxx;
  std::printf("    least-squares slope = %.4f per degree\n", slope);
  EXPECT_LE(slope, -0.02);
  EXPECT_LE(secs, 300.0);
}

TEST(Acceptance, C5_RecurrenceMatchesDenseElimination) {
  Verdict v(5, "20 random small problems: recurrence == dense elimination to 2^(24-bits), <= 10 s");
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240611);
  const Precision p(128);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rp = muntz::testing::random_problem(rng);
    ASSERT_LE(rp.spec.size(), 3u);
    ASSERT_LE(rp.degree, 8);
    ASSERT_LE(rp.spec.grid_q(), 6);
    const AssembledSystem sys = assemble(rp.spec, rp.degree, p);
    const auto rec = recurrence_solve(sys);
    const auto dense = dense_solve(sys);
    Real scale(p);
    for (const auto& row : dense) {
      for (const Complex& c : row.coeffs()) scale = max(scale, abs(c));
    }
    const Real eps = pow(Real(2, p), Rational(24 - p.bits()));
    for (std::size_t j = 0; j < rec.size(); ++j) {
      for (long l = 0; l <= rp.degree; ++l) {
        const Complex& a = rec[j][l];
        const Complex& b = dense[j][l];
        const Real mag = max(abs(a), abs(b));
        // entries that cancel to round-off of the system scale have no relative digits to compare
        const bool ok = mag <= eps * scale || abs(a - b) <= eps * mag;
        EXPECT_TRUE(ok) << "trial " << trial << " eq " << j << " index " << l << ": " << a.str(8) << " vs " << b.str(8);
      }
    }
  }
  EXPECT_LE(elapsed(t0), 10.0);
}

TEST(Acceptance, C6_OperatorIdentities) {
  Verdict v(6, "semigroup, Caputo left inverse, annihilation, Muntz-Jacobi Gram matrix, <= 60 s");
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(6);
  const Precision p(160);
  // I^a I^b = I^{a+b}
  for (long q : {2L, 3L, 4L, 6L}) {
    const MuntzGrid g(q);
    std::uniform_int_distribution<long> pick(1, 3 * q);
    for (int trial = 0; trial < 10; ++trial) {
      const Rational a(pick(rng), q), b(pick(rng), q);
      const MuntzSeries s = random_series(g, 24, rng, p);
      const MuntzSeries lhs = frac_integral_series(a, frac_integral_series(b, s));
      const MuntzSeries rhs = frac_integral_series(a + b, s);
      ASSERT_EQ(lhs.truncation(), rhs.truncation());
      for (long mu = 0; mu <= rhs.truncation(); ++mu) {
        if (rhs[mu].is_zero()) {
          EXPECT_TRUE(lhs[mu].is_zero());
        } else {
          EXPECT_TRUE(rel_close(lhs[mu], rhs[mu], 16 - p.bits())) << a.str() << " " << b.str() << " " << mu;
        }
      }
    }
  }
  // D_C^theta I^theta = id
  for (long q : {2L, 3L, 4L, 6L}) {
    const MuntzGrid g(q);
    for (long num = 1; num < 3 * q; ++num) {
      const Rational theta(num, q);
      if (theta.is_integer()) continue;
      const MuntzSeries s = random_series(g, 20, rng, p);
      const MuntzSeries back = caputo_derivative_series(RationalOrder(theta), frac_integral_series(theta, s));
      ASSERT_EQ(back.truncation(), s.truncation());
      for (long mu = 0; mu <= s.truncation(); ++mu) EXPECT_TRUE(rel_close(back[mu], s[mu], 8 - p.bits())) << theta.str() << " " << mu;
    }
  }
  // D_C^theta kills polynomials of degree < ceil(theta)
  for (long q : {2L, 3L, 4L, 6L}) {
    const MuntzGrid g(q);
    for (long num = 1; num < 3 * q; ++num) {
      const Rational theta(num, q);
      if (theta.is_integer()) continue;
      const RationalOrder o(theta);
      MuntzSeries s(g, q * o.ceil() + q, p);
      for (long k = 0; k < o.ceil(); ++k) s[q * k] = Complex(Real(k + 2, p), Real(-k, p));
      for (const Complex& c : caputo_derivative_series(o, s).coeffs()) EXPECT_TRUE(c.is_zero()) << theta.str();
    }
  }
  // int_0^1 J_i J_k du = zeta_i delta_ik, i, k <= 30
  const long n = 30;
  const Precision pg(192);
  for (long q : {2L, 3L, 4L, 6L}) {
    const MuntzGrid g(q);
    const QuadratureRule& rule = gauss_rule(muntz_params(g), n + 1, Domain::Unit, pg);
    std::vector<std::vector<Real>> vals;
    for (const Real& s : rule.nodes) vals.push_back(jacobi_eval_all(muntz_params(g), n, s));
    const Real zmax = muntz_norm_sq(g, 0, pg);
    const Real off_tol = zmax * pow(Real(2, pg), Rational(16 - pg.bits()));
    for (long i = 0; i <= n; ++i) {
      for (long k = 0; k <= i; ++k) {
        Real acc(pg);
        for (std::size_t m = 0; m < rule.size(); ++m) acc += rule.weights[m] * vals[m][static_cast<std::size_t>(i)] * vals[m][static_cast<std::size_t>(k)];
        acc *= q;
        if (i == k) {
          EXPECT_TRUE(rel_close(Complex(acc), Complex(muntz_norm_sq(g, i, pg)), 16 - pg.bits())) << q << " " << i;
        } else {
          EXPECT_TRUE(below(abs(acc), off_tol)) << q << " " << i << " " << k;
        }
      }
    }
  }
  EXPECT_LE(elapsed(t0), 60.0);
}

namespace {

// sup over 50 points of [0, 0.05 T] of |Galerkin - series| against 10 (tail + E(N))
void check_series_agreement(const std::string& name, long n) {
  const Fixture fx = make_fixture(name);
  const Precision p = Precision::for_degree(n);
  const GalerkinSolution sol = solve(fx.spec, n, p);
  const Real e_n = error_norm(sol, fx.spec.reference, n);
  const long m = 4 * n;
  const SeriesSolution ser = series_solve(to_series_problem(fx.spec, m, p), m, sol.horizon);
  const long q = sol.grid.q();
  const Real t_max = sol.horizon * Real(0.05, p);
  // tail: the last block of q retained terms at the right end of the window
  Real tail(p);
  for (const MuntzSeries& s : ser.v) {
    Real block(p);
    for (long mu = m - q + 1; mu <= m; ++mu) block += abs(s[mu]) * pow(t_max, Rational(mu, q));
    tail = max(tail, block);
  }
  const Real floor = pow(Real(2, p), Rational(24 - p.bits()));
  const Real bound = max(Real(10, p) * (tail + e_n), floor);
  Real sup(p);
  for (long k = 0; k < 50; ++k) {
    const Real t = t_max * Real(k, p) / 49L;
    const std::vector<Complex> g = evaluate_all(sol, t);
    for (std::size_t j = 0; j < g.size(); ++j) sup = max(sup, abs(g[j] - series_eval(ser, j, t)));
  }
  std::printf("    %s N = %ld (%ld bits): sup = %s  bound = %s  (tail %s, E %s)\n", name.c_str(), n, p.bits(), sup.str(4).c_str(),
              bound.str(4).c_str(), tail.str(4).c_str(), e_n.str(4).c_str());
  EXPECT_TRUE(below(sup, bound)) << name;
}

}  // namespace

TEST(Acceptance, C7_SeriesOracleCrossValidation) {
  Verdict v(7, "series oracle (M = 4N) vs Galerkin on [0, 0.05T] for exm1/exm3; exm6 series coefficients, <= 30 s");
  const auto t0 = std::chrono::steady_clock::now();
  check_series_agreement("exm1", 128);
  check_series_agreement("exm3", 256);

  const Fixture fx = make_fixture("exm6");
  const Precision p(*fx.bits);
  const SeriesSolution ser = series_solve(to_series_problem(fx.spec, 12, p), 12, fx.spec.horizon(p));
  const Real sp = sqrt(Real::pi(p));
  const long tol = 24 - p.bits();
  EXPECT_TRUE(rel_close(ser.v[0][1], Complex(Real(-18, p) / sp), tol));
  EXPECT_TRUE(rel_close(ser.v[0][2], Complex(9, p), tol));
  EXPECT_TRUE(rel_close(ser.v[0][3], Complex(Real(-12, p) / sp), tol));
  EXPECT_LE(elapsed(t0), 30.0);
}

TEST(Acceptance, C8_StiffMatrixProblem) {
  Verdict v(8, "exm7 at T = 1/2, N = 256, policy precision: E <= 1e-6, <= 10 min");
  const auto t0 = std::chrono::steady_clock::now();
  const FixtureRun run = run_fixture("exm7", {}, std::vector<long>{256});
  const double secs = elapsed(t0);
  const ConvergenceRecord& r = run.records.front();
  ASSERT_TRUE(r.error) << r.failure;
  std::printf("    N = 256 (%ld bits): E = %s\n", r.bits, r.error->str(4).c_str());
  EXPECT_LE(*r.error, pow10(-6, Precision(r.bits)));
  EXPECT_LE(secs, 600.0);
}

TEST(Acceptance, C9_ParserRobustness) {
  Verdict v(9, "every example coefficient parses and evaluates; 10^4-length fuzz inputs never crash, <= 60 s");
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::string> exprs = {
      "t^(1/2)", "1", "0.5*besselj(0; t^(5/4))", "t", "2*t^(3/2)", "sin(2*t^(1/2))", "3",
      "sin(70*t^(1/4))", "cos(70*t^(1/2))", "sin(70*t^(3/4)) + cos(12*t^(3/4))",
      "t^(5/2)", "cos(t^(3/2))", "t^(1/2)*exp(80*i*t^(1/2))", "exp(10*i*t^(3/2))",
      "2*t", "t^(1/3)", "sin(2*t^(1/6))", "t^(11/6)", "5", "cos(t^(2/3))",
      "sin(10*t^(1/6))", "t^(2/3) + 5*t^(5/6)", "-1", "5.125", "-9.875", "0",
  };
  const Precision p(128);
  for (const std::string& src : exprs) {
    expr::Expr e;
    ASSERT_NO_THROW(e = expr::parse(src)) << src;
    for (double td : {0.0, 0.25, 1.0, 4.5}) {
      const Complex val = expr::eval(e, Real(td, p), p);
      EXPECT_TRUE(std::isfinite(abs(val).to_double())) << src << " at " << td;
    }
  }
  std::mt19937_64 rng(99);
  const std::string alphabet = "t i0123456789.+-*^();/esincoxpbj ()";
  const std::vector<std::string> tokens = {"t", "i", "sin(", "cos(", "exp(", "besselj(0;", "^(1/2)", "^3", "*", "+", "-", "(", ")", "0.5", "1e4", " "};
  std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1), tok(0, tokens.size() - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::string s;
    while (s.size() < 10000) s += coin(rng) ? std::string(1, alphabet[ch(rng)]) : tokens[tok(rng)];
    s.resize(10000);
    try {
      const expr::Expr e = expr::parse(s);
      (void)expr::eval(e, Real(0.5, p), p);
    } catch (const Error&) {
      // rejection is fine; crashing or hanging is not
    }
  }
  EXPECT_THROW(expr::parse(std::string(10000, '(')), ParseError);
  EXPECT_LE(elapsed(t0), 60.0);
}
