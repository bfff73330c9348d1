#include <gtest/gtest.h>

#include <random>

#include "muntz/expr.hpp"

using namespace muntz;

namespace {

const Precision P128(128);

bool close(const Complex& a, const Complex& b, long log2_tol) {
  const Real d = relative_difference(a, b);
  return d.is_zero() || d.magnitude_log2() < log2_tol;
}

// every coefficient expression appearing in the bundled examples
const std::vector<std::string> kExampleExprs = {
    "t^(1/2)",
    "1",
    "0.5*besselj(0; t^(5/4))",
    "2*t^(3/2)",
    "sin(2*t^(1/2))",
    "3",
    "t",
    "t^(5/2)",
    "cos(t^(3/2))",
    "2*t",
    "t^(1/3)",
    "sin(2*t^(1/6))",
    "t^(11/6)",
    "5",
    "cos(t^(2/3))",
    "-1",
    "sin(70*t^(1/4))",
    "cos(70*t^(1/2))",
    "sin(70*t^(3/4)) + cos(12*t^(3/4))",
    "t^(1/2)*exp(i*80*t^(1/2))",
    "exp(i*10*t^(3/2))",
    "sin(10*t^(1/6))",
    "t^(2/3) + 5*t^(5/6)",
    "t^(5/4)",
};

}  // namespace

TEST(Parse, Examples) {
  EXPECT_NO_THROW(expr::parse("sin(2*t^(1/2))"));
  EXPECT_NO_THROW(expr::parse("t^(5/2)"));
  EXPECT_THROW(expr::parse("sin(t + 1)"), ValidationError);
}

TEST(Parse, Errors) {
  try {
    expr::parse("2*t + ");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.byte_offset(), 6u);
  }
  EXPECT_THROW(expr::parse("t^(1/0)"), ParseError);
  EXPECT_THROW(expr::parse("foo(t)"), ParseError);
  EXPECT_THROW(expr::parse("besselj(t; t)"), ParseError);
  EXPECT_THROW(expr::parse("(t"), ParseError);
  EXPECT_THROW(expr::parse(""), ParseError);
  EXPECT_THROW(expr::parse("t^(-1/2)"), ValidationError);
  EXPECT_THROW(expr::parse("(t+1)^(1/2)"), ValidationError);
  EXPECT_THROW(expr::parse("sin(sin(t))"), ValidationError);
  EXPECT_NO_THROW(expr::parse("sin(1 + 2)*t"));
  EXPECT_NO_THROW(expr::parse("(1 + t)^3"));
}

TEST(Eval, Examples) {
  EXPECT_EQ(expr::eval(expr::parse("t^(5/2)"), Real(4, P128), P128), Real(32, P128));
  EXPECT_EQ(expr::eval(expr::parse("besselj(0; t^(5/4))"), Real(0, P128), P128), Real(1, P128));
  EXPECT_EQ(expr::eval(expr::parse("exp(i*80*t^(1/2))"), Real(0, P128), P128), Real(1, P128));
  const Complex v = expr::eval(expr::parse("2 - 3*i + t^2"), Real(3, P128), P128);
  EXPECT_EQ(v.re(), Real(11, P128));
  EXPECT_EQ(v.im(), Real(-3, P128));
}

TEST(Expand, Examples) {
  const MuntzGrid g(2);
  const MuntzSeries a = expr::expand(expr::parse("exp(i*t^(1/2))"), g, 2, P128);
  ASSERT_EQ(a.truncation(), 2);
  EXPECT_EQ(a[0], Real(1, P128));
  EXPECT_TRUE(a[1].re().is_zero());
  EXPECT_EQ(a[1].im(), Real(1, P128));
  EXPECT_EQ(a[2], Real(-0.5, P128));

  const MuntzSeries b = expr::expand(expr::parse("3"), g, 0, P128);
  EXPECT_EQ(b[0], Real(3, P128));

  const MuntzSeries c = expr::expand(expr::parse("sin(2*t^(1/2))"), g, 3, P128);
  EXPECT_TRUE(c[0].is_zero());
  EXPECT_EQ(c[1], Real(2, P128));
  EXPECT_TRUE(c[2].is_zero());
  EXPECT_TRUE(close(c[3], Complex(Real(-4, P128) / 3L), -125));

  EXPECT_THROW(expr::expand(expr::parse("t^(1/3)"), g, 4, P128), GridMismatchError);
  EXPECT_THROW(expr::expand(expr::parse("t"), g, -1, P128), TruncationError);
}

TEST(Expand, ConsistentWithEval) {
  for (const std::string& src : kExampleExprs) {
    const expr::Expr e = expr::parse(src);
    const long q = lcm(12L, expr::grid_denominator(e));
    const MuntzGrid g(q);
    // deep enough that the tail of the oscillatory examples is asymptotic at t = 1e-2
    const long m = 24 * q;
    const Precision p(512);
    const MuntzSeries s = expr::expand(e, g, m, p);
    // |eval - expand| <= C t^{(M+1)/q}: the scaled residual must not grow as t shrinks
    std::vector<double> scaled;
    for (double td : {1e-2, 1e-3, 1e-4}) {
      const Real t(td, p);
      const Real err = abs(expr::eval(e, t, p) - s.eval(t));
      const Real bound = pow(t, Rational(m + 1, q));
      scaled.push_back((err / bound).to_double());
    }
    for (std::size_t k = 1; k < scaled.size(); ++k) {
      EXPECT_LE(scaled[k], scaled[0] * 1.01 + 1e-20) << src;
    }
  }
}

TEST(Print, RoundTrip) {
  for (const std::string& src : kExampleExprs) {
    const expr::Expr e = expr::parse(src);
    const expr::Expr back = expr::parse(expr::print(e));
    EXPECT_TRUE(expr::structurally_equal(e, back)) << src << " -> " << expr::print(e);
  }
  for (const std::string src : {"-(t + 1)*2", "1 - (2 - t)", "-t^(1/2)", "(2*t)^3", "--t", "t*(i*t)", "(1.5e3)^2"}) {
    const expr::Expr e = expr::parse(src);
    EXPECT_TRUE(expr::structurally_equal(e, expr::parse(expr::print(e)))) << src << " -> " << expr::print(e);
  }
}

TEST(Expr, GridDenominator) {
  EXPECT_EQ(expr::grid_denominator(expr::parse("besselj(0; t^(5/4)) + t^(1/6)")), 12);
  EXPECT_EQ(expr::grid_denominator(expr::parse("3*t")), 1);
}

TEST(Parse, FuzzTotality) {
  std::mt19937_64 rng(2024);
  const std::string alphabet = "t i0123456789.+-*^();/esincoxpbj ()";
  const std::vector<std::string> tokens = {"t", "i", "sin(", "cos(", "exp(", "besselj(1;", "^(1/2)", "^2", "*", "+", "-", "(", ")", "2.5", "1e3", " "};
  std::uniform_int_distribution<std::size_t> ch(0, alphabet.size() - 1), tok(0, tokens.size() - 1);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<std::size_t> len(0, 10000);
  for (int trial = 0; trial < 400; ++trial) {
    std::string s;
    const std::size_t n = trial < 8 ? 10000 : len(rng);
    while (s.size() < n) s += coin(rng) ? std::string(1, alphabet[ch(rng)]) : tokens[tok(rng)];
    s.resize(n);
    try {
      const expr::Expr e = expr::parse(s);
      (void)expr::print(e);
    } catch (const ParseError& e) {
      EXPECT_LE(e.byte_offset(), s.size());
    } catch (const ValidationError&) {
    } catch (const OverflowError&) {
    }
  }
  // deep nesting is rejected, not a stack overflow
  EXPECT_THROW(expr::parse(std::string(10000, '(') + "t" + std::string(10000, ')')), ParseError);
  EXPECT_THROW(expr::parse(std::string(10000, '-') + "t"), ParseError);
}
