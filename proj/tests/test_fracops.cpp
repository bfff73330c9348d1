#include <gtest/gtest.h>

#include <random>

#include "muntz/fracops.hpp"

using namespace muntz;

namespace {

const Precision P128(128);

bool close(const Complex& a, const Complex& b, long log2_tol) {
  const Real d = relative_difference(a, b);
  return d.is_zero() || d.magnitude_log2() < log2_tol;
}

Real sqrt_pi(Precision p) { return sqrt(Real::pi(p)); }

MuntzSeries random_series(const MuntzGrid& g, long m, std::mt19937_64& rng, Precision p) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  MuntzSeries s(g, m, p);
  for (long mu = 0; mu <= m; ++mu) s[mu] = Complex(Real(d(rng), p), Real(d(rng), p));
  return s;
}

}  // namespace

TEST(RationalOrder, Validation) {
  const RationalOrder o(3, 2);
  EXPECT_EQ(o.gamma_num(), 3);
  EXPECT_EQ(o.q_denom(), 2);
  EXPECT_EQ(o.ceil(), 2);
  EXPECT_EQ(o.shift(MuntzGrid(4)), 6);
  EXPECT_THROW(RationalOrder(2, 1), ValidationError);
  EXPECT_THROW(RationalOrder(-1, 2), ValidationError);
  EXPECT_THROW(o.shift(MuntzGrid(3)), GridMismatchError);
}

TEST(FracIntegralMonomial, Examples) {
  const Real sp = sqrt_pi(P128);
  auto [c1, e1] = frac_integral_monomial(Rational(1, 2), Rational(0), P128);
  EXPECT_TRUE(close(Complex(c1), Complex(Real(2, P128) / sp), -125));
  EXPECT_EQ(e1, Rational(1, 2));
  auto [c2, e2] = frac_integral_monomial(Rational(1), Rational(1), P128);
  EXPECT_EQ(c2, Real(0.5, P128));
  EXPECT_EQ(e2, Rational(2));
  auto [c3, e3] = frac_integral_monomial(Rational(1, 2), Rational(1, 2), P128);
  EXPECT_TRUE(close(Complex(c3), Complex(sp / 2L), -125));
  EXPECT_EQ(e3, Rational(1));
}

TEST(FracIntegralSeries, Examples) {
  const MuntzGrid g(2);
  const Real sp = sqrt_pi(P128);
  const MuntzSeries one(g, {Complex(1, P128)});
  const MuntzSeries a = frac_integral_series(Rational(1, 2), one);
  ASSERT_EQ(a.truncation(), 1);
  EXPECT_TRUE(a[0].is_zero());
  EXPECT_TRUE(close(a[1], Complex(Real(2, P128) / sp), -125));

  const MuntzSeries z = frac_integral_series(Rational(1, 2), MuntzSeries(g, 3, P128));
  for (const Complex& c : z.coeffs()) EXPECT_TRUE(c.is_zero());

  const MuntzSeries s(g, {Complex(1, P128), Complex(P128), Complex(5, P128)});
  const MuntzSeries b = frac_integral_series(Rational(3, 2), s);
  ASSERT_EQ(b.truncation(), 5);
  for (long mu : {0L, 1L, 2L, 4L}) EXPECT_TRUE(b[mu].is_zero());
  EXPECT_TRUE(close(b[3], Complex(gamma_ratio(Real(1, P128), Real(2.5, P128))), -125));
  EXPECT_TRUE(close(b[5], Complex(gamma_ratio(Real(2, P128), Real(3.5, P128)) * 5L), -125));

  EXPECT_THROW(frac_integral_series(Rational(1, 3), one), GridMismatchError);
  EXPECT_EQ(frac_integral_series(Rational(3, 2), s, 4).truncation(), 4);
}

TEST(CaputoDerivative, Examples) {
  const MuntzGrid g(2);
  const RationalOrder half(1, 2);
  const MuntzSeries c = caputo_derivative_series(half, MuntzSeries(g, {Complex(7, P128), Complex(P128)}));
  for (const Complex& x : c.coeffs()) EXPECT_TRUE(x.is_zero());

  const MuntzSeries d = caputo_derivative_series(half, MuntzSeries(g, {Complex(P128), Complex(1, P128)}));
  EXPECT_TRUE(close(d[0], Complex(sqrt_pi(P128) / 2L), -125));

  const MuntzSeries e = caputo_derivative_series(RationalOrder(3, 2),
                                                 MuntzSeries(g, {Complex(P128), Complex(P128), Complex(1, P128), Complex(P128)}));
  for (const Complex& x : e.coeffs()) EXPECT_TRUE(x.is_zero());
}

TEST(CaputoDerivative, InadmissibleExponents) {
  const MuntzGrid g(4);
  // t^{1/2} under a 3/4 derivative falls below the order
  MuntzSeries s(g, 6, P128);
  s[2] = Complex(1, P128);
  EXPECT_THROW(caputo_derivative_series(RationalOrder(3, 4), s), InadmissibleExponentError);
  // t^{1/2} with order 5/4: non-integer exponent inside the annihilation gap
  MuntzSeries s2(g, 8, P128);
  s2[2] = Complex(1, P128);
  EXPECT_THROW(caputo_derivative_series(RationalOrder(5, 4), s2), InadmissibleExponentError);
  // but t^{5/4} is fine
  MuntzSeries s3(g, 8, P128);
  s3[5] = Complex(1, P128);
  EXPECT_NO_THROW(caputo_derivative_series(RationalOrder(5, 4), s3));
}

TEST(QMatrix, Examples) {
  const MuntzGrid g(2);
  const Real sp = sqrt_pi(P128);
  const BandMatrix q1 = q_matrix(RationalOrder(1, 2), g, 2, P128);
  EXPECT_EQ(q1.offset(), 1);
  EXPECT_TRUE(close(Complex(q1.entry(0, 1, P128)), Complex(Real(2, P128) / sp), -125));
  EXPECT_TRUE(close(Complex(q1.entry(1, 2, P128)), Complex(sp / 2L), -125));
  EXPECT_TRUE(q1.entry(0, 2, P128).is_zero());
  EXPECT_TRUE(q1.entry(2, 2, P128).is_zero());

  const BandMatrix q0 = q_matrix(RationalOrder(5, 2), g, 3, P128);
  EXPECT_TRUE(q0.is_zero());

  const BandMatrix q2 = q_matrix(RationalOrder(3, 2), g, 3, P128);
  EXPECT_TRUE(close(Complex(q2.entry(0, 3, P128)), Complex(Real(4, P128) / (sp * 3L)), -125));
  long nonzeros = 0;
  for (long r = 0; r <= 3; ++r) {
    for (long c = 0; c <= 3; ++c) nonzeros += !q2.entry(r, c, P128).is_zero();
  }
  EXPECT_EQ(nonzeros, 1);
}

TEST(QMatrix, EqualsTermwiseIntegral) {
  std::mt19937_64 rng(3);
  for (long q : {2L, 3L, 6L}) {
    const MuntzGrid g(q);
    for (const Rational theta : {Rational(1, q), Rational(q + 1, q), Rational(5, q)}) {
      if (theta.is_integer()) continue;
      const long n = 24;
      const MuntzSeries s = random_series(g, n, rng, P128);
      const BandMatrix qm = q_matrix(RationalOrder(theta), g, n, P128);
      const std::vector<Complex> viaq = qm.is_zero() ? std::vector<Complex>(n + 1, Complex(P128)) : qm.left_apply(s.coeffs());
      const MuntzSeries vias = frac_integral_series(theta, s, n);
      for (long mu = 0; mu <= n; ++mu) EXPECT_EQ(viaq[mu], vias[mu]) << q << " " << theta.str() << " " << mu;
    }
  }
}

TEST(Identities, Semigroup) {
  std::mt19937_64 rng(5);
  const Precision p(160);
  for (long q : {2L, 3L, 4L, 6L}) {
    const MuntzGrid g(q);
    std::uniform_int_distribution<long> pick(1, 3 * q);
    for (int trial = 0; trial < 8; ++trial) {
      const Rational a(pick(rng), q), b(pick(rng), q);
      const MuntzSeries s = random_series(g, 20, rng, p);
      const MuntzSeries lhs = frac_integral_series(a, frac_integral_series(b, s));
      const MuntzSeries rhs = frac_integral_series(a + b, s);
      ASSERT_EQ(lhs.truncation(), rhs.truncation());
      for (long mu = 0; mu <= lhs.truncation(); ++mu) {
        if (rhs[mu].is_zero()) {
          EXPECT_TRUE(lhs[mu].is_zero());
        } else {
          EXPECT_TRUE(close(lhs[mu], rhs[mu], 16 - p.bits())) << a.str() << " " << b.str() << " " << mu;
        }
      }
    }
  }
}

TEST(Identities, CaputoLeftInverse) {
  std::mt19937_64 rng(9);
  for (long q : {2L, 3L, 4L}) {
    const MuntzGrid g(q);
    for (long num = 1; num < 3 * q; ++num) {
      const Rational theta(num, q);
      if (theta.is_integer()) continue;
      const RationalOrder o(theta);
      const MuntzSeries s = random_series(g, 16, rng, P128);
      const MuntzSeries back = caputo_derivative_series(o, frac_integral_series(theta, s));
      ASSERT_EQ(back.truncation(), s.truncation());
      for (long mu = 0; mu <= s.truncation(); ++mu) EXPECT_TRUE(close(back[mu], s[mu], 8 - 128)) << theta.str() << " " << mu;
    }
  }
}

TEST(Identities, IntegralOfCaputoRemovesTaylorPart) {
  // s built from admissible exponents: integers plus exponents above ceil(theta)-1 and theta
  const MuntzGrid g(4);
  const RationalOrder o(5, 4);
  MuntzSeries s(g, 16, P128);
  s[0] = Complex(3, P128);
  s[4] = Complex(-2, P128);
  s[5] = Complex(Real(1.5, P128), Real(1, P128));
  s[7] = Complex(1, P128);
  s[8] = Complex(4, P128);
  s[13] = Complex(-1, P128);
  const MuntzSeries d = caputo_derivative_series(o, s);
  const MuntzSeries back = frac_integral_series(o, d);
  ASSERT_EQ(back.truncation(), 16);
  MuntzSeries expected = s;
  expected[0] = Complex(P128);
  expected[4] = Complex(P128);
  for (long mu = 0; mu <= 16; ++mu) {
    if (expected[mu].is_zero()) {
      EXPECT_TRUE(back[mu].is_zero()) << mu;
    } else {
      EXPECT_TRUE(close(back[mu], expected[mu], 8 - 128)) << mu;
    }
  }
}

TEST(Identities, CaputoAnnihilatesLowDegreePolynomials) {
  const MuntzGrid g(6);
  for (long num : {1L, 5L, 7L, 11L, 13L, 17L}) {
    const RationalOrder o(num, 6);
    MuntzSeries s(g, 6 * o.ceil() + 6, P128);
    for (long k = 0; k < o.ceil(); ++k) s[6 * k] = Complex(k + 2, P128);
    const MuntzSeries d = caputo_derivative_series(o, s);
    for (const Complex& c : d.coeffs()) EXPECT_TRUE(c.is_zero());
  }
}

TEST(FracCoeffs, Families) {
  const MuntzGrid g(6);
  const FracCoeffs fc({RationalOrder(1, 2), RationalOrder(4, 3)}, g, 60, P128);
  for (std::size_t j = 0; j < 2; ++j) {
    for (long m = 0; m <= 60; ++m) {
      const Rational x = Rational(m, 6) + 1;
      const Rational th = j == 0 ? Rational(1, 2) : Rational(4, 3);
      const Real direct = gamma_ratio(Real(x, P128), Real(x + th, P128));
      EXPECT_TRUE(close(Complex(fc.vartheta(j, m)), Complex(direct), 8 - 128)) << j << " " << m;
      if (m > 0) {
        EXPECT_LT(fc.vartheta(j, m), fc.vartheta(j, m - 1));
      }
    }
    EXPECT_EQ(fc.xi(j, 3, 4), fc.vartheta(j, 7));
  }
  EXPECT_TRUE(close(Complex(fc.xi_bar(0, 3)), Complex(gamma_ratio(Real(1, P128), Real(1.5, P128))), -125));
}
