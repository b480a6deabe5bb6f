#include <gtest/gtest.h>

#include <functional>
#include <cmath>
#include <random>

#include "xrt/error.hpp"
#include "xrt/exponents.hpp"

using namespace xrt;

namespace {

Exponent ex(std::int64_t n, std::int64_t d = 1) { return Exponent(Rational(n, d)); }

void expect_kind(ErrorKind kind, const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "no exception";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), kind) << e.what();
  }
}

}  // namespace

TEST(Rational, ParsesFractionsAndIntegers) {
  EXPECT_EQ(parse_rational("5/6"), Rational(5, 6));
  EXPECT_EQ(parse_rational("-3"), Rational(-3));
  EXPECT_EQ(parse_rational("4/8"), Rational(1, 2));
  expect_kind(ErrorKind::parse, [] { parse_rational("0.5"); });
  expect_kind(ErrorKind::parse, [] { parse_rational("1/0"); });
  expect_kind(ErrorKind::parse, [] { parse_rational("abc"); });
}

TEST(Exponent, InfinityIsDistinguished) {
  const Exponent inf = Exponent::infinity();
  EXPECT_TRUE(inf.is_infinite());
  EXPECT_EQ(inf.conjugate(), ex(1));
  EXPECT_EQ(ex(1).conjugate(), inf);
  EXPECT_EQ(Exponent::parse("inf"), inf);
  EXPECT_EQ(inf.str(), "inf");
  EXPECT_TRUE(std::isinf(inf.as_double()));
}

TEST(ThetaZero, Values) {
  EXPECT_EQ(theta_zero(3), Rational(5, 6));
  EXPECT_EQ(theta_zero(4), Rational(9, 10));
  expect_kind(ErrorKind::dimension, [] { theta_zero(2); });
}

TEST(TripleForTheta, Examples) {
  EXPECT_EQ(triple_for_theta(3, Rational(0)), (ExponentTriple{ex(1), Exponent::infinity(), ex(1)}));
  const ExponentTriple t = triple_for_theta(3, Rational(5, 6));
  EXPECT_EQ(t, (ExponentTriple{ex(3, 2), ex(2), ex(2)}));
  EXPECT_EQ(t.str(), "p=3/2 q=2 r=2");
  expect_kind(ErrorKind::domain, [] { triple_for_theta(3, Rational(1)); });
  expect_kind(ErrorKind::domain, [] { triple_for_theta(3, Rational(-1, 3)); });
}

TEST(TripleForTheta, ExactIdentities) {
  std::mt19937_64 rng(11);
  for (int d = 3; d <= 6; ++d) {
    const ExponentTriple at0 = triple_for_theta(d, theta_zero(d));
    EXPECT_EQ(at0.q, at0.r) << d;
    for (int k = 0; k < 25; ++k) {
      const std::int64_t den = std::uniform_int_distribution<std::int64_t>(1, 60)(rng);
      const Rational theta(std::uniform_int_distribution<std::int64_t>(0, den - 1)(rng), den);
      const ExponentTriple e = triple_for_theta(d, theta);
      EXPECT_EQ(e.p.reciprocal() - e.q.reciprocal(), Rational(1) - theta);
      // 1/q = theta d/(d+2) checked independently.
      EXPECT_EQ(e.q.reciprocal(), theta * Rational(d, d + 2));
    }
  }
}

TEST(Conjugate, Examples) {
  EXPECT_EQ(conjugate(ExponentTriple{ex(3, 2), ex(2), ex(2)}), (ExponentTriple{ex(3), ex(2), ex(2)}));
  EXPECT_EQ(conjugate(ExponentTriple{ex(1), Exponent::infinity(), ex(1)}),
            (ExponentTriple{Exponent::infinity(), ex(1), Exponent::infinity()}));
  const ExponentTriple t{ex(5, 3), ex(5, 3), ex(5, 2)};
  EXPECT_EQ(conjugate(conjugate(t)), t);
}

TEST(EndpointTriple, ThetaOneForD3) {
  EXPECT_EQ(endpoint_triple(3), (ExponentTriple{ex(5, 3), ex(5, 3), ex(5, 2)}));
}

TEST(InterpConstants, WorkedEndpoints) {
  const ExponentTriple e0{ex(3, 2), ex(2), ex(2)};
  const ExponentTriple e1{ex(5, 3), ex(5, 3), ex(5, 2)};
  const InterpConstants ic = interp_constants(e0, e1, Rational(1, 2));
  EXPECT_EQ(ic.a0, Rational(-5));
  // v0' = 2, v1' = 5/3, u0' = 2, u1' = 5/2, u' = 20/9 worked by hand.
  EXPECT_EQ(ic.b, Rational(-20, 9));
  EXPECT_EQ(ic.a1, Rational(-6));
  expect_kind(ErrorKind::degenerate, [&] { interp_constants(e0, e0, Rational(1, 2)); });
}

TEST(InterpConstants, SwapExchangesIndices) {
  std::mt19937_64 rng(5);
  auto draw = [&] {
    const std::int64_t den = std::uniform_int_distribution<std::int64_t>(3, 20)(rng);
    return Exponent::from_reciprocal(Rational(std::uniform_int_distribution<std::int64_t>(1, den - 1)(rng), den));
  };
  for (int k = 0; k < 50; ++k) {
    const ExponentTriple e0{draw(), draw(), draw()}, e1{draw(), draw(), draw()};
    if (e0.r == e1.r) continue;
    const Rational theta(std::uniform_int_distribution<std::int64_t>(1, 9)(rng), 10);
    const InterpConstants f = interp_constants(e0, e1, theta);
    const InterpConstants b = interp_constants(e1, e0, Rational(1) - theta);
    EXPECT_EQ(f.intermediate, b.intermediate);
    EXPECT_EQ(f.a0, -b.a1);
    EXPECT_EQ(f.a1, -b.a0);
    EXPECT_EQ(f.b, b.b);
    EXPECT_EQ(f.c0, b.c1);
    EXPECT_EQ(f.d0, b.d1);
  }
}

TEST(K0Index, Examples) {
  const ExponentTriple e0{ex(3, 2), ex(2), ex(2)};
  const ExponentTriple e1{ex(5, 3), ex(5, 3), ex(5, 2)};
  const InterpConstants ic = interp_constants(e0, e1, Rational(1, 2));
  EXPECT_EQ(k0_index(ic, K0Inputs{}), 0.0);

  K0Inputs doubled;
  doubled.measure_e = 2.0;
  // (1/s - 1/s0) / (1 - v'/v0') with 1/s = 19/30, 1/s0 = 2/3, v'/v0' = V0/V = (1/2)/(11/20).
  const double expected = (19.0 / 30 - 2.0 / 3) / (1.0 - (0.5 / 0.55));
  EXPECT_NEAR(k0_index(ic, doubled) - k0_index(ic, K0Inputs{}), expected, 1e-12);

  K0Inputs bad;
  bad.a = 0.0;
  expect_kind(ErrorKind::domain, [&] { k0_index(ic, bad); });

  // Intermediate equal to endpoint 0 gives v' = v0'.
  const InterpConstants at0 = interp_constants(e0, e1, Rational(0));
  expect_kind(ErrorKind::degenerate, [&] { k0_index(at0, K0Inputs{}); });
}

TEST(BalanceRatio, Examples) {
  const ExponentTriple t0 = triple_for_theta(3, theta_zero(3));
  const double f_measure = 3.0;
  EXPECT_NEAR(balance_ratio(3, theta_zero(3), 2.0, std::pow(f_measure, t0.q.conjugate().reciprocal_double()), f_measure),
              1.0, 1e-14);
  EXPECT_NEAR(balance_ratio(3, Rational(1, 2), 1.0, 1.0, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(balance_ratio(3, Rational(5, 6), 2.0, 1.0, 1.0), 1.0, 1e-15);
  expect_kind(ErrorKind::domain, [] { balance_ratio(3, Rational(1, 2), 0.0, 1.0, 1.0); });
}
