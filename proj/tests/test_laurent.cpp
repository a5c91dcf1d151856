#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <sandpile/exact.hpp>
#include <sandpile/laurent.hpp>

#include "generators.hpp"

using namespace sandpile;

namespace {

LaurentPoly P(const char* s) { return parse_poly(s); }

}  // namespace

TEST(Mul, WorkedProducts) {
  EXPECT_EQ(mul(P("-u^-1+3+u"), P("u^-1+3-u")), P("-u^-2+11-u^2"));
  EXPECT_EQ(mul(P("-u^-2-2u^-1+2-u+u^2"), P("1-u-u^2")), P("-u^-2-u^-1+5-u-u^4"));
  EXPECT_EQ(mul(P("-u^-2-2u^-1+3+u"), P("2-u")), P("-2u^-2-3u^-1+8-u-u^2"));
}

TEST(Mul, IdentityAndZero) {
  const LaurentPoly h = P("-2*u1^-1 + 5 - 2*u1");
  EXPECT_EQ(mul(h, LaurentPoly::constant(1, 1)), h);
  EXPECT_TRUE(mul(h, LaurentPoly(1)).is_zero());
}

TEST(Mul, DimensionMismatchThrows) {
  EXPECT_THROW(mul(P("2-u1"), P("3-u1-u2")), std::invalid_argument);
}

TEST(Mul, SupportWithinSumOfSupports) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = testgen::random_poly(rng, 2), b = testgen::random_poly(rng, 2);
    const auto p = mul(a, b);
    for (const auto& e : p.support()) {
      bool found = false;
      for (const auto& x : a.support())
        for (const auto& y : b.support())
          if (x + y == e) found = true;
      EXPECT_TRUE(found);
    }
  }
}

TEST(Mul, LargeCoefficientsStayExact) {
  LaurentPoly p = P("3+u");
  for (int k = 0; k < 60; ++k) p = mul(p, P("3+u"));
  EXPECT_EQ(p.coeff({0}), BigInt(1) * boost::multiprecision::pow(BigInt(3), 61));
}

TEST(Reflect, Examples) {
  EXPECT_EQ(reflect(P("2-u")), P("2-u^-1"));
  EXPECT_EQ(reflect(P("5-2u-2u^-1")), P("5-2u-2u^-1"));
}

TEST(Reflect, InvolutiveRingHomomorphism) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 3;
    const auto a = testgen::random_poly(rng, d), b = testgen::random_poly(rng, d);
    EXPECT_EQ(reflect(reflect(a)), a);
    EXPECT_EQ(reflect(mul(a, b)), mul(reflect(a), reflect(b)));
    EXPECT_EQ(reflect(a + b), reflect(a) + reflect(b));
  }
}

TEST(Classify, WorkedExamples) {
  const auto c1 = classify(P("-2u^-2-3u^-1+8-u-u^2"));
  EXPECT_TRUE(c1.sandpile);
  EXPECT_EQ(c1.dominant_coeff, 8);
  EXPECT_EQ(c1.l1_norm, 15);

  const auto c2 = classify(P("2-u-u^-1"));
  EXPECT_FALSE(c2.lopsided);
  EXPECT_FALSE(c2.sandpile);

  const auto c3 = classify(P("-2u^-1+5-2u"));
  EXPECT_TRUE(c3.sandpile);
  EXPECT_FALSE(c3.simple);
  EXPECT_EQ(c3.dominant_coeff, 5);
  EXPECT_EQ(*c3.dominant_position, Exponent{0});
}

TEST(Classify, SimplePolynomials) {
  EXPECT_TRUE(classify(P("3-u-u^-1")).simple);
  EXPECT_TRUE(classify(P("5-u1-u1^-1-u2-u2^-1")).simple);
  EXPECT_FALSE(classify(P("5-u1-u1^-1-u2")).simple);
  EXPECT_FALSE(classify(P("5-u1-u1^-1-u1*u2-u2^-1")).simple);
}

TEST(Classify, LopsidedOffOriginIsNotSandpile) {
  const auto c = classify(P("1+4u-u^2"));
  EXPECT_TRUE(c.lopsided);
  EXPECT_EQ(*c.dominant_position, Exponent{1});
  EXPECT_FALSE(c.sandpile);
  EXPECT_FALSE(classify(P("5-2u+u^-1")).sandpile);
}

TEST(Classify, ZeroThrows) { EXPECT_THROW(classify(LaurentPoly(1)), std::invalid_argument); }

TEST(AssociatedPlus, Examples) {
  EXPECT_EQ(associated_plus(P("2-u")), P("2+u"));
  EXPECT_EQ(associated_plus(P("-2u^-1+5-2u")), P("2u^-1+5+2u"));
  const auto f = associated_plus(P("3-u1-u2"));
  EXPECT_EQ(f, P("3+u1+u2"));
  const auto prod = mul(f, P("3-u1-u2"));
  EXPECT_EQ(prod, P("9-u1^2-2u1*u2-u2^2"));
  EXPECT_TRUE(classify(prod).sandpile);
  EXPECT_THROW(associated_plus(P("1-u-u^2")), std::invalid_argument);
}

TEST(AssociatedPlus, ProductIsSandpileForRandomG) {
  std::mt19937_64 rng(2024);
  for (int d = 1; d <= 3; ++d)
    for (int trial = 0; trial < 20; ++trial) {
      const auto g = testgen::random_sandpile(rng, d);
      ASSERT_TRUE(classify(g).sandpile) << to_string(g);
      const auto h = mul(associated_plus(g), g);
      EXPECT_TRUE(classify(h).sandpile) << to_string(g);
    }
}

TEST(EvalTorus, Examples) {
  EXPECT_NEAR(std::abs(eval_torus(P("2-u"), {0.0}) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(eval_torus(P("2-u"), {0.5}) - 3.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(eval_torus(P("5-2u-2u^-1"), {0.0}) - 1.0), 0.0, 1e-15);
}

TEST(EvalTorus, Multiplicative) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 3;
    const auto a = testgen::random_poly(rng, d), b = testgen::random_poly(rng, d);
    std::vector<double> t(static_cast<std::size_t>(d));
    for (auto& x : t) x = unit(rng);
    const auto lhs = eval_torus(mul(a, b), t);
    const auto rhs = eval_torus(a, t) * eval_torus(b, t);
    EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(Expansiveness, LopsidedShortcut) {
  const auto c = expansiveness_certificate(P("5-2u-2u^-1"), 32);
  EXPECT_TRUE(c.expansive);
  EXPECT_EQ(c.method, "lopsided");
  EXPECT_DOUBLE_EQ(c.min_modulus, 1.0);
}

TEST(Expansiveness, ZeroOnCircle) {
  const auto c = expansiveness_certificate(P("2-u-u^-1"), 32);
  EXPECT_FALSE(c.expansive);
  EXPECT_EQ(c.method, "roots");
}

TEST(Expansiveness, RootModuliOffCircle) {
  const auto c = expansiveness_certificate(P("1-u-u^2"), 64);
  EXPECT_TRUE(c.expansive);
  EXPECT_EQ(c.method, "roots");
  // x^2 + x - 1 = 0
  const double r1 = (-1.0 + std::sqrt(5.0)) / 2.0, r2 = (-1.0 - std::sqrt(5.0)) / 2.0;
  const auto roots = polynomial_roots({1.0, -1.0, -1.0});
  ASSERT_EQ(roots.size(), 2u);
  std::vector<double> moduli{std::abs(roots[0]), std::abs(roots[1])};
  std::sort(moduli.begin(), moduli.end());
  EXPECT_NEAR(moduli[0], std::abs(r1), 1e-12);
  EXPECT_NEAR(moduli[1], std::abs(r2), 1e-12);
}

TEST(Expansiveness, EveryLopsidedPolynomialUsesShortcut) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    const auto g = testgen::random_sandpile(rng, 1 + trial % 3);
    EXPECT_EQ(expansiveness_certificate(g, 8).method, "lopsided");
  }
}

TEST(Expansiveness, MultivariateGridIsHeuristic) {
  const auto ok = expansiveness_certificate(P("1+u1+u2+u1*u2+u1^-1"), 16);
  EXPECT_TRUE(ok.heuristic);
  EXPECT_EQ(ok.method, "grid");
  const auto bad = expansiveness_certificate(P("4-u1-u1^-1-u2-u2^-1"), 16);
  EXPECT_FALSE(bad.expansive);
}

TEST(Parse, Syntax) {
  const auto h = parse_poly("-2*u1^-1 + 5 - 2*u1");
  EXPECT_EQ(h.dim(), 1);
  EXPECT_EQ(h.coeff({-1}), -2);
  EXPECT_EQ(h.coeff({0}), 5);
  EXPECT_EQ(h.coeff({1}), -2);
  EXPECT_EQ(parse_poly("u1*u2 - 3*u2^2"), parse_poly("-3u2^2+u1u2"));
  EXPECT_EQ(parse_poly("2-u", 2).dim(), 2);
  EXPECT_EQ(parse_poly("u^2*u^-2"), LaurentPoly::constant(1, 1));
}

TEST(Parse, ErrorsCarryPosition) {
  try {
    parse_poly("2 - 3*x");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position, 6u);
  }
  EXPECT_THROW(parse_poly(""), ParseError);
  EXPECT_THROW(parse_poly("2 3"), ParseError);
  EXPECT_THROW(parse_poly("u^"), ParseError);
  EXPECT_THROW(parse_poly("2 +"), ParseError);
  EXPECT_THROW(parse_poly("u0"), ParseError);
}

TEST(Parse, RoundTripThroughToString) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = testgen::random_poly(rng, 1 + trial % 3);
    EXPECT_EQ(parse_poly(to_string(p), p.dim()), p) << to_string(p);
  }
  EXPECT_EQ(to_string(P("-2*u1^-1 + 5 - 2*u1")), "-2*u1^-1 + 5 - 2*u1");
}

TEST(Divide, ExactQuotients) {
  const auto q = divide_univariate(P("-u^-2+11-u^2"), P("-u^-1+3+u"));
  ASSERT_TRUE(q);
  EXPECT_EQ(*q, P("u^-1+3-u"));
  EXPECT_FALSE(divide_univariate(P("1+u"), P("2-u")));
  EXPECT_FALSE(divide_univariate(P("1+u"), P("2+2u")));
  EXPECT_TRUE(divide_univariate(P("2+2u"), P("1+u")));
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = testgen::random_poly(rng, 1), b = testgen::random_poly(rng, 1);
    const auto q2 = divide_univariate(mul(a, b), b);
    ASSERT_TRUE(q2);
    EXPECT_EQ(*q2, a);
  }
}
