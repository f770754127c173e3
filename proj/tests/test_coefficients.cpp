#include <cmath>

#include <gtest/gtest.h>

#include "dampstring/coefficients.hpp"
#include "dampstring/random_coefficients.hpp"

using namespace dampstring;

TEST(Coefficients, ParseConstant) {
  CoefficientSpec s = parse_coefficient_spec("const 1");
  ASSERT_EQ(s.pieces.size(), 1u);
  EXPECT_EQ(s.pieces[0].a, 0.0);
  EXPECT_EQ(s.pieces[0].b, 1.0);
  EXPECT_EQ(s.pieces[0].num, std::vector<double>{1.0});
  EXPECT_TRUE(s.is_polynomial());
}

TEST(Coefficients, ParsePolynomial) {
  CoefficientSpec s = parse_coefficient_spec("poly 1 1");
  EXPECT_DOUBLE_EQ(sample(s, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(sample(s, 0.5), 1.5);
  EXPECT_DOUBLE_EQ(sample(s, 1.0), 2.0);
}

TEST(Coefficients, TwoPieceDensityUsesRightLimit) {
  CoefficientSpec s =
      parse_coefficient_spec("piece 0 0.5: const 2; piece 0.5 1: const 1", CoefficientKind::Density);
  EXPECT_NO_THROW(validate(s));
  ASSERT_EQ(s.pieces.size(), 2u);
  EXPECT_DOUBLE_EQ(sample(s, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(sample(s, 0.5), 1.0);
  EXPECT_EQ(s.breakpoints(), (std::vector<double>{0.0, 0.5, 1.0}));
}

TEST(Coefficients, SampleNearRightEnd) {
  EXPECT_DOUBLE_EQ(sample(parse_coefficient_spec("const 1"), 0.999), 1.0);
}

TEST(Coefficients, RejectsMalformedText) {
  EXPECT_THROW(parse_coefficient_spec("konst 1"), CoefficientError);
  EXPECT_THROW(parse_coefficient_spec("poly"), CoefficientError);
  EXPECT_THROW(parse_coefficient_spec("const abc"), CoefficientError);
  EXPECT_THROW(parse_coefficient_spec("piece 0 0.4: const 1; piece 0.5 1: const 1"), CoefficientError);
}

TEST(Coefficients, DensityMustBePositive) {
  EXPECT_THROW(parse_coefficient_spec("const 0", CoefficientKind::Density), CoefficientError);
  EXPECT_THROW(parse_coefficient_spec("poly 1 -2", CoefficientKind::Density), CoefficientError);
  EXPECT_NO_THROW(parse_coefficient_spec("poly 1 -2", CoefficientKind::Damping));
}

TEST(Coefficients, IntegrateProduct) {
  CoefficientSpec x = polynomial({0.0, 1.0});
  CoefficientSpec one_minus_x = polynomial({1.0, -1.0});
  CoefficientSpec one = constant(1.0);
  EXPECT_NEAR(integrate_product({x, one_minus_x, one}, 0.0, 1.0), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(integrate_product({polynomial({1.0, 1.0})}, 0.0, 1.0), 1.5, 1e-15);
  EXPECT_NEAR(integrate_product({x, x}, 0.0, 1.0), 1.0 / 3.0, 1e-15);
}

TEST(Coefficients, IntegrateProductAcrossPieces) {
  CoefficientSpec s = parse_coefficient_spec("piece 0 0.5: const 2; piece 0.5 1: const 1");
  EXPECT_NEAR(integrate_product({s, s}, 0.0, 1.0), 0.5 * 4.0 + 0.5 * 1.0, 1e-15);
  EXPECT_NEAR(integrate_product({s}, 0.25, 0.75), 0.25 * 2.0 + 0.25 * 1.0, 1e-15);
}

TEST(Coefficients, VariableSpeedIdentity) {
  auto [r, a] = reduce_variable_speed(constant(1.0), constant(1.0), constant(1.0));
  for (double x : {0.0, 0.3, 1.0}) {
    EXPECT_DOUBLE_EQ(sample(r, x), 1.0);
    EXPECT_DOUBLE_EQ(sample(a, x), 1.0);
  }
}

TEST(Coefficients, VariableSpeedConstant) {
  auto [r, a] = reduce_variable_speed(constant(1.0), constant(0.0), constant(2.0));
  EXPECT_DOUBLE_EQ(sample(r, 0.4), 0.25);
  EXPECT_DOUBLE_EQ(sample(a, 0.4), 0.0);
  auto [r2, a2] = reduce_variable_speed(polynomial({1.0, 1.0}), constant(1.0), constant(2.0));
  for (double x : {0.0, 0.5, 1.0}) {
    EXPECT_DOUBLE_EQ(sample(r2, x), (1.0 + x) / 4.0);
    EXPECT_DOUBLE_EQ(sample(a2, x), 0.25);
  }
}

TEST(Coefficients, VariableSpeedRational) {
  CoefficientSpec c = polynomial({1.0, 1.0});
  auto [r, a] = reduce_variable_speed(constant(1.0), constant(3.0), c);
  for (double x : {0.0, 0.2, 0.7, 1.0}) {
    EXPECT_NEAR(sample(r, x), 1.0 / ((1 + x) * (1 + x)), 1e-14);
    EXPECT_NEAR(sample(a, x), 3.0 / ((1 + x) * (1 + x)), 1e-14);
  }
}

TEST(Coefficients, TextRoundTrip) {
  for (const char* t : {"const 1", "poly 1 0.5 -0.25", "piece 0 0.5: const 2; piece 0.5 1: poly 1 1"}) {
    CoefficientSpec s = parse_coefficient_spec(t);
    CoefficientSpec back = parse_coefficient_spec(s.to_text());
    for (double x = 0.0; x <= 1.0; x += 0.05) EXPECT_DOUBLE_EQ(sample(s, x), sample(back, x));
  }
}

TEST(Coefficients, PolynomialHelpers) {
  std::vector<double> p{1.0, 2.0}, q{0.0, 1.0, 3.0};
  std::vector<double> pq = poly_mul(p, q);
  for (double x : {-1.0, 0.3, 2.0}) EXPECT_NEAR(poly_eval(pq, x), poly_eval(p, x) * poly_eval(q, x), 1e-13);
  std::vector<double> P = poly_antiderivative(q);
  EXPECT_NEAR(poly_eval(P, 1.0) - poly_eval(P, 0.0), 0.5 + 1.0, 1e-15);
}

TEST(RandomCoefficients, BernsteinToMonomial) {
  // Bernstein basis on [0.2, 0.6] with coefficients (1, 3, 2).
  std::vector<double> m = bernstein_to_monomial({1.0, 3.0, 2.0}, 0.2, 0.6);
  for (double x : {0.2, 0.35, 0.6}) {
    double t = (x - 0.2) / 0.4;
    double ref = 1.0 * (1 - t) * (1 - t) + 3.0 * 2 * t * (1 - t) + 2.0 * t * t;
    EXPECT_NEAR(poly_eval(m, x), ref, 1e-13);
  }
}

TEST(RandomCoefficients, DrawsStayInRange) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto [rho, alpha] = random_coefficients(seed);
    EXPECT_NO_THROW(validate(rho));
    EXPECT_LE(rho.pieces.size(), 3u);
    for (double x = 0.0; x <= 1.0; x += 1.0 / 64) {
      EXPECT_GE(sample(rho, x), 0.5 - 1e-12);
      EXPECT_LE(sample(rho, x), 2.0 + 1e-12);
      EXPECT_GE(sample(alpha, x), -1.0 - 1e-12);
      EXPECT_LE(sample(alpha, x), 1.0 + 1e-12);
    }
  }
}

TEST(RandomCoefficients, Deterministic) {
  auto a = random_coefficients(7);
  auto b = random_coefficients(7);
  EXPECT_EQ(a.first.to_text(), b.first.to_text());
  EXPECT_EQ(a.second.to_text(), b.second.to_text());
  EXPECT_NE(a.first.to_text(), random_coefficients(8).first.to_text());
}
