#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace nonint;
using namespace nonint::testing;

namespace {

FieldElement gi(long re, long im) { return FieldElement(GaussianRational(Q(re), Q(im))); }

}  // namespace

TEST(FieldTower, ConjugateProductOfOnePlusI) { EXPECT_EQ(gi(1, 1) * gi(1, -1), F(2)); }

TEST(FieldTower, DefiningRelationOfAdjoinedRoot) {
  Gen g(11);
  for (int k = 0; k < 50; ++k) {
    const GaussianRational d = g.nonzero_gaussian();
    const FieldElement s = adjoin_sqrt(FieldElement(d));
    EXPECT_EQ(s * s, FieldElement(d));
  }
}

TEST(FieldTower, ProductOfLambdaAndEtaSquaresToFive) {
  const ProblemInstance inst = s2_tan_default();
  const FieldElement lambda = adjoin_sqrt(inst.lambda_squared());
  const FieldElement eta = adjoin_sqrt(inst.eta_squared());
  EXPECT_EQ(inst.lambda_squared(), gi(2, 1));
  EXPECT_EQ(inst.eta_squared(), gi(2, -1));
  const FieldElement le = lambda * eta;
  EXPECT_EQ(le * le, F(5));
}

TEST(FieldTower, IsReal) {
  EXPECT_TRUE(is_real(F(3, 4)));
  EXPECT_FALSE(is_real(FieldElement::i_unit()));
  EXPECT_TRUE(is_real(adjoin_sqrt(F(2))));
  EXPECT_FALSE(is_real(adjoin_sqrt(F(-2))));
  EXPECT_TRUE(is_real(FieldElement::i_unit() * adjoin_sqrt(F(-2))));
  // sqrt(2i) = 1 + i is not real, but (1 + i)(1 - i) is
  EXPECT_FALSE(is_real(adjoin_sqrt(gi(0, 2))));
}

TEST(FieldTower, IsRealAgreesWithConjugation) {
  Gen g(12);
  for (int k = 0; k < 200; ++k) {
    const GaussianRational d = g.non_square();
    const FieldElement x = g.over(d);
    EXPECT_EQ(is_real(x), x == x.conj()) << x;
  }
}

TEST(FieldTower, IsRationalNumber) {
  EXPECT_TRUE(is_rational_number(F(1, 2)));
  EXPECT_FALSE(is_rational_number(adjoin_sqrt(F(2))));
  // Delta_2 = sqrt(1 + 4 alpha_2) on the S2/tan default instance
  const auto records = singular_points(normal_form(s2_tan_default()));
  EXPECT_FALSE(is_rational_number(records[1].delta_squared));
  EXPECT_FALSE(rational_square_root(records[1].delta_squared).has_value());
}

TEST(FieldTower, AdjoinSqrtExamples) {
  EXPECT_EQ(adjoin_sqrt(F(4)), F(2));
  EXPECT_EQ(adjoin_sqrt(gi(0, 2)), gi(1, 1));
  const ProblemInstance inst = make(Space::Sphere, Potential::CscFamily, Q(1, 2), Q(1), Q(1), Q(-1));
  const FieldElement kappa = adjoin_sqrt(inst.kappa_squared());
  EXPECT_EQ(kappa * kappa, F(-1));
  EXPECT_EQ(kappa, FieldElement::i_unit());
}

TEST(FieldTower, PrincipalBranch) {
  Gen g(13);
  for (int k = 0; k < 200; ++k) {
    const GaussianRational w = g.nonzero_gaussian();
    const GaussianRational d = w * w;
    const auto root = gaussian_sqrt(d);
    ASSERT_TRUE(root.has_value());
    EXPECT_EQ(*root * *root, d);
    EXPECT_TRUE(sgn(root->re) > 0 || (sgn(root->re) == 0 && sgn(root->im) >= 0));
    // numerically the principal root of the complex square
    const auto c = std::sqrt(std::complex<long double>(FieldElement(d).to_complex()));
    EXPECT_NEAR(static_cast<double>(c.real()), static_cast<double>(FieldElement(*root).to_complex().real()), 1e-12);
    EXPECT_NEAR(static_cast<double>(c.imag()), static_cast<double>(FieldElement(*root).to_complex().imag()), 1e-12);
  }
}

TEST(FieldTower, AdjoinedRootIsPrincipalNumerically) {
  Gen g(14);
  for (int k = 0; k < 100; ++k) {
    const GaussianRational d = g.non_square();
    const auto exact = adjoin_sqrt(FieldElement(d)).to_complex();
    const auto numeric = std::sqrt(FieldElement(d).to_complex());
    EXPECT_NEAR(static_cast<double>(std::abs(exact - numeric)), 0.0, 1e-12);
  }
}

TEST(FieldTower, InverseProperty) {
  Gen g(15);
  for (int k = 0; k < 200; ++k) {
    const GaussianRational d = g.non_square();
    const FieldElement x = g.over(d);
    if (x.is_zero()) continue;
    EXPECT_EQ(x * x.inverse(), F(1)) << x;
    EXPECT_EQ(x / x, F(1));
  }
  EXPECT_THROW((void)F(0).inverse(), DivisionByZero);
}

TEST(FieldTower, ConjugationIsAFieldAutomorphism) {
  Gen g(16);
  for (int k = 0; k < 200; ++k) {
    const GaussianRational d = g.non_square();
    const FieldElement x = g.over(d), y = g.over(d);
    EXPECT_EQ((x * y).conj(), x.conj() * y.conj());
    EXPECT_EQ((x + y).conj(), x.conj() + y.conj());
    EXPECT_EQ(x.conj().conj(), x);
  }
}

TEST(FieldTower, RingAxiomsAndNumericEmbedding) {
  Gen g(17);
  for (int k = 0; k < 200; ++k) {
    const GaussianRational d = g.non_square();
    const FieldElement x = g.over(d), y = g.over(d), z = g.over(d);
    EXPECT_EQ(x * (y + z), x * y + x * z);
    EXPECT_EQ((x - y) + y, x);
    const auto num = x.to_complex() * y.to_complex();
    EXPECT_NEAR(static_cast<double>(std::abs((x * y).to_complex() - num)), 0.0,
                1e-9 * (1 + static_cast<double>(std::abs(num))));
  }
}

TEST(FieldTower, MixedLevelsNormalizeDown) {
  const FieldElement s = adjoin_sqrt(F(2));
  EXPECT_EQ((s * s).level(), FieldElement::Level::Q);
  EXPECT_EQ((gi(3, 0)).level(), FieldElement::Level::Q);
  EXPECT_EQ((s - s).level(), FieldElement::Level::Q);
}

TEST(FieldTower, DifferentRadicandsAreRejected) {
  const FieldElement a = adjoin_sqrt(F(2));
  const FieldElement b = adjoin_sqrt(F(3));
  EXPECT_THROW((void)(a + b), IncompatibleRadicands);
  EXPECT_THROW((void)adjoin_sqrt(a), TowerDepthExceeded);
}

TEST(FieldTower, RationalStringRoundTrip) {
  Gen g(18);
  for (int k = 0; k < 100; ++k) {
    const BigRational x = g.rational(100000, 9999);
    EXPECT_EQ(parse_big_rational(to_fraction_string(x)), x);
  }
  EXPECT_EQ(to_fraction_string(Q(-6, 4)), "-3/2");
  EXPECT_THROW(parse_big_rational("x"), std::invalid_argument);
}
