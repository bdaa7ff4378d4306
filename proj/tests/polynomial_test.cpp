#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace nonint;
using namespace nonint::testing;

namespace {

Poly random_poly(Gen& g, int max_degree) {
  std::vector<FieldElement> c;
  const int deg = static_cast<int>(g.integer(0, max_degree));
  for (int k = 0; k <= deg; ++k) {
    c.push_back(g.coin() ? FieldElement(g.rational(9, 5)) : FieldElement(g.gaussian()));
  }
  return Poly(c);
}

}  // namespace

TEST(Polynomial, GcdExample) {
  const Poly z = Z();
  const Poly one(F(1));
  EXPECT_EQ(gcd(z * z - one, z - one), z - one);
}

TEST(Polynomial, DivisionIdentity) {
  Gen g(21);
  for (int k = 0; k < 100; ++k) {
    const Poly a = random_poly(g, 7);
    Poly b = random_poly(g, 4);
    if (b.is_zero()) continue;
    const auto [q, r] = divmod(a, b);
    EXPECT_EQ(q * b + r, a);
    EXPECT_LT(r.degree(), b.degree() == 0 ? 0 : b.degree());
  }
}

TEST(Polynomial, GcdDividesBothAndIsMonic) {
  Gen g(22);
  for (int k = 0; k < 60; ++k) {
    const Poly common = random_poly(g, 2);
    const Poly a = random_poly(g, 3) * common;
    const Poly b = random_poly(g, 3) * common;
    if (a.is_zero() || b.is_zero()) continue;
    const Poly d = gcd(a, b);
    EXPECT_TRUE((a % d).is_zero());
    EXPECT_TRUE((b % d).is_zero());
    EXPECT_EQ(d.leading(), F(1));
    if (!common.is_zero()) EXPECT_GE(d.degree(), common.degree());
  }
}

TEST(Polynomial, EvaluationIsARingHomomorphism) {
  Gen g(23);
  for (int k = 0; k < 100; ++k) {
    const Poly a = random_poly(g, 5), b = random_poly(g, 5);
    const FieldElement x(g.gaussian());
    EXPECT_EQ((a * b)(x), a(x) * b(x));
    EXPECT_EQ((a + b)(x), a(x) + b(x));
  }
}

TEST(Polynomial, DerivativeLeibniz) {
  Gen g(24);
  for (int k = 0; k < 100; ++k) {
    const Poly a = random_poly(g, 5), b = random_poly(g, 5);
    EXPECT_EQ((a * b).derivative(), a.derivative() * b + a * b.derivative());
  }
}

TEST(Polynomial, TaylorCoefficientsReconstruct) {
  Gen g(25);
  for (int k = 0; k < 50; ++k) {
    const Poly a = random_poly(g, 6);
    const FieldElement c(g.gaussian());
    const auto t = a.taylor_coefficients(c, static_cast<std::size_t>(std::max(a.degree(), 0)) + 1);
    Poly back;
    const Poly shift = Poly::linear_factor(c);
    for (std::size_t j = 0; j < t.size(); ++j) back = back + Poly(t[j]) * shift.pow(static_cast<unsigned>(j));
    EXPECT_EQ(back, a);
  }
}

TEST(Polynomial, SquarefreeDecomposition) {
  const Poly z = Z();
  const Poly one(F(1));
  const Poly p = (z - one) * (z + one).pow(2) * (z * z + one).pow(3);
  const auto parts = squarefree_decomposition(p);
  ASSERT_EQ(parts.size(), 3u);
  EXPECT_EQ(parts[0].monic(), (z - one));
  EXPECT_EQ(parts[1].monic(), (z + one));
  EXPECT_EQ(parts[2].monic(), z * z + one);
}

TEST(Polynomial, RootMultiplicity) {
  const Poly z = Z();
  const FieldElement i = FieldElement::i_unit();
  const Poly p = (z - Poly(i)).pow(3) * (z + Poly(F(2)));
  EXPECT_EQ(root_multiplicity(p, i), 3);
  EXPECT_EQ(root_multiplicity(p, F(-2)), 1);
  EXPECT_EQ(root_multiplicity(p, F(0)), 0);
}

TEST(Polynomial, CoefficientsOverTheExtension) {
  const FieldElement s = adjoin_sqrt(FieldElement(GaussianRational(Q(2), Q(1))));
  const Poly z = Z();
  const Poly p = (z - Poly(s)) * (z + Poly(s));
  EXPECT_EQ(p, z * z - Poly(FieldElement(GaussianRational(Q(2), Q(1)))));
  EXPECT_EQ(p(s), F(0));
}
