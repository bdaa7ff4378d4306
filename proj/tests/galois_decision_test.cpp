#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace nonint;
using namespace nonint::testing;

namespace {

std::vector<bool> mask_flips(int mask) {
  return {(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0, (mask & 8) != 0};
}

Poly pair_product(const ProblemInstance& inst) {
  const Poly z = Z();
  return (z * z - Poly(inst.lambda_squared())) * (z * z - Poly(inst.eta_squared()));
}

Poly kappa_factor(const ProblemInstance& inst) {
  const Poly z = Z();
  return z * z - Poly(inst.kappa_squared());
}

}  // namespace

TEST(GaloisDecision, InverseSquarePotentialAdmitsAProductSolution) {
  const Poly z = Z();
  const RatFunc r(Poly(F(3, 4)), z * z);
  const auto recs = singular_points(r);
  EXPECT_FALSE(case3_exclusion(recs).excluded);
  const auto candidates = enumerate_product_candidates(recs);
  bool found = false;
  for (auto c : candidates) {
    if (c.local_orders == std::vector<int>{1} && c.infinity_degree == 1) {
      EXPECT_EQ(c.poly_degree, 0);
      evaluate_product_candidate(c, recs, r);
      EXPECT_EQ(c.base, RatFunc(z));
      ASSERT_TRUE(c.residual.has_value());
      EXPECT_TRUE(c.residual->is_zero());
      EXPECT_EQ(c.solution_dimension, 1u);
      EXPECT_TRUE(c.survives());
      found = true;
    }
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(unique_exponential_rule(recs), ExponentialRule::RationalPowerPossible);
}

TEST(GaloisDecision, ZeroPotential) {
  const auto recs = singular_points(RatFunc());
  EXPECT_FALSE(case3_exclusion(recs).excluded);
  EXPECT_EQ(unique_exponential_rule(recs), ExponentialRule::RationalPowerPossible);
  EXPECT_THROW(case2_E_sets(recs), UnsupportedOrder);
}

TEST(GaloisDecision, SymmetricSquareResidualLeadingCoefficients) {
  // (v''' - 4 r v' - 2 r' v) * 4 (z-q)^3 Q K^2 for v = Q/(z-q) is a polynomial whose top coefficients are
  // -64 q mu^2 (4 mu + 1)/alpha^2 and 128 q^2 mu^2 (4 mu - 3)/alpha^2.
  auto check = [](const ProblemInstance& inst) -> Poly {
    const FieldElement q(inst.q()), mu(inst.mu), al(inst.alpha);
    const Poly Qp = pair_product(inst), K = kappa_factor(inst);
    const Poly lin = Poly::linear_factor(q);
    const RatFunc residual = symmetric_square_residual(RatFunc(Qp, lin), normal_form(inst).r);
    const RatFunc scaled = residual * RatFunc(Poly(F(4)) * lin.pow(3) * Qp * K * K);
    EXPECT_TRUE(scaled.is_polynomial()) << inst.label();
    const Poly P = scaled.numerator();
    EXPECT_EQ(P.degree(), 6) << inst.label();
    EXPECT_EQ(P.leading(), F(-64) * q * mu * mu / (al * al) * (F(4) * mu + F(1))) << inst.label();
    EXPECT_EQ(P.coefficient(5), F(128) * q * q * mu * mu / (al * al) * (F(4) * mu - F(3))) << inst.label();
    return P;
  };
  const Poly P = check(s2_tan_default());
  EXPECT_EQ(P.leading(), F(-24));
  EXPECT_EQ(P.coefficient(5), F(-8));
  Gen g(61);
  for (int k = 0; k < 24; ++k) check(g.instance(Space::Sphere, Potential::TanFamily));
}

TEST(GaloisDecision, CscCaseTwoObstruction) {
  // Theta = (-2/(z-q) + Q'/Q + 4z/K)/2;  Xi * (z-q)^2 Q K^2 has top coefficients
  // -12 q, 24 q^2, 12 q kappa^2, -48 q^2 kappa^2.
  auto check = [](const ProblemInstance& inst) -> Poly {
    const FieldElement q(inst.q()), k2 = inst.kappa_squared();
    const Poly Qp = pair_product(inst), K = kappa_factor(inst);
    const Poly lin = Poly::linear_factor(q);
    const RatFunc half(F(1, 2));
    const RatFunc theta = half * (RatFunc(Poly(F(-2)), lin) + RatFunc(Qp.derivative(), Qp) +
                                  RatFunc(Poly(F(4)) * Z(), K));
    const RatFunc r = normal_form(inst).r;
    const RatFunc t1 = theta.derivative(), t2 = t1.derivative();
    const RatFunc xi = t2 + RatFunc(F(3)) * theta * t1 + theta * theta * theta - RatFunc(F(4)) * r * theta -
                       RatFunc(F(2)) * r.derivative();
    const RatFunc scaled = xi * RatFunc(lin.pow(2) * Qp * K * K);
    EXPECT_TRUE(scaled.is_polynomial()) << inst.label();
    const Poly N = scaled.numerator();
    EXPECT_EQ(N.degree(), 6) << inst.label();
    EXPECT_EQ(N.coefficient(6), F(-12) * q) << inst.label();
    EXPECT_EQ(N.coefficient(5), F(24) * q * q) << inst.label();
    EXPECT_EQ(N.coefficient(4), F(12) * q * k2) << inst.label();
    EXPECT_EQ(N.coefficient(3), F(-48) * q * q * k2) << inst.label();
    return N;
  };
  const Poly N = check(s2_csc_default());
  EXPECT_EQ(N.coefficient(6), F(-6));
  EXPECT_EQ(N.coefficient(5), F(6));
  EXPECT_EQ(N.coefficient(4), F(-3));
  EXPECT_EQ(N.coefficient(3), F(6));
  Gen g(62);
  for (int k = 0; k < 24; ++k) check(g.instance(Space::Sphere, Potential::CscFamily));
}

TEST(GaloisDecision, ESetsOfTheSphereFamilies) {
  const std::vector<std::vector<int>> tan{{-2, 2, 6}, {2}, {2}, {2}, {2}, {4}, {4}, {-2, 2, 6}};
  const std::vector<std::vector<int>> csc{{-2, 2, 6}, {1, 2, 3}, {1, 2, 3}, {1, 2, 3}, {1, 2, 3}, {2}, {2}, {-2, 2, 6}};
  Gen g(63);
  for (int k = 0; k < 20; ++k) {
    const bool is_tan = k % 2 == 0;
    const ProblemInstance inst = g.instance(Space::Sphere, is_tan ? Potential::TanFamily : Potential::CscFamily,
                                            [](const ProblemInstance& i) { return sgn(i.epsilon) < 0; });
    const auto sets = case2_E_sets(singular_points(normal_form(inst)));
    ASSERT_EQ(sets.size(), 8u);
    for (std::size_t j = 0; j < sets.size(); ++j) {
      EXPECT_EQ(sets[j].values, (is_tan ? tan : csc)[j]) << inst.label() << " " << sets[j].label;
    }
  }
}

TEST(GaloisDecision, DefaultInstancesAreCertified) {
  for (const auto& inst : {s2_tan_default(), s2_csc_default(),
                           make(Space::Hyperbolic, Potential::TanFamily, Q(1, 2), Q(1), Q(1), Q(2)),
                           make(Space::Hyperbolic, Potential::CscFamily, Q(1, 2), Q(1), Q(1), Q(2))}) {
    const GaloisCertificate cert = decide(inst);
    EXPECT_EQ(cert.verdict, Verdict::NonAbelianCertified) << inst.label() << ": " << cert.reason;
    ASSERT_TRUE(cert.case3.has_value());
    EXPECT_TRUE(cert.case3->excluded);
    EXPECT_EQ(cert.exponential_rule, ExponentialRule::NonAbelianForced);
    for (const auto& c : cert.product_candidates) EXPECT_FALSE(c.survives());
    for (const auto& c : cert.case2) {
      EXPECT_TRUE(c.error.empty());
      EXPECT_EQ(c.solution_dimension, 0u);
    }
  }
}

TEST(GaloisDecision, SphereTanSweepIsCertified) {
  Gen g(64);
  for (int k = 0; k < 20; ++k) {
    const ProblemInstance inst = g.instance(Space::Sphere, Potential::TanFamily);
    const GaloisCertificate cert = decide(inst);
    EXPECT_EQ(cert.verdict, Verdict::NonAbelianCertified) << inst.label() << ": " << cert.reason;
  }
}

TEST(GaloisDecision, SphereCscWithNegativeEpsilonIsCertified) {
  Gen g(65);
  for (int k = 0; k < 20; ++k) {
    const ProblemInstance inst = g.instance(Space::Sphere, Potential::CscFamily, [](const ProblemInstance& i) {
      return sgn(i.mu) > 0 && sgn(i.alpha) > 0 && sgn(i.epsilon) < 0;
    });
    const GaloisCertificate cert = decide(inst);
    EXPECT_EQ(cert.verdict, Verdict::NonAbelianCertified) << inst.label() << ": " << cert.reason;
  }
}

TEST(GaloisDecision, SecondMassVanishingIsDegenerate) {
  for (Potential v : {Potential::TanFamily, Potential::CscFamily}) {
    for (Space s : {Space::Sphere, Space::Hyperbolic}) {
      const GaloisCertificate cert = decide(make(s, v, Q(1), Q(1), Q(1), Q(2)));
      EXPECT_EQ(cert.verdict, Verdict::DegenerateIntegrableLimit);
    }
  }
}

TEST(GaloisDecision, VerdictIsInvariantUnderBranchFlips) {
  Gen g(66);
  for (int k = 0; k < 4; ++k) {
    const ProblemInstance inst = g.instance(k % 2 == 0 ? Space::Sphere : Space::Hyperbolic,
                                            k < 2 ? Potential::TanFamily : Potential::CscFamily);
    const Verdict base = decide(inst).verdict;
    for (int mask = 1; mask < 16; ++mask) {
      const GaloisCertificate cert = decide(inst, mask_flips(mask));
      EXPECT_EQ(cert.verdict, base) << inst.label() << " mask " << mask;
    }
  }
}

TEST(GaloisDecision, RealityFailureIsInconclusive) {
  // S2/csc with eps > 0: the coefficients at +-kappa are real, so nothing is certified.
  const GaloisCertificate cert = decide(make(Space::Sphere, Potential::CscFamily, Q(1, 2), Q(1), Q(1), Q(1, 2)));
  EXPECT_EQ(cert.verdict, Verdict::Inconclusive);
  ASSERT_TRUE(cert.reality.has_value());
  EXPECT_FALSE(cert.reality->condition_holds);
}

TEST(GaloisDecision, CollisionIsInconclusive) {
  const GaloisCertificate cert = decide(make(Space::Sphere, Potential::CscFamily, Q(1, 2), Q(1), Q(1), Q(-1)));
  EXPECT_EQ(cert.verdict, Verdict::Inconclusive);
  EXPECT_FALSE(cert.r.has_value());
  EXPECT_NE(cert.reason.find("coincident"), std::string::npos);
}

TEST(GaloisDecision, KernelDimension) {
  const Poly z = Z();
  // 1, z, 1 + z are dependent; 1, z, z^2 are not
  EXPECT_EQ(kernel_dimension({RatFunc(F(1)), RatFunc(z), RatFunc(z + Poly(F(1)))}), 1u);
  EXPECT_EQ(kernel_dimension({RatFunc(F(1)), RatFunc(z), RatFunc(z * z)}), 0u);
  EXPECT_EQ(kernel_dimension({RatFunc(Poly(F(1)), z), RatFunc(Poly(F(2)), z)}), 1u);
}
