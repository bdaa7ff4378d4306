#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace nonint;
using namespace nonint::testing;

namespace {

Poly frozen(const std::vector<std::string>& coeffs) {
  std::vector<FieldElement> c;
  for (const auto& s : coeffs) c.emplace_back(parse_big_rational(s));
  return Poly(c);
}

struct FrozenR {
  ProblemInstance inst;
  std::vector<std::string> num, den;  // low to high, monic denominator
};

// Normal-form coefficients computed independently with a computer-algebra system.
const std::vector<FrozenR>& frozen_normal_forms() {
  static const std::vector<FrozenR> table{
      {make(Space::Sphere, Potential::TanFamily, Q(1, 2), Q(1), Q(1), Q(2)),
       {"-199/8", "-25", "891/16", "48", "-121/2", "-30", "61/2", "8", "-7", "-1", "3/4"},
       {"-25/2", "50", "-95/4", "-105", "82", "92", "-163/2", "-42", "79/2", "10", "-39/4", "-1", "1"}},
      {make(Space::Sphere, Potential::CscFamily, Q(1, 2), Q(1), Q(1), Q(-1, 2)),
       {"15/256", "3/16", "-47/64", "13/8", "-79/64", "5/4", "-31/8", "3/2", "-27/16", "0", "9/4", "0", "3/4"},
       {"9/256", "-9/64", "3/16", "-3/16", "-5/64", "17/16", "-23/16", "3/2", "-17/16", "-7/4", "5/2", "-3", "13/4",
        "-1", "1"}},
      {make(Space::Hyperbolic, Potential::TanFamily, Q(1, 2), Q(1), Q(1), Q(2)),
       {"-73/8", "-9", "541/16", "16", "-71/2", "-18", "43/2", "8", "-7", "-1", "3/4"},
       {"-9/2", "18", "-15/4", "-57", "40", "68", "-117/2", "-38", "71/2", "10", "-39/4", "-1", "1"}},
      {make(Space::Hyperbolic, Potential::CscFamily, Q(1, 2), Q(1), Q(1), Q(2)),
       {"1245/16", "-5", "-797/4", "-1/2", "3685/16", "5", "-577/4", "-3/2", "99/2", "0", "-9", "0", "3/4"},
       {"25", "-100", "35", "260", "-751/4", "-289", "245", "176", "-321/2", "-62", "59", "12", "-47/4", "-1", "1"}},
  };
  return table;
}

const SingularPointRecord& record(const std::vector<SingularPointRecord>& recs, const std::string& label) {
  for (const auto& r : recs) {
    if (r.label == label) return r;
  }
  throw std::runtime_error("no record " + label);
}

const Space kSpaces[] = {Space::Sphere, Space::Hyperbolic};
const Potential kPotentials[] = {Potential::TanFamily, Potential::CscFamily};

}  // namespace

TEST(NveReduction, NormalFormMatchesFrozenOracle) {
  for (const auto& f : frozen_normal_forms()) {
    const RatFunc r = normal_form(f.inst).r;
    EXPECT_EQ(r, RatFunc(frozen(f.num), frozen(f.den))) << f.inst.label();
  }
}

TEST(NveReduction, CouplingCoefficientExample) {
  const Poly z = Z();
  const FirstOrderNVE sys = build_first_order(s2_tan_default());
  const Poly g = Poly(F(2)) - z * z;
  EXPECT_EQ(sys.C, RatFunc(z - Poly(F(1, 2)), Poly(F(1)) + g * g));
  EXPECT_FALSE(sys.radical_coupling);
}

TEST(NveReduction, CscDiagonalCoefficientExample) {
  const Poly z = Z();
  const FirstOrderNVE sys = build_first_order(make(Space::Sphere, Potential::CscFamily, Q(1, 2), Q(1), Q(1), Q(-1)),
                                              /*allow_coincident=*/true);
  EXPECT_EQ(sys.A, RatFunc(Poly(F(1)), z * z + Poly(F(1))));
  EXPECT_TRUE(sys.radical_coupling);
}

TEST(NveReduction, SingularPointsOfTheFourFamilies) {
  const ProblemInstance s2tan = s2_tan_default();
  EXPECT_EQ(s2tan.q(), Q(1, 2));
  EXPECT_EQ(s2tan.lambda_squared(), FieldElement(GaussianRational(Q(2), Q(1))));
  EXPECT_EQ(s2tan.eta_squared(), FieldElement(GaussianRational(Q(2), Q(-1))));
  EXPECT_EQ(s2tan.kappa_squared(), F(2));

  const ProblemInstance s2csc = s2_csc_default();
  EXPECT_EQ(s2csc.lambda_squared(), F(1, 2));
  EXPECT_EQ(s2csc.eta_squared(), F(-3, 2));
  EXPECT_EQ(s2csc.kappa_squared(), F(-1, 2));

  const ProblemInstance h2tan = make(Space::Hyperbolic, Potential::TanFamily, Q(1, 2), Q(1), Q(1), Q(2));
  EXPECT_EQ(h2tan.lambda_squared(), F(3));
  EXPECT_EQ(h2tan.eta_squared(), F(1));

  const ProblemInstance h2csc = make(Space::Hyperbolic, Potential::CscFamily, Q(1, 2), Q(1), Q(1), Q(2));
  EXPECT_EQ(h2csc.lambda_squared(), FieldElement(GaussianRational(Q(2), Q(1))));
  EXPECT_EQ(h2csc.eta_squared(), FieldElement(GaussianRational(Q(2), Q(-1))));
}

TEST(NveReduction, PolesAreRegularAndConfinedToTheBasis) {
  Gen g(41);
  for (Space s : kSpaces) {
    for (Potential v : kPotentials) {
      for (int k = 0; k < 10; ++k) {
        const ProblemInstance inst = g.instance(s, v);
        const NormalFormODE ode = normal_form(inst);
        const auto recs = singular_points(ode);
        ASSERT_EQ(recs.size(), 8u) << inst.label();
        for (const auto& rec : recs) {
          if (rec.at_infinity) {
            EXPECT_EQ(rec.order, 2) << inst.label();
            EXPECT_EQ(rec.alpha, F(3, 4)) << inst.label();
          } else {
            EXPECT_LE(rec.order, 2) << inst.label() << " " << rec.label;
          }
        }
      }
    }
  }
}

TEST(NveReduction, ResidueSums) {
  // r = O(z^-2) at infinity: the residues cancel and sum(alpha + beta z) is the z^-2 coefficient there.
  Gen g(42);
  for (Space s : kSpaces) {
    for (Potential v : kPotentials) {
      for (int k = 0; k < 8; ++k) {
        const ProblemInstance inst = g.instance(s, v);
        const auto recs = singular_points(normal_form(inst));
        FieldElement beta_sum, moment;
        for (const auto& rec : recs) {
          if (rec.at_infinity) continue;
          beta_sum += rec.beta;
          moment += rec.alpha + rec.beta * rec.location;
        }
        EXPECT_EQ(beta_sum, F(0)) << inst.label();
        EXPECT_EQ(moment, F(3, 4)) << inst.label();
      }
    }
  }
}

TEST(NveReduction, TanClosedFormsOnTheSphere) {
  Gen g(43);
  for (int k = 0; k < 24; ++k) {
    const ProblemInstance inst = g.instance(Space::Sphere, Potential::TanFamily);
    const auto recs = singular_points(normal_form(inst));
    const FieldElement mu(inst.mu), q(inst.q()), one(1), four(4);
    const FieldElement l2 = inst.lambda_squared(), e2 = inst.eta_squared();
    const FieldElement l = adjoin_sqrt(l2), e = adjoin_sqrt(e2), kap = adjoin_sqrt(inst.kappa_squared());
    const FieldElement m1 = mu - one, p1 = mu + one;

    EXPECT_EQ(record(recs, "z1").alpha, F(3, 4));
    EXPECT_EQ(record(recs, "z1").beta, -four * q / (FieldElement(2) * q * q - l2 - e2));

    EXPECT_EQ(record(recs, "z2").location, l);
    EXPECT_EQ(record(recs, "z2").alpha, m1 / (four * l2) * (q - l) * (q * m1 - l * p1));
    EXPECT_EQ(record(recs, "z3").alpha, m1 / (four * l2) * (q + l) * (q * m1 + l * p1));
    EXPECT_EQ(record(recs, "z4").alpha, m1 / (four * e2) * (q - e) * (q * m1 - e * p1));
    EXPECT_EQ(record(recs, "z5").alpha, m1 / (four * e2) * (q + e) * (q * m1 + e * p1));

    const FieldElement three(3), five(5), eight(8);
    const FieldElement l3 = l2 * l, e3 = e2 * e, qq = q * q;
    EXPECT_EQ(record(recs, "z2").beta, m1 / (four * (l2 - e2) * l3) *
                                           (-p1 * l2 * e2 + m1 * e2 * qq - three * p1 * l2 * l2 -
                                            five * m1 * qq * l2 + eight * l3 * q * mu));
    EXPECT_EQ(record(recs, "z3").beta, m1 / (four * (l2 - e2) * l3) *
                                           (p1 * l2 * e2 - m1 * e2 * qq + three * p1 * l2 * l2 +
                                            five * m1 * qq * l2 + eight * l3 * q * mu));
    EXPECT_EQ(record(recs, "z4").beta, m1 / (four * (l2 - e2) * e3) *
                                           (p1 * l2 * e2 - m1 * l2 * qq + three * p1 * e2 * e2 +
                                            five * m1 * qq * e2 - eight * e3 * q * mu));
    EXPECT_EQ(record(recs, "z5").beta, m1 / (four * (l2 - e2) * e3) *
                                           (-p1 * l2 * e2 + m1 * l2 * qq - three * p1 * e2 * e2 -
                                            five * m1 * qq * e2 - eight * e3 * q * mu));

    EXPECT_EQ(record(recs, "z6").order, 1);
    EXPECT_EQ(record(recs, "z6").beta, q / (kap * (q - kap)));
    EXPECT_EQ(record(recs, "z7").beta, -q / (kap * (q + kap)));
  }
}

TEST(NveReduction, CscClosedFormsOnTheSphere) {
  Gen g(44);
  for (int k = 0; k < 24; ++k) {
    const ProblemInstance inst = g.instance(Space::Sphere, Potential::CscFamily);
    const auto recs = singular_points(normal_form(inst));
    const FieldElement mu(inst.mu), q(inst.q()), one(1);
    const FieldElement kap = adjoin_sqrt(inst.kappa_squared());
    for (const char* label : {"z2", "z3", "z4", "z5"}) {
      EXPECT_EQ(record(recs, label).alpha, F(-3, 16)) << inst.label() << " " << label;
    }
    EXPECT_EQ(record(recs, "z6").location, kap);
    EXPECT_EQ(record(recs, "z6").alpha, F(3, 4) + (mu - one) * (one - q / kap) * (one + mu + (one - mu) * q / kap));
    EXPECT_EQ(record(recs, "z7").alpha, F(3, 4) + (mu - one) * (one + q / kap) * (one + mu - (one - mu) * q / kap));
  }
}

TEST(NveReduction, SecondMassVanishingKillsTanAlphas) {
  Gen g(45);
  for (int k = 0; k < 20; ++k) {
    ProblemInstance inst = g.instance(Space::Sphere, Potential::TanFamily);
    inst.mu = 1;
    if (!coincidences(inst).empty()) continue;
    const RatFunc r = normal_form(inst).r;
    // the poles at +-lambda, +-eta drop to order <= 1 (or disappear)
    for (const auto& sq : {inst.lambda_squared(), inst.eta_squared()}) {
      const FieldElement root = adjoin_sqrt(sq);
      for (const auto& c : {root, -root}) {
        EXPECT_LE(root_multiplicity(r.denominator(), c), 1) << inst.label();
      }
    }
  }
}

TEST(NveReduction, BranchFlipsPermuteRecords) {
  Gen g(46);
  for (Potential v : kPotentials) {
    for (int k = 0; k < 5; ++k) {
      const ProblemInstance inst = g.instance(Space::Sphere, v);
      const NormalFormODE ode = normal_form(inst);
      const auto plain = singular_points(ode);
      const auto flipped = singular_points(ode, {false, true, true, true});
      ASSERT_EQ(plain.size(), flipped.size());
      for (std::size_t j = 1; j + 1 < plain.size(); j += 2) {
        EXPECT_EQ(plain[j].location, flipped[j + 1].location);
        EXPECT_EQ(plain[j].alpha, flipped[j + 1].alpha);
        EXPECT_EQ(plain[j].beta, flipped[j + 1].beta);
      }
    }
  }
}

TEST(NveReduction, ParameterValidation) {
  EXPECT_THROW(normal_form(make(Space::Sphere, Potential::TanFamily, Q(0), Q(1), Q(1), Q(2))), InvalidParameters);
  EXPECT_THROW(normal_form(make(Space::Sphere, Potential::TanFamily, Q(1, 2), Q(0), Q(1), Q(2))), InvalidParameters);
  EXPECT_THROW(normal_form(make(Space::Sphere, Potential::TanFamily, Q(1, 2), Q(1), Q(0), Q(2))), InvalidParameters);
  // kappa = 0 collides the pair +-kappa
  EXPECT_THROW(normal_form(make(Space::Sphere, Potential::TanFamily, Q(1, 2), Q(1), Q(1), Q(0))),
               CoincidentSingularities);
  // csc with eps = -1 puts lambda at 0 = kappa
  EXPECT_FALSE(coincidences(make(Space::Sphere, Potential::CscFamily, Q(1, 2), Q(1), Q(1), Q(-1))).empty());
}

TEST(NveReduction, EnergyParametrization) {
  Gen g(47);
  for (int k = 0; k < 50; ++k) {
    const ProblemInstance inst = g.instance(Space::Sphere, Potential::TanFamily);
    const ProblemInstance back =
        ProblemInstance::from_energy(inst.space, inst.potential, inst.mu, inst.p, inst.alpha, inst.energy());
    EXPECT_EQ(back.epsilon, inst.epsilon);
  }
}

TEST(NveReduction, SubstitutionChainIsRecorded) {
  const NormalFormODE ode = normal_form(s2_csc_default());
  ASSERT_EQ(ode.substitution_record.size(), 3u);
  EXPECT_TRUE(ode.radical_coupling);
  EXPECT_NE(ode.substitution_record[2].find("f^(1/4)"), std::string::npos);
}
