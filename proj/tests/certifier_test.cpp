#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace nonint;
using namespace nonint::testing;

TEST(Certifier, ExactDecimalParsing) {
  EXPECT_EQ(parse_exact_rational("0.1"), Q(1, 10));
  EXPECT_EQ(parse_exact_rational("2.5e-3"), Q(1, 400));
  EXPECT_EQ(parse_exact_rational("+4"), Q(4));
  EXPECT_EQ(parse_exact_rational("-0.125"), Q(-1, 8));
  EXPECT_EQ(parse_exact_rational("3/7"), Q(3, 7));
  EXPECT_EQ(parse_exact_rational("-6/4"), Q(-3, 2));
  EXPECT_EQ(parse_exact_rational("1E2"), Q(100));
  EXPECT_EQ(parse_exact_rational(".5"), Q(1, 2));
  EXPECT_EQ(parse_exact_rational(" 7 "), Q(7));
  for (const char* bad : {"", "abc", "1.2.3", "1e", "1e+x", "--1", "1/0", "e5", "0x10", "1/2/3"}) {
    EXPECT_ANY_THROW(parse_exact_rational(bad)) << "'" << bad << "'";
  }
}

TEST(Certifier, DecimalParsingIsNotBinary) {
  // 0.1 + 0.2 == 0.3 exactly, unlike binary floating point
  EXPECT_EQ(parse_exact_rational("0.1") + parse_exact_rational("0.2"), parse_exact_rational("0.3"));
  Gen g(91);
  for (int k = 0; k < 200; ++k) {
    const long n = g.integer(-999999, 999999);
    const int places = static_cast<int>(g.integer(0, 6));
    std::string digits = std::to_string(std::labs(n));
    while (static_cast<int>(digits.size()) <= places) digits.insert(0, "0");
    std::string text = digits;
    if (places > 0) text.insert(text.size() - places, ".");
    if (n < 0) text.insert(0, "-");
    BigRational expected(n);
    for (int j = 0; j < places; ++j) expected /= 10;
    expected.canonicalize();
    EXPECT_EQ(parse_exact_rational(text), expected) << text;
  }
}

TEST(Certifier, SweepRange) {
  const SweepRange r = SweepRange::parse("0.5:1:3");
  EXPECT_EQ(r.count, 3);
  EXPECT_EQ(r.values(), (std::vector<BigRational>{Q(1, 2), Q(3, 4), Q(1)}));
  EXPECT_EQ(SweepRange::parse("-1/3:2:1").values(), std::vector<BigRational>{Q(-1, 3)});
  for (const char* bad : {"1:2", "1:2:0", "1:2:x", "a:2:3", "1"}) EXPECT_ANY_THROW(SweepRange::parse(bad)) << bad;
}

TEST(Certifier, ExitCodes) {
  EXPECT_EQ(exit_code(Verdict::NonAbelianCertified), 0);
  EXPECT_EQ(exit_code(Verdict::Inconclusive), 2);
  EXPECT_EQ(exit_code(Verdict::DegenerateIntegrableLimit), 3);
  EXPECT_EQ(kExitUsage, 1);
}

TEST(Certifier, CertificateTextNamesTheVerdict) {
  const std::string text = certificate_text(decide(s2_tan_default()));
  EXPECT_NE(text.find("NonAbelianCertified"), std::string::npos);
  EXPECT_NE(text.find("case 3: excluded"), std::string::npos);
  EXPECT_NE(text.find("reality lemma: condition holds"), std::string::npos);
}

TEST(Certifier, SweepIsOrderedAndVerified) {
  SweepConfig cfg;
  cfg.space = Space::Sphere;
  cfg.potential = Potential::CscFamily;
  cfg.mu = SweepRange::parse("1/2:1:2").values();
  cfg.p = {Q(1)};
  cfg.alpha = {Q(1)};
  cfg.epsilon = SweepRange::parse("-1/2:1/2:3").values();
  cfg.workers = 4;
  const auto rows = run_sweep(cfg);
  ASSERT_EQ(rows.size(), 6u);
  // mu outermost, epsilon innermost
  EXPECT_EQ(rows[0].instance.mu, Q(1, 2));
  EXPECT_EQ(rows[2].instance.epsilon, Q(1, 2));
  EXPECT_EQ(rows[3].instance.mu, Q(1));
  for (const auto& row : rows) {
    ASSERT_TRUE(row.verdict.has_value()) << row.error;
    ASSERT_TRUE(row.verified.has_value());
    EXPECT_TRUE(*row.verified) << row.instance.label();
  }
  EXPECT_EQ(*rows[0].verdict, Verdict::NonAbelianCertified);
  EXPECT_EQ(*rows[2].verdict, Verdict::Inconclusive);
  EXPECT_TRUE(rows[2].reality_flagged);
  for (int k = 3; k < 6; ++k) EXPECT_EQ(*rows[k].verdict, Verdict::DegenerateIntegrableLimit);
  EXPECT_EQ(sweep_exit_code(rows), kExitCertified);

  const Json j = sweep_json(rows);
  EXPECT_EQ(j["rows"].size(), 6u);
  EXPECT_EQ(j["summary"]["DegenerateIntegrableLimit"], 3);
  EXPECT_EQ(j["summary"]["errors"], 0);
  EXPECT_EQ(j["summary"]["verification_failures"], 0);
}

TEST(Certifier, WorkerCountDoesNotChangeResults) {
  SweepConfig cfg;
  cfg.space = Space::Hyperbolic;
  cfg.potential = Potential::TanFamily;
  cfg.mu = {Q(1, 2), Q(2)};
  cfg.p = {Q(1), Q(-3, 2)};
  cfg.alpha = {Q(1)};
  cfg.epsilon = {Q(2), Q(-1, 3)};
  cfg.verify_rows = false;
  cfg.workers = 1;
  const std::string serial = sweep_json(run_sweep(cfg)).dump();
  cfg.workers = 8;
  EXPECT_EQ(sweep_json(run_sweep(cfg)).dump(), serial);
}

TEST(Certifier, SweepByEnergyAndRowErrors) {
  SweepConfig cfg;
  cfg.mu = {Q(1, 2)};
  cfg.p = {Q(1), Q(0)};
  cfg.alpha = {Q(1)};
  cfg.energy = {Q(7, 4)};  // eps = (h + mu p^2/2)/alpha = 2 at p = 1
  const auto rows = run_sweep(cfg);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].instance.epsilon, Q(2));
  EXPECT_EQ(rows[0].verdict, Verdict::NonAbelianCertified);
  EXPECT_FALSE(rows[1].verdict.has_value());  // p = 0 is not admissible
  EXPECT_FALSE(rows[1].error.empty());
  EXPECT_EQ(sweep_exit_code(rows), kExitInconclusive);
  EXPECT_EQ(sweep_json(rows)["summary"]["errors"], 1);

  cfg.alpha = {Q(0)};
  const auto zero = run_sweep(cfg);
  for (const auto& row : zero) EXPECT_FALSE(row.error.empty());
}

TEST(Certifier, CrosscheckReportJson) {
  const CrosscheckReport rep = crosscheck(s2_tan_default());
  const Json j = to_json(rep);
  EXPECT_TRUE(j["passed"].get<bool>());
  for (const char* k : {"energy", "casimir", "determinant", "orbit_relation", "chain"}) {
    EXPECT_TRUE(j["checks"][k].get<bool>()) << k;
  }
  EXPECT_FALSE(j["arcs"].empty());
  EXPECT_NE(crosscheck_text(rep).find("PASSED"), std::string::npos);
}
