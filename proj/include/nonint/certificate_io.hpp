#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nonint/field_tower.hpp"
#include "nonint/galois_decision.hpp"
#include "nonint/nve_reduction.hpp"
#include "nonint/rational_function.hpp"
#include "nonint/spectral_analysis.hpp"

namespace nonint {

using Json = nlohmann::ordered_json;

class MalformedCertificate : public std::runtime_error {
 public:
  explicit MalformedCertificate(const std::string& what) : std::runtime_error("malformed certificate: " + what) {}
};

// ---------------------------------------------------------------- field elements and polynomials

namespace detail {

inline Json gaussian_json(const GaussianRational& g) {
  return Json{{"re", to_fraction_string(g.re)}, {"im", to_fraction_string(g.im)}};
}

inline GaussianRational gaussian_from(const Json& j) {
  return {parse_big_rational(j.at("re").get<std::string>()), parse_big_rational(j.at("im").get<std::string>())};
}

}  // namespace detail

inline Json to_json(const FieldElement& x) {
  switch (x.level()) {
    case FieldElement::Level::Q: return Json{{"level", "Q"}, {"data", to_fraction_string(x.rational())}};
    case FieldElement::Level::Qi: return Json{{"level", "Qi"}, {"data", detail::gaussian_json(x.gaussian())}};
    case FieldElement::Level::QiSqrt: {
      const auto& q = x.quad();
      return Json{{"level", "Qi_sqrt"},
                  {"data", Json{{"a", detail::gaussian_json(q.a)},
                                {"b", detail::gaussian_json(q.b)},
                                {"radicand", detail::gaussian_json(q.radicand)}}}};
    }
  }
  return {};
}

inline FieldElement field_element_from_json(const Json& j) {
  const std::string level = j.at("level").get<std::string>();
  const Json& data = j.at("data");
  if (level == "Q") return FieldElement(parse_big_rational(data.get<std::string>()));
  if (level == "Qi") return FieldElement(detail::gaussian_from(data));
  if (level == "Qi_sqrt") {
    return FieldElement(QuadExtElement{detail::gaussian_from(data.at("a")), detail::gaussian_from(data.at("b")),
                                       detail::gaussian_from(data.at("radicand"))});
  }
  throw MalformedCertificate("unknown field level '" + level + "'");
}

inline Json to_json(const Poly& p) {
  Json out = Json::array();
  for (const auto& c : p.coefficients()) out.push_back(to_json(c));
  return out;
}

inline Poly poly_from_json(const Json& j) {
  std::vector<FieldElement> coeffs;
  for (const auto& c : j) coeffs.push_back(field_element_from_json(c));
  return Poly(std::move(coeffs));
}

inline Json to_json(const RatFunc& r) {
  return Json{{"numerator", to_json(r.numerator())}, {"denominator", to_json(r.denominator())}};
}

inline RatFunc ratfunc_from_json(const Json& j) {
  return RatFunc(poly_from_json(j.at("numerator")), poly_from_json(j.at("denominator")));
}

// ---------------------------------------------------------------- enums

inline Space space_from_string(const std::string& s) {
  if (s == "S2") return Space::Sphere;
  if (s == "H2") return Space::Hyperbolic;
  throw std::invalid_argument("unknown space '" + s + "' (expected S2 or H2)");
}

inline Potential potential_from_string(const std::string& s) {
  if (s == "tan") return Potential::TanFamily;
  if (s == "csc") return Potential::CscFamily;
  throw std::invalid_argument("unknown potential '" + s + "' (expected tan or csc)");
}

inline Verdict verdict_from_string(const std::string& s) {
  for (auto v : {Verdict::NonAbelianCertified, Verdict::Inconclusive, Verdict::DegenerateIntegrableLimit}) {
    if (to_string(v) == s) return v;
  }
  throw MalformedCertificate("unknown verdict '" + s + "'");
}

// ---------------------------------------------------------------- certificate

inline Json to_json(const ProblemInstance& inst) {
  return Json{{"space", to_string(inst.space)},       {"potential", to_string(inst.potential)},
              {"mu", to_fraction_string(inst.mu)},     {"p", to_fraction_string(inst.p)},
              {"alpha", to_fraction_string(inst.alpha)}, {"epsilon", to_fraction_string(inst.epsilon)},
              {"energy", to_fraction_string(inst.energy())}};
}

inline ProblemInstance instance_from_json(const Json& j) {
  return {space_from_string(j.at("space").get<std::string>()),
          potential_from_string(j.at("potential").get<std::string>()),
          parse_big_rational(j.at("mu").get<std::string>()),
          parse_big_rational(j.at("p").get<std::string>()),
          parse_big_rational(j.at("alpha").get<std::string>()),
          parse_big_rational(j.at("epsilon").get<std::string>())};
}

inline Json to_json(const SingularPointRecord& rec) {
  Json j{{"label", rec.label}};
  if (!rec.at_infinity) j["location"] = to_json(rec.location);
  j["order"] = rec.order == kInfiniteOrder ? Json("infinite") : Json(rec.order);
  j["alpha"] = to_json(rec.alpha);
  j["beta"] = to_json(rec.beta);
  j["delta_squared"] = to_json(rec.delta_squared);
  j["rational_delta"] = rec.rational_delta ? Json(to_fraction_string(*rec.rational_delta)) : Json(nullptr);
  if (!rec.at_infinity) j["factor"] = rec.factor;
  return j;
}

inline SingularPointRecord record_from_json(const Json& j) {
  SingularPointRecord rec;
  rec.label = j.at("label").get<std::string>();
  rec.at_infinity = !j.contains("location");
  if (!rec.at_infinity) {
    rec.location = field_element_from_json(j.at("location"));
    rec.factor = j.at("factor").get<std::size_t>();
  }
  rec.order = j.at("order").is_string() ? kInfiniteOrder : j.at("order").get<int>();
  rec.alpha = field_element_from_json(j.at("alpha"));
  rec.beta = field_element_from_json(j.at("beta"));
  rec.delta_squared = field_element_from_json(j.at("delta_squared"));
  if (!j.at("rational_delta").is_null()) rec.rational_delta = parse_big_rational(j.at("rational_delta").get<std::string>());
  if (rec.delta_squared.level() != FieldElement::Level::QiSqrt) rec.delta = adjoin_sqrt(rec.delta_squared);
  rec.regular = rec.at_infinity ? rec.order >= 2 : rec.order <= 2;
  return rec;
}

inline Json to_json(const GaloisCertificate& cert) {
  Json j;
  j["instance"] = to_json(cert.instance);
  Json flips = Json::array();
  for (bool f : cert.flips) flips.push_back(f);
  j["branch_flips"] = flips;
  j["verdict"] = to_string(cert.verdict);
  j["reason"] = cert.reason;
  if (cert.r) j["r"] = to_json(*cert.r);
  Json basis = Json::array();
  for (const auto& f : cert.pole_basis) basis.push_back(to_json(f));
  j["pole_basis"] = basis;

  Json records = Json::array();
  for (const auto& rec : cert.records) records.push_back(to_json(rec));
  j["singular_points"] = records;

  if (cert.reality) {
    Json rl{{"condition_holds", cert.reality->condition_holds},
            {"alphas_non_real", cert.reality->alphas_non_real}};
    Json alphas = Json::array();
    for (const auto& a : cert.reality->alphas) alphas.push_back(to_json(a));
    rl["alphas"] = alphas;
    if (cert.reality->imaginary_parts_opposite) rl["imaginary_parts_opposite"] = *cert.reality->imaginary_parts_opposite;
    if (cert.reality->imaginary_part_formula) rl["imaginary_part_formula"] = *cert.reality->imaginary_part_formula;
    j["reality_lemma"] = rl;
  }

  if (cert.case3) {
    j["case3"] = Json{{"excluded", cert.case3->excluded}, {"witnesses", cert.case3->witnesses}};
  }

  Json c1 = Json::array();
  for (const auto& c : cert.product_candidates) {
    Json cj{{"local_orders", c.local_orders},
            {"infinity_degree", c.infinity_degree},
            {"poly_degree", c.poly_degree},
            {"relaxed", c.relaxed},
            {"ansatz_degree", c.ansatz_degree},
            {"base", to_json(c.base)}};
    if (c.residual) cj["residual"] = to_json(*c.residual);
    cj["solution_dimension"] = c.solution_dimension;
    c1.push_back(cj);
  }
  j["case1"] = Json{{"product_candidates", c1},
                    {"exponential_rule", cert.exponential_rule ? Json(to_string(*cert.exponential_rule)) : Json(nullptr)}};

  Json esets = Json::array();
  for (const auto& e : cert.e_sets) esets.push_back(Json{{"label", e.label}, {"values", e.values}});
  Json c2 = Json::array();
  for (const auto& c : cert.case2) {
    Json cj{{"e_values", c.e_values}, {"degree_d", c.degree_d}, {"theta", to_json(c.theta)}};
    if (c.xi) cj["xi"] = to_json(*c.xi);
    cj["solution_dimension"] = c.solution_dimension;
    if (!c.error.empty()) cj["error"] = c.error;
    c2.push_back(cj);
  }
  j["case2"] = Json{{"e_sets", esets}, {"candidates", c2}, {"error", cert.case2_error}};
  return j;
}

/// Reads back everything `to_json` wrote.
inline GaloisCertificate certificate_from_json(const Json& j) {
  try {
    GaloisCertificate cert;
    cert.instance = instance_from_json(j.at("instance"));
    for (const auto& f : j.at("branch_flips")) cert.flips.push_back(f.get<bool>());
    cert.verdict = verdict_from_string(j.at("verdict").get<std::string>());
    cert.reason = j.at("reason").get<std::string>();
    if (j.contains("r")) cert.r = ratfunc_from_json(j.at("r"));
    for (const auto& f : j.at("pole_basis")) cert.pole_basis.push_back(poly_from_json(f));
    for (const auto& rec : j.at("singular_points")) cert.records.push_back(record_from_json(rec));
    if (j.contains("reality_lemma")) {
      const Json& rl = j.at("reality_lemma");
      RealityCheck rc;
      rc.condition_holds = rl.at("condition_holds").get<bool>();
      rc.alphas_non_real = rl.at("alphas_non_real").get<bool>();
      for (const auto& a : rl.at("alphas")) rc.alphas.push_back(field_element_from_json(a));
      if (rl.contains("imaginary_parts_opposite")) rc.imaginary_parts_opposite = rl.at("imaginary_parts_opposite").get<bool>();
      if (rl.contains("imaginary_part_formula")) rc.imaginary_part_formula = rl.at("imaginary_part_formula").get<bool>();
      cert.reality = rc;
    }
    if (j.contains("case3")) {
      cert.case3 = Case3Result{j.at("case3").at("excluded").get<bool>(),
                               j.at("case3").at("witnesses").get<std::vector<std::string>>()};
    }
    const Json& c1 = j.at("case1");
    for (const auto& cj : c1.at("product_candidates")) {
      ProductCandidate c;
      c.local_orders = cj.at("local_orders").get<std::vector<int>>();
      c.infinity_degree = cj.at("infinity_degree").get<int>();
      c.poly_degree = cj.at("poly_degree").get<int>();
      c.relaxed = cj.at("relaxed").get<bool>();
      c.ansatz_degree = cj.at("ansatz_degree").get<int>();
      c.base = ratfunc_from_json(cj.at("base"));
      if (cj.contains("residual")) c.residual = ratfunc_from_json(cj.at("residual"));
      c.solution_dimension = cj.at("solution_dimension").get<std::size_t>();
      c.evaluated = true;
      cert.product_candidates.push_back(std::move(c));
    }
    if (!c1.at("exponential_rule").is_null()) {
      cert.exponential_rule = c1.at("exponential_rule").get<std::string>() == "NonAbelianForced"
                                  ? ExponentialRule::NonAbelianForced
                                  : ExponentialRule::RationalPowerPossible;
    }
    const Json& c2 = j.at("case2");
    for (const auto& e : c2.at("e_sets")) {
      cert.e_sets.push_back({e.at("label").get<std::string>(), e.at("values").get<std::vector<int>>()});
    }
    for (const auto& cj : c2.at("candidates")) {
      Case2Candidate c;
      c.e_values = cj.at("e_values").get<std::vector<int>>();
      c.degree_d = cj.at("degree_d").get<int>();
      c.theta = ratfunc_from_json(cj.at("theta"));
      if (cj.contains("xi")) c.xi = ratfunc_from_json(cj.at("xi"));
      c.solution_dimension = cj.at("solution_dimension").get<std::size_t>();
      if (cj.contains("error")) c.error = cj.at("error").get<std::string>();
      cert.case2.push_back(std::move(c));
    }
    cert.case2_error = c2.at("error").get<std::string>();
    return cert;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedCertificate(e.what());
  }
}

// ---------------------------------------------------------------- verification

struct VerifyReport {
  bool ok = true;
  Verdict recomputed = Verdict::Inconclusive;
  std::vector<std::string> disagreements;

  void fail(std::string what) {
    ok = false;
    disagreements.push_back(std::move(what));
  }
};

namespace detail {

inline bool same_records(const SingularPointRecord& a, const SingularPointRecord& b) {
  return a.label == b.label && a.at_infinity == b.at_infinity && (a.at_infinity || a.location == b.location) &&
         a.order == b.order && a.alpha == b.alpha && a.beta == b.beta && a.delta_squared == b.delta_squared &&
         a.rational_delta == b.rational_delta && (a.at_infinity || a.factor == b.factor);
}

inline bool same_optional(const std::optional<RatFunc>& a, const std::optional<RatFunc>& b) {
  return a.has_value() == b.has_value() && (!a || *a == *b);
}

}  // namespace detail

/// Re-checks every witness in a certificate against its stored r(z) (r is not rebuilt from the instance):
/// Laurent data at each stored pole, pole-order bookkeeping, exponent tests, both candidate
/// enumerations with their residuals, and the verdict logic.
inline VerifyReport verify(const GaloisCertificate& cert) {
  VerifyReport rep;
  const ProblemInstance& inst = cert.instance;
  try {
    inst.validate();
  } catch (const InvalidParameters& e) {
    rep.fail(e.what());
    return rep;
  }

  if (!cert.r) {
    // Only the short-circuit verdicts carry no equation.
    const auto clash = coincidences(inst);
    if (clash.empty()) rep.fail("certificate without r(z) but the singular points are distinct");
    rep.recomputed = inst.degenerate() ? Verdict::DegenerateIntegrableLimit : Verdict::Inconclusive;
    if (rep.recomputed != cert.verdict) rep.fail("verdict mismatch: stored " + to_string(cert.verdict));
    return rep;
  }
  const RatFunc& r = *cert.r;

  // Singular data straight from the stored r and basis.
  NormalFormODE ode;
  ode.r = r;
  ode.pole_basis = cert.pole_basis;
  GaloisCertificate fresh;
  fresh.instance = inst;
  fresh.flips = cert.flips;
  fresh.r = r;
  fresh.pole_basis = cert.pole_basis;
  try {
    fresh.records = singular_points(ode, cert.flips);
  } catch (const std::domain_error& e) {
    // decide() gives up the same way; a trustworthy certificate then stores no records.
    rep.recomputed = inst.degenerate() ? Verdict::DegenerateIntegrableLimit : Verdict::Inconclusive;
    if (!cert.records.empty()) rep.fail(std::string("singular data not reproducible: ") + e.what());
    if (rep.recomputed != cert.verdict) rep.fail("verdict mismatch: stored " + to_string(cert.verdict));
    return rep;
  }
  if (fresh.records.size() != cert.records.size()) {
    rep.fail("number of singular points differs");
  } else {
    for (std::size_t k = 0; k < fresh.records.size(); ++k) {
      if (!detail::same_records(fresh.records[k], cert.records[k])) rep.fail("singular point " + cert.records[k].label + " differs");
    }
  }
  // Every stored pole is a pole of the stored order.
  for (const auto& rec : cert.records) {
    if (rec.at_infinity) continue;
    if (root_multiplicity(r.denominator(), rec.location) != rec.order) rep.fail("pole order at " + rec.label);
  }

  if (inst.space == Space::Sphere && !inst.degenerate()) {
    const RealityCheck rc = check_reality_lemma(inst, r);
    if (!cert.reality || cert.reality->condition_holds != rc.condition_holds ||
        cert.reality->alphas_non_real != rc.alphas_non_real || cert.reality->alphas != rc.alphas) {
      rep.fail("reality lemma data differs");
    }
    fresh.reality = rc;
  }

  std::optional<std::string> survivor;
  try {
    survivor = analyze(fresh);
  } catch (const std::exception& e) {
    rep.fail(std::string("analysis failed: ") + e.what());
    return rep;
  }

  if (!cert.case3 || cert.case3->excluded != fresh.case3->excluded || cert.case3->witnesses != fresh.case3->witnesses) {
    rep.fail("case 3 witnesses differ");
  }
  if (cert.product_candidates.size() != fresh.product_candidates.size()) {
    rep.fail("product candidate count differs");
  } else {
    for (std::size_t k = 0; k < fresh.product_candidates.size(); ++k) {
      const auto& a = cert.product_candidates[k];
      const auto& b = fresh.product_candidates[k];
      if (a.local_orders != b.local_orders || a.infinity_degree != b.infinity_degree ||
          a.poly_degree != b.poly_degree || a.ansatz_degree != b.ansatz_degree || a.base != b.base ||
          !detail::same_optional(a.residual, b.residual) || a.solution_dimension != b.solution_dimension) {
        rep.fail("product candidate #" + std::to_string(k) + " differs");
      }
    }
  }
  if (cert.exponential_rule != fresh.exponential_rule) rep.fail("exponential rule differs");
  if (cert.case2_error != fresh.case2_error) rep.fail("case 2 error differs");
  if (cert.e_sets.size() != fresh.e_sets.size()) {
    rep.fail("E-set count differs");
  } else {
    for (std::size_t k = 0; k < fresh.e_sets.size(); ++k) {
      if (cert.e_sets[k].label != fresh.e_sets[k].label || cert.e_sets[k].values != fresh.e_sets[k].values) {
        rep.fail("E-set at " + fresh.e_sets[k].label + " differs");
      }
    }
  }
  if (cert.case2.size() != fresh.case2.size()) {
    rep.fail("case 2 candidate count differs");
  } else {
    for (std::size_t k = 0; k < fresh.case2.size(); ++k) {
      const auto& a = cert.case2[k];
      const auto& b = fresh.case2[k];
      if (a.e_values != b.e_values || a.degree_d != b.degree_d || a.theta != b.theta ||
          !detail::same_optional(a.xi, b.xi) || a.solution_dimension != b.solution_dimension || a.error != b.error) {
        rep.fail("case 2 candidate #" + std::to_string(k) + " differs");
      }
    }
  }

  if (inst.degenerate()) {
    rep.recomputed = Verdict::DegenerateIntegrableLimit;
  } else if (fresh.reality && !fresh.reality->condition_holds && !fresh.reality->alphas_non_real) {
    rep.recomputed = Verdict::Inconclusive;
  } else {
    rep.recomputed = survivor ? Verdict::Inconclusive : Verdict::NonAbelianCertified;
  }
  if (rep.recomputed != cert.verdict) rep.fail("verdict mismatch: stored " + to_string(cert.verdict) +
                                               ", recomputed " + to_string(rep.recomputed));
  return rep;
}

inline VerifyReport verify(const Json& j) {
  try {
    return verify(certificate_from_json(j));
  } catch (const std::exception& e) {
    VerifyReport rep;
    rep.fail(e.what());
    return rep;
  }
}

}  // namespace nonint
