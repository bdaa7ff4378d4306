#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nonint/field_tower.hpp"
#include "nonint/linear_system.hpp"
#include "nonint/nve_reduction.hpp"
#include "nonint/rational_function.hpp"
#include "nonint/spectral_analysis.hpp"

namespace nonint {

/// E-set requested for a point whose order is outside {1, 2} (or != 2 at infinity).
class UnsupportedOrder : public std::domain_error {
 public:
  explicit UnsupportedOrder(const std::string& what) : std::domain_error(what) {}
};

// ---------------------------------------------------------------- case 3

struct Case3Result {
  bool excluded = false;
  std::vector<std::string> witnesses;  // points whose exponent difference is not rational
};

inline Case3Result case3_exclusion(const std::vector<SingularPointRecord>& records) {
  Case3Result out;
  for (const auto& rec : records) {
    if (!rec.regular) throw IrregularSingularPoint(rec.label + " is not a regular singular point");
    if (!rec.rational_delta) out.witnesses.push_back(rec.label);
  }
  out.excluded = !out.witnesses.empty();
  return out;
}

// ---------------------------------------------------------------- unique exponential solution

enum class ExponentialRule { NonAbelianForced, RationalPowerPossible };

inline std::string to_string(ExponentialRule e) {
  return e == ExponentialRule::NonAbelianForced ? "NonAbelianForced" : "RationalPowerPossible";
}

/// Some exponent (1 +- delta)/2 is irrational  =>  no power of an exponential solution is rational.
inline ExponentialRule unique_exponential_rule(const std::vector<SingularPointRecord>& records) {
  for (const auto& rec : records) {
    if (!rec.rational_delta) return ExponentialRule::NonAbelianForced;
  }
  return ExponentialRule::RationalPowerPossible;
}

// ---------------------------------------------------------------- helpers shared by cases 1 and 2

namespace detail {

/// Integers among {1 - delta, 1, 1 + delta}: local orders of a product of two solutions.
inline std::vector<int> product_orders(const SingularPointRecord& rec) {
  std::vector<int> out;
  if (rec.rational_delta && rec.rational_delta->get_den() == 1 && sgn(*rec.rational_delta) != 0) {
    const long d = rec.rational_delta->get_num().get_si();
    out = {static_cast<int>(1 - d), 1, static_cast<int>(1 + d)};
  } else {
    out = {1};
  }
  return out;
}

inline std::vector<std::size_t> finite_indices(const std::vector<SingularPointRecord>& records) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < records.size(); ++j) {
    if (!records[j].at_infinity) out.push_back(j);
  }
  return out;
}

inline const SingularPointRecord& infinity_of(const std::vector<SingularPointRecord>& records) {
  for (const auto& rec : records) {
    if (rec.at_infinity) return rec;
  }
  throw std::invalid_argument("record list has no point at infinity");
}

/// Points grouped by pole-basis factor, in record order.
inline std::vector<std::vector<std::size_t>> factor_groups(const std::vector<SingularPointRecord>& records,
                                                          const std::vector<std::size_t>& finite) {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < finite.size(); ++k) {
    const auto& rec = records[finite[k]];
    if (groups.empty() || records[finite[groups.back().front()]].factor != rec.factor) groups.emplace_back();
    groups.back().push_back(k);
  }
  return groups;
}

inline RatFunc linear(const FieldElement& c) { return RatFunc(Poly::linear_factor(c)); }

/// Product over the points of a group as a single monic polynomial in z.
inline Poly group_polynomial(const std::vector<SingularPointRecord>& records, const std::vector<std::size_t>& finite,
                             const std::vector<std::size_t>& group) {
  Poly p(FieldElement(1));
  for (auto k : group) p = p * Poly::linear_factor(records[finite[k]].location);
  return p;
}

inline bool group_in_gaussian_field(const std::vector<SingularPointRecord>& records,
                                    const std::vector<std::size_t>& finite, const std::vector<std::size_t>& group) {
  for (auto k : group) {
    if (records[finite[k]].location.level() == FieldElement::Level::QiSqrt) return false;
  }
  return true;
}

/// v''' - 4 r v' - 2 r' v
inline RatFunc symmetric_square(const RatFunc& v, const RatFunc& r, const RatFunc& dr) {
  const RatFunc v1 = v.derivative();
  const RatFunc v3 = v1.derivative().derivative();
  return v3 - RatFunc(FieldElement(4)) * r * v1 - RatFunc(FieldElement(2)) * dr * v;
}

}  // namespace detail

// ---------------------------------------------------------------- case 1: product candidates

struct ProductCandidate {
  std::vector<int> local_orders;  // m_j, aligned with the finite records
  int infinity_degree = 0;        // s
  int poly_degree = 0;            // d = s - sum m_j
  // Filled by evaluate_product_candidate:
  bool evaluated = false;
  bool relaxed = false;   // an unequal split inside an extension: P also absorbs the extra roots
  int ansatz_degree = 0;  // degree of the unknown polynomial actually solved for
  RatFunc base;           // v = P * base
  std::optional<RatFunc> residual;  // v''' - 4 r v' - 2 r' v for the constant-P case
  std::size_t solution_dimension = 0;

  bool survives() const { return !evaluated || solution_dimension > 0; }
};

/// Every assignment m_j in {1-D_j, 1, 1+D_j} (integers only) and s likewise at infinity with d >= 0.
inline std::vector<ProductCandidate> enumerate_product_candidates(const std::vector<SingularPointRecord>& records) {
  const auto finite = detail::finite_indices(records);
  std::vector<std::vector<int>> options;
  std::vector<int> min_suffix(finite.size() + 1, 0);
  for (auto j : finite) options.push_back(detail::product_orders(records[j]));
  for (std::size_t k = finite.size(); k-- > 0;) {
    min_suffix[k] = min_suffix[k + 1] + *std::min_element(options[k].begin(), options[k].end());
  }
  const auto at_inf = detail::product_orders(detail::infinity_of(records));

  std::vector<ProductCandidate> out;
  std::vector<int> current(finite.size());
  for (int s : at_inf) {
    std::function<void(std::size_t, int)> walk = [&](std::size_t k, int sum) {
      if (sum + min_suffix[k] > s) return;
      if (k == finite.size()) {
        ProductCandidate c;
        c.local_orders = current;
        c.infinity_degree = s;
        c.poly_degree = s - sum;
        out.push_back(std::move(c));
        return;
      }
      for (int m : options[k]) {
        current[k] = m;
        walk(k + 1, sum + m);
      }
    };
    walk(0, 0);
  }
  return out;
}

/// Decides whether v''' - 4 r v' - 2 r' v = 0 has a nonzero solution of the candidate's shape.
inline void evaluate_product_candidate(ProductCandidate& c, const std::vector<SingularPointRecord>& records,
                                       const RatFunc& r) {
  const auto finite = detail::finite_indices(records);
  RatFunc base(FieldElement(1));
  int extra = 0;
  bool relaxed = false;
  for (const auto& group : detail::factor_groups(records, finite)) {
    int lo = c.local_orders[group.front()];
    int hi = lo;
    for (auto k : group) {
      lo = std::min(lo, c.local_orders[k]);
      hi = std::max(hi, c.local_orders[k]);
    }
    if (lo == hi) {
      base = base * RatFunc(detail::group_polynomial(records, finite, group)).pow(lo);
    } else if (detail::group_in_gaussian_field(records, finite, group)) {
      for (auto k : group) base = base * detail::linear(records[finite[k]].location).pow(c.local_orders[k]);
    } else {
      // Unequal orders on conjugate roots: stay in Q(i) and let P carry the surplus roots.
      base = base * RatFunc(detail::group_polynomial(records, finite, group)).pow(lo);
      for (auto k : group) extra += c.local_orders[k] - lo;
      relaxed = true;
    }
  }
  c.base = base;
  c.relaxed = relaxed;
  c.ansatz_degree = c.poly_degree + extra;
  const RatFunc dr = r.derivative();
  std::vector<RatFunc> images;
  RatFunc monomial = base;
  for (int k = 0; k <= c.ansatz_degree; ++k) {
    images.push_back(detail::symmetric_square(monomial, r, dr));
    monomial = monomial * RatFunc::variable();
  }
  if (c.ansatz_degree == 0) c.residual = images.front();
  c.solution_dimension = kernel_dimension(images);
  c.evaluated = true;
}

inline RatFunc symmetric_square_residual(const RatFunc& v, const RatFunc& r) {
  return detail::symmetric_square(v, r, r.derivative());
}

// ---------------------------------------------------------------- case 2

struct ESet {
  std::string label;
  std::vector<int> values;  // ascending
};

/// order 1 -> {4}; order 2 -> {2, 2 +- 2 delta} intersected with the integers; infinity needs order 2.
inline std::vector<ESet> case2_E_sets(const std::vector<SingularPointRecord>& records) {
  std::vector<ESet> out;
  for (const auto& rec : records) {
    ESet e{rec.label, {}};
    const bool order_two = rec.order == 2;
    if (!rec.at_infinity && rec.order == 1) {
      e.values = {4};
    } else if (order_two) {
      e.values = {2};
      if (rec.rational_delta) {
        const BigRational twice = 2 * *rec.rational_delta;
        if (twice.get_den() == 1 && sgn(twice) != 0) {
          const long t = twice.get_num().get_si();
          e.values = {static_cast<int>(2 - t), 2, static_cast<int>(2 + t)};
          std::sort(e.values.begin(), e.values.end());
        }
      }
    } else {
      const std::string order = rec.order == kInfiniteOrder ? "infinite" : std::to_string(rec.order);
      throw UnsupportedOrder("E-set undefined at " + rec.label + " (order " + order + ")");
    }
    out.push_back(std::move(e));
  }
  return out;
}

struct Case2Candidate {
  std::vector<int> e_values;  // aligned with the records (infinity included)
  int degree_d = 0;
  RatFunc theta;
  std::optional<RatFunc> xi;  // Theta'' + 3 Theta Theta' + Theta^3 - 4 r Theta - 2 r'  (d == 0)
  std::size_t solution_dimension = 0;
  std::string error;  // set when the candidate could not be evaluated inside the tower

  bool survives() const { return !error.empty() || solution_dimension > 0; }
};

namespace detail {

inline RatFunc theta_of(const std::vector<SingularPointRecord>& records, const std::vector<int>& e) {
  const auto finite = finite_indices(records);
  RatFunc sum;
  for (const auto& group : factor_groups(records, finite)) {
    bool equal = true;
    for (auto k : group) equal = equal && e[finite[k]] == e[finite[group.front()]];
    if (equal) {
      const Poly g = group_polynomial(records, finite, group);
      sum += RatFunc(FieldElement(e[finite[group.front()]])) * RatFunc(g.derivative(), g);
    } else {
      for (auto k : group) sum += RatFunc(FieldElement(e[finite[k]])) / linear(records[finite[k]].location);
    }
  }
  return RatFunc(FieldElement(BigRational(1, 2))) * sum;
}

}  // namespace detail

/// Retains the e-assignments with d(e) = (e_inf - sum e_c)/2 a non-negative integer and tests each.
/// With `stop_at_survivor` the list ends at the first candidate that survives or cannot be decided.
inline std::vector<Case2Candidate> case2_search(const std::vector<ESet>& e_sets,
                                                const std::vector<SingularPointRecord>& records,
                                                const RatFunc& r, bool stop_at_survivor = false) {
  std::size_t inf_index = records.size();
  for (std::size_t j = 0; j < records.size(); ++j) {
    if (records[j].at_infinity) inf_index = j;
  }
  if (inf_index == records.size() || e_sets.size() != records.size()) {
    throw std::invalid_argument("case2_search: E-sets do not match the records");
  }
  std::vector<std::size_t> finite = detail::finite_indices(records);
  std::vector<int> min_suffix(finite.size() + 1, 0);
  for (std::size_t k = finite.size(); k-- > 0;) {
    min_suffix[k] = min_suffix[k + 1] + e_sets[finite[k]].values.front();
  }

  std::vector<Case2Candidate> out;
  std::vector<int> e(records.size(), 0);
  for (int e_inf : e_sets[inf_index].values) {
    e[inf_index] = e_inf;
    std::function<void(std::size_t, int)> walk = [&](std::size_t k, int sum) {
      if (sum + min_suffix[k] > e_inf) return;
      if (k == finite.size()) {
        if ((e_inf - sum) % 2 != 0) return;
        Case2Candidate c;
        c.e_values = e;
        c.degree_d = (e_inf - sum) / 2;
        out.push_back(std::move(c));
        return;
      }
      for (int v : e_sets[finite[k]].values) {
        e[finite[k]] = v;
        walk(k + 1, sum + v);
      }
    };
    walk(0, 0);
  }

  const RatFunc dr = r.derivative();
  const RatFunc three(FieldElement(3)), four(FieldElement(4)), two(FieldElement(2));
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto& c = out[k];
    if (stop_at_survivor && k > 0 && out[k - 1].survives()) {
      out.resize(k);
      break;
    }
    try {
      c.theta = detail::theta_of(records, c.e_values);
      const RatFunc& t = c.theta;
      const RatFunc t1 = t.derivative();
      const RatFunc t2 = t1.derivative();
      const RatFunc xi = t2 + three * t * t1 + t * t * t - four * r * t - two * dr;
      if (c.degree_d == 0) {
        c.xi = xi;
        c.solution_dimension = xi.is_zero() ? 1 : 0;
        continue;
      }
      // P''' + 3 T P'' + (3 T^2 + 3 T' - 4 r) P' + Xi P = 0 for P of degree d.
      const RatFunc a1 = three * t * t + three * t1 - four * r;
      std::vector<RatFunc> images;
      for (int k = 0; k <= c.degree_d; ++k) {
        const RatFunc pk(Poly::monomial(FieldElement(1), static_cast<std::size_t>(k)));
        const RatFunc p1 = pk.derivative();
        const RatFunc p2 = p1.derivative();
        images.push_back(p2.derivative() + three * t * p2 + a1 * p1 + xi * pk);
      }
      c.solution_dimension = kernel_dimension(images);
    } catch (const std::domain_error& err) {
      c.error = err.what();
    }
  }
  return out;
}

// ---------------------------------------------------------------- decision

enum class Verdict { NonAbelianCertified, Inconclusive, DegenerateIntegrableLimit };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::NonAbelianCertified: return "NonAbelianCertified";
    case Verdict::Inconclusive: return "Inconclusive";
    case Verdict::DegenerateIntegrableLimit: return "DegenerateIntegrableLimit";
  }
  return "?";
}

struct GaloisCertificate {
  ProblemInstance instance;
  std::vector<bool> flips;
  std::optional<RatFunc> r;
  std::vector<Poly> pole_basis;
  std::vector<SingularPointRecord> records;
  std::optional<RealityCheck> reality;

  std::optional<Case3Result> case3;
  std::vector<ProductCandidate> product_candidates;
  std::optional<ExponentialRule> exponential_rule;
  std::vector<ESet> e_sets;
  std::vector<Case2Candidate> case2;
  std::string case2_error;

  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
};

/// Runs cases 3, 1 and 2 on a prepared equation, filling the trace, and stops at the first branch
/// that survives (returned as the reason); nullopt means every branch was eliminated.
inline std::optional<std::string> analyze(GaloisCertificate& cert) {
  const RatFunc& r = *cert.r;
  cert.case3 = case3_exclusion(cert.records);
  if (!cert.case3->excluded) return "case 3 not excluded: every exponent difference is rational";

  cert.product_candidates = enumerate_product_candidates(cert.records);
  for (auto& c : cert.product_candidates) evaluate_product_candidate(c, cert.records, r);
  for (std::size_t k = 0; k < cert.product_candidates.size(); ++k) {
    if (cert.product_candidates[k].survives()) {
      return "product candidate #" + std::to_string(k) + " admits a rational solution of the symmetric square";
    }
  }

  cert.exponential_rule = unique_exponential_rule(cert.records);
  if (*cert.exponential_rule != ExponentialRule::NonAbelianForced) {
    return "all exponents rational: a power of an exponential solution may be rational";
  }

  try {
    cert.e_sets = case2_E_sets(cert.records);
    cert.case2 = case2_search(cert.e_sets, cert.records, r, /*stop_at_survivor=*/true);
  } catch (const UnsupportedOrder& e) {
    cert.case2_error = e.what();
  }
  if (!cert.case2_error.empty()) return "case 2 undecided: " + cert.case2_error;
  for (std::size_t k = 0; k < cert.case2.size(); ++k) {
    const auto& c = cert.case2[k];
    if (!c.error.empty()) return "case 2 candidate #" + std::to_string(k) + " undecided: " + c.error;
    if (c.survives()) return "case 2 candidate #" + std::to_string(k) + " has a solution";
  }
  return std::nullopt;
}

/// Full pipeline for one instance.  Parameter errors (mu, p or alpha zero) propagate as InvalidParameters.
inline GaloisCertificate decide(const ProblemInstance& inst, const std::vector<bool>& flips = {}) {
  inst.validate();
  GaloisCertificate cert;
  cert.instance = inst;
  cert.flips = flips;

  const auto clash = coincidences(inst);
  if (!clash.empty()) {
    cert.verdict = inst.degenerate() ? Verdict::DegenerateIntegrableLimit : Verdict::Inconclusive;
    cert.reason = "coincident singular points: " + clash.front();
    if (inst.space == Space::Sphere && !inst.degenerate()) {
      try {
        cert.reality = check_reality_lemma(inst, normal_form(inst, /*allow_coincident=*/true).r);
      } catch (const std::domain_error&) {
      }
    }
    return cert;
  }

  try {
    const NormalFormODE ode = normal_form(inst);
    cert.r = ode.r;
    cert.pole_basis = ode.pole_basis;
    cert.records = singular_points(ode, flips);
    if (inst.space == Space::Sphere && !inst.degenerate()) {
      cert.reality = check_reality_lemma(inst, ode.r);
    }
    const auto survivor = analyze(cert);
    if (inst.degenerate()) {
      cert.verdict = Verdict::DegenerateIntegrableLimit;
      cert.reason = "mu = 1: the second mass vanishes (integrable one-body limit)";
    } else if (cert.reality && !cert.reality->condition_holds && !cert.reality->alphas_non_real) {
      cert.verdict = Verdict::Inconclusive;
      cert.reason = "reality condition fails and the relevant coefficients are real";
    } else if (survivor) {
      cert.verdict = Verdict::Inconclusive;
      cert.reason = *survivor;
    } else {
      cert.verdict = Verdict::NonAbelianCertified;
      cert.reason = "all abelian-compatible branches eliminated";
    }
  } catch (const std::domain_error& e) {
    cert.verdict = inst.degenerate() ? Verdict::DegenerateIntegrableLimit : Verdict::Inconclusive;
    cert.reason = std::string("analysis aborted: ") + e.what();
  }
  return cert;
}

}  // namespace nonint
