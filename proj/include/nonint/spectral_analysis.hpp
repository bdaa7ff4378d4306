#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nonint/field_tower.hpp"
#include "nonint/nve_reduction.hpp"
#include "nonint/rational_function.hpp"

namespace nonint {

/// Pole of order >= 3 or order at infinity <= 1.
class IrregularSingularPoint : public std::domain_error {
 public:
  explicit IrregularSingularPoint(const std::string& what) : std::domain_error(what) {}
};

struct SingularPointRecord {
  std::string label;       // z1, z2, ... in pole-basis order, or "inf"
  bool at_infinity = false;
  FieldElement location;   // meaningless at infinity
  int order = 0;           // pole order; at infinity deg(den) - deg(num)
  FieldElement alpha;      // coefficient of (z - c)^-2 (of z^-2 at infinity)
  FieldElement beta;       // coefficient of (z - c)^-1; zero at infinity
  FieldElement delta_squared;          // 1 + 4 alpha
  std::optional<FieldElement> delta;   // principal sqrt(1 + 4 alpha) when it stays inside the tower
  std::optional<BigRational> rational_delta;  // set iff delta is a rational number
  bool regular = true;
  std::size_t factor = 0;  // pole-basis factor the point belongs to

  /// rho+- = (1 +- delta)/2, when delta is representable.
  std::optional<FieldElement> rho_plus() const {
    if (!delta) return std::nullopt;
    return (FieldElement(1) + *delta) * FieldElement(BigRational(1, 2));
  }
  std::optional<FieldElement> rho_minus() const {
    if (!delta) return std::nullopt;
    return (FieldElement(1) - *delta) * FieldElement(BigRational(1, 2));
  }
};

namespace detail {

inline void fill_exponent_data(SingularPointRecord& rec) {
  rec.delta_squared = FieldElement(1) + FieldElement(4) * rec.alpha;
  rec.delta.reset();
  rec.rational_delta.reset();
  if (rec.delta_squared.level() != FieldElement::Level::QiSqrt) rec.delta = adjoin_sqrt(rec.delta_squared);
  rec.rational_delta = rational_square_root(rec.delta_squared);
}

}  // namespace detail

inline SingularPointRecord infinity_record(const RatFunc& r) {
  const auto inf = behavior_at_infinity(r);
  SingularPointRecord rec;
  rec.label = "inf";
  rec.at_infinity = true;
  rec.order = inf.order;
  rec.regular = inf.order >= 2;
  if (!rec.regular) {
    throw IrregularSingularPoint("irregular singular point at infinity (order " + std::to_string(inf.order) + ")");
  }
  rec.alpha = inf.order == 2 ? inf.leading_coeff : FieldElement(0);
  detail::fill_exponent_data(rec);
  return rec;
}

/// One record per pole of r (in pole-basis order) followed by the record at infinity.
/// `flips[j]` swaps the roots of basis factor j (a change of square-root branch).
inline std::vector<SingularPointRecord> singular_points(const NormalFormODE& ode,
                                                        const std::vector<bool>& flips = {}) {
  const std::vector<Poly> basis =
      ode.pole_basis.empty() ? default_factor_basis(ode.r.denominator()) : ode.pole_basis;
  PartialFractionForm pf;
  try {
    pf = partial_fractions(ode.r, basis, flips);
  } catch (const PoleOrderError& e) {
    throw IrregularSingularPoint(e.what());
  }
  std::vector<int> offset(basis.size() + 1, 0);
  for (std::size_t j = 0; j < basis.size(); ++j) offset[j + 1] = offset[j] + basis[j].degree();

  std::vector<SingularPointRecord> out;
  for (const auto& t : pf.poles) {
    SingularPointRecord rec;
    rec.label = "z" + std::to_string(offset[t.factor] + static_cast<int>(t.root) + 1);
    rec.location = t.location;
    rec.order = t.order;
    rec.alpha = t.order2coeff;
    rec.beta = t.order1coeff;
    rec.factor = t.factor;
    detail::fill_exponent_data(rec);
    out.push_back(std::move(rec));
  }
  out.push_back(infinity_record(ode.r));
  return out;
}

inline std::vector<SingularPointRecord> singular_points(const RatFunc& r) {
  NormalFormODE ode;
  ode.r = r;
  return singular_points(ode);
}

struct RealityCheck {
  bool condition_holds = false;  // the lemma's hypothesis on the parameters
  bool alphas_non_real = false;  // measured directly on r
  std::vector<FieldElement> alphas;
  /// csc family only: Im alpha6 == -Im alpha7 and i Im alpha6 == -2 mu (mu-1) q/kappa.
  std::optional<bool> imaginary_parts_opposite;
  std::optional<bool> imaginary_part_formula;
};

namespace detail {

inline void require_lemma_hypotheses(const ProblemInstance& inst, Potential expected) {
  inst.validate();
  if (inst.space != Space::Sphere || inst.potential != expected) {
    throw std::invalid_argument("reality lemma applies to the S2/" + to_string(expected) + " family only");
  }
  if (inst.mu == 1) throw InvalidParameters("reality lemma requires mu != 1");
}

inline std::vector<FieldElement> order2_coefficients(const RatFunc& r, const FieldElement& square) {
  std::vector<FieldElement> out;
  for (const auto& root : factor_roots(Poly{-square, FieldElement(0), FieldElement(1)})) {
    // a root where r is regular contributes a zero coefficient
    out.push_back(root_multiplicity(r.denominator(), root) == 0 ? FieldElement(0) : laurent_coefficient(r, root, -2));
  }
  return out;
}

// i * Im(x) = (x - conj x)/2
inline FieldElement i_imaginary_part(const FieldElement& x) {
  return (x - x.conj()) * FieldElement(BigRational(1, 2));
}

}  // namespace detail

/// Tan family on S2: the parameter condition
///   (sqrt(eps^2+1) - eps)(eps^2+1) != (mu-1)^2 p^2/(4 alpha mu)
/// against the non-reality of the order-2 coefficients at +-lambda, +-eta.
/// `r` is the normal-form coefficient of the instance.
inline RealityCheck check_reality_lemma_tan(const ProblemInstance& inst, const RatFunc& r) {
  detail::require_lemma_hypotheses(inst, Potential::TanFamily);
  const BigRational& e = inst.epsilon;
  const BigRational e2p1 = e * e + 1;
  const BigRational k = (inst.mu - 1) * (inst.mu - 1) * inst.p * inst.p / (4 * inst.alpha * inst.mu);
  // Equality  <=>  sqrt(e^2+1)(e^2+1) = e(e^2+1) + k  <=>  m > 0 and m^2 = (e^2+1)^3.
  const BigRational m = e * e2p1 + k;
  const bool equality = sgn(m) > 0 && BigRational(m * m) == BigRational(e2p1 * e2p1 * e2p1);

  RealityCheck out;
  out.condition_holds = !equality;
  for (const auto& sq : {inst.lambda_squared(), inst.eta_squared()}) {
    for (auto& a : detail::order2_coefficients(r, sq)) out.alphas.push_back(std::move(a));
  }
  out.alphas_non_real = true;
  for (const auto& a : out.alphas) out.alphas_non_real = out.alphas_non_real && !is_real(a);
  return out;
}

/// Csc family on S2: eps < 0 against the non-reality of the coefficients at +-kappa.
inline RealityCheck check_reality_lemma_csc(const ProblemInstance& inst, const RatFunc& r) {
  detail::require_lemma_hypotheses(inst, Potential::CscFamily);
  RealityCheck out;
  out.condition_holds = sgn(inst.epsilon) < 0;
  out.alphas = detail::order2_coefficients(r, inst.kappa_squared());
  out.alphas_non_real = !is_real(out.alphas[0]) && !is_real(out.alphas[1]);

  const FieldElement im6 = detail::i_imaginary_part(out.alphas[0]);
  const FieldElement im7 = detail::i_imaginary_part(out.alphas[1]);
  out.imaginary_parts_opposite = (im6 == -im7);
  if (!inst.kappa_squared().is_zero()) {
    const FieldElement kappa = adjoin_sqrt(inst.kappa_squared());
    const FieldElement mu(inst.mu);
    const FieldElement expected = FieldElement(-2) * mu * (mu - FieldElement(1)) * FieldElement(inst.q()) / kappa;
    out.imaginary_part_formula = (im6 == expected);
  }
  return out;
}

inline RealityCheck check_reality_lemma_tan(const ProblemInstance& inst) {
  detail::require_lemma_hypotheses(inst, Potential::TanFamily);
  return check_reality_lemma_tan(inst, normal_form(inst, /*allow_coincident=*/true).r);
}

inline RealityCheck check_reality_lemma_csc(const ProblemInstance& inst) {
  detail::require_lemma_hypotheses(inst, Potential::CscFamily);
  return check_reality_lemma_csc(inst, normal_form(inst, /*allow_coincident=*/true).r);
}

/// Whichever lemma matches the instance's S2 family.
inline RealityCheck check_reality_lemma(const ProblemInstance& inst, const RatFunc& r) {
  return inst.potential == Potential::TanFamily ? check_reality_lemma_tan(inst, r) : check_reality_lemma_csc(inst, r);
}

}  // namespace nonint
