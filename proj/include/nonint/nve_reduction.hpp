#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "nonint/field_tower.hpp"
#include "nonint/rational_function.hpp"

namespace nonint {

enum class Space { Sphere, Hyperbolic };
enum class Potential { TanFamily, CscFamily };

inline std::string to_string(Space s) { return s == Space::Sphere ? "S2" : "H2"; }
inline std::string to_string(Potential p) { return p == Potential::TanFamily ? "tan" : "csc"; }

/// A violated standing hypothesis (mu, p or alpha equal to zero).
class InvalidParameters : public std::invalid_argument {
 public:
  explicit InvalidParameters(const std::string& what) : std::invalid_argument(what) {}
};

/// Two of the singular points q, +-lambda, +-eta, +-kappa coincide.
class CoincidentSingularities : public std::domain_error {
 public:
  explicit CoincidentSingularities(const std::string& what) : std::domain_error(what) {}
};

struct ProblemInstance {
  Space space = Space::Sphere;
  Potential potential = Potential::TanFamily;
  BigRational mu;
  BigRational p;
  BigRational alpha;
  BigRational epsilon;

  /// Instance at a prescribed energy level h = alpha*epsilon - mu*p^2/2.
  static ProblemInstance from_energy(Space s, Potential v, const BigRational& mu, const BigRational& p,
                                     const BigRational& alpha, const BigRational& energy) {
    if (is_zero(alpha)) throw InvalidParameters("alpha must be nonzero (m1*m2*alpha != 0)");
    BigRational eps = (energy + mu * p * p / 2) / alpha;
    eps.canonicalize();
    return {s, v, mu, p, alpha, eps};
  }

  BigRational energy() const {
    BigRational h = alpha * epsilon - mu * p * p / 2;
    h.canonicalize();
    return h;
  }

  void validate() const {
    if (is_zero(mu)) throw InvalidParameters("mu must be nonzero (mu = m1/(m1+m2) != 0)");
    if (is_zero(p)) throw InvalidParameters("p must be nonzero (gamma = p^2 > 0)");
    if (is_zero(alpha)) throw InvalidParameters("alpha must be nonzero (m1*m2*alpha != 0)");
  }

  /// mu = 1 means m2 = 0: the integrable one-body limit.
  bool degenerate() const { return mu == 1; }

  BigRational q() const { return BigRational(p * mu / alpha); }
  BigRational scale() const { return BigRational(2 * mu / alpha); }

  /// The "i-shifted" pair (eps +- i) belongs to S2/tan and H2/csc; the others use eps +- 1.
  bool complex_pair() const {
    return (space == Space::Sphere) == (potential == Potential::TanFamily);
  }

  FieldElement lambda_squared() const { return shifted(+1); }
  FieldElement eta_squared() const { return shifted(-1); }
  FieldElement kappa_squared() const { return FieldElement(BigRational(scale() * epsilon)); }

  std::string label() const {
    return to_string(space) + "/" + to_string(potential) + " mu=" + to_fraction_string(mu) +
           " p=" + to_fraction_string(p) + " alpha=" + to_fraction_string(alpha) +
           " eps=" + to_fraction_string(epsilon);
  }

 private:
  FieldElement shifted(int sign) const {
    const FieldElement shift = complex_pair() ? FieldElement(GaussianRational(0, sign)) : FieldElement(sign);
    return FieldElement(scale()) * (FieldElement(epsilon) + shift);
  }
};

/// Human-readable descriptions of every coincidence among q, +-lambda, +-eta, +-kappa.
inline std::vector<std::string> coincidences(const ProblemInstance& inst) {
  std::vector<std::string> out;
  const FieldElement q2(BigRational(inst.q() * inst.q()));
  const std::pair<const char*, FieldElement> squares[] = {
      {"lambda", inst.lambda_squared()}, {"eta", inst.eta_squared()}, {"kappa", inst.kappa_squared()}};
  for (const auto& [name, sq] : squares) {
    if (sq.is_zero()) out.push_back(std::string("+") + name + " and -" + name + " coincide at 0");
    if (sq == q2) out.push_back(std::string("q coincides with ") + name);
  }
  return out;
}

inline void check_distinct_singularities(const ProblemInstance& inst) {
  const auto clash = coincidences(inst);
  if (!clash.empty()) throw CoincidentSingularities("coincident singular points: " + clash.front());
}

/// p1' = A p1 + B w p2,  p2' = C w p1 - A p2, with w = sqrt(f) when radical_coupling and w = 1 otherwise.
struct FirstOrderNVE {
  RatFunc A, B, C, f;
  bool radical_coupling = false;
  bool degenerate = false;
  /// Monic factors carrying the poles, in the order q, lambda, eta, kappa; empty when unknown.
  std::vector<Poly> pole_basis;
  /// The orbit-level relation between theta and z.
  std::string orbit_relation;
};

namespace detail {

inline RatFunc constant(const BigRational& x) { return RatFunc(FieldElement(x)); }

inline Poly z_squared_minus(const FieldElement& w) { return Poly{-w, FieldElement(0), FieldElement(1)}; }

}  // namespace detail

inline std::vector<Poly> instance_pole_basis(const ProblemInstance& inst) {
  return {Poly::linear_factor(FieldElement(inst.q())), detail::z_squared_minus(inst.lambda_squared()),
          detail::z_squared_minus(inst.eta_squared()), detail::z_squared_minus(inst.kappa_squared())};
}

/// Coefficients of the normal variational system in the variable z = (p_theta + mu p)/alpha.
/// Coincident singular points are rejected unless `allow_coincident` is set.
inline FirstOrderNVE build_first_order(const ProblemInstance& inst, bool allow_coincident = false) {
  inst.validate();
  if (!allow_coincident) check_distinct_singularities(inst);

  using detail::constant;
  const RatFunc z = RatFunc::variable();
  const RatFunc one(FieldElement(1));
  const RatFunc mu = constant(inst.mu), p = constant(inst.p), alpha = constant(inst.alpha);
  const RatFunc eps = constant(inst.epsilon);
  const RatFunc twomu = constant(BigRational(2 * inst.mu));
  const RatFunc c_num = alpha * z - mu * p;

  FirstOrderNVE sys;
  sys.degenerate = inst.degenerate();
  if (!allow_coincident) sys.pole_basis = instance_pole_basis(inst);

  if (inst.potential == Potential::TanFamily) {
    const RatFunc f = eps - alpha * z * z / twomu;
    const RatFunc f2 = f * f;
    sys.f = f;
    if (inst.space == Space::Sphere) {
      sys.A = p / (f * (one + f2));
      sys.B = p / (mu * f2) + (( mu - constant(2)) * p - alpha * z) / (one + f2);
      sys.C = c_num / (one + f2);
      sys.orbit_relation = "tan(theta) = f(z) = eps - alpha z^2/(2 mu)";
    } else {
      sys.A = p / (f * (one - f2));
      sys.B = (constant(2) * p + alpha * z - mu * p + p / (mu * f2) - p / mu) / (one - f2);
      sys.C = c_num / (one - f2);
      sys.orbit_relation = "tanh(theta) = f(z) = eps - alpha z^2/(2 mu)";
    }
    // tan family: no radical coupling, f only records the orbit relation
    sys.f = f;
    return sys;
  }

  const RatFunc phi = alpha * z * z / twomu - eps;
  const RatFunc phi2 = phi * phi;
  sys.radical_coupling = true;
  sys.A = p / phi;
  if (inst.space == Space::Sphere) {
    sys.f = phi2 - one;
    sys.B = (p * phi2 / mu + (mu - constant(2)) * p - alpha * z) / (phi * sys.f);
    sys.orbit_relation = "1/sin(theta) = phi(z) = alpha z^2/(2 mu) - eps";
  } else {
    sys.f = phi2 + one;
    sys.B = (p * phi2 / mu + (constant(2) - mu) * p + alpha * z) / (phi * sys.f);
    sys.orbit_relation = "1/sinh(theta) = -phi(z) = eps - alpha z^2/(2 mu)";
  }
  sys.C = c_num / (phi * sys.f);
  return sys;
}

struct SecondOrderCoefficients {
  RatFunc coeff1;  // p2'' = coeff1 p2' + coeff0 p2
  RatFunc coeff0;
};

/// Eliminates p1 from the first-order system.
inline SecondOrderCoefficients reduce_to_second_order(const FirstOrderNVE& sys) {
  if (sys.C.is_zero()) throw std::domain_error("C vanishes identically; p1 cannot be eliminated");
  RatFunc c1 = sys.C.log_derivative();
  if (sys.radical_coupling) c1 += sys.f.log_derivative() * RatFunc(FieldElement(BigRational(1, 2)));
  const RatFunc cb = sys.radical_coupling ? sys.C * sys.B * sys.f : sys.C * sys.B;
  RatFunc c0 = c1 * sys.A + sys.A * sys.A + cb - sys.A.derivative();
  return {std::move(c1), std::move(c0)};
}

struct NormalFormODE {
  RatFunc r;  // y'' = r y
  std::vector<Poly> pole_basis;
  bool radical_coupling = false;
  /// Each step of the substitution chain, in order.
  std::vector<std::string> substitution_record;
};

/// y = p2 / (sqrt(C) f^(1/4)) (the f factor only with radical coupling) turns the
/// second-order equation into y'' = r y.
inline NormalFormODE to_normal_form(const FirstOrderNVE& sys) {
  const auto [c1, c0] = reduce_to_second_order(sys);
  const RatFunc quarter(FieldElement(BigRational(1, 4)));
  const RatFunc half(FieldElement(BigRational(1, 2)));
  NormalFormODE ode;
  ode.r = c0 + quarter * c1 * c1 - half * c1.derivative();
  ode.pole_basis = sys.pole_basis;
  ode.radical_coupling = sys.radical_coupling;
  ode.substitution_record = {
      "time -> z = (p_theta + mu p)/alpha; " + (sys.orbit_relation.empty() ? std::string("custom system")
                                                                           : sys.orbit_relation),
      sys.radical_coupling ? "eliminate p1: p1 = (p2' + A p2)/(C sqrt(f))" : "eliminate p1: p1 = (p2' + A p2)/C",
      sys.radical_coupling ? "scale: y = p2 / (sqrt(C) f^(1/4))" : "scale: y = p2 / sqrt(C)",
  };
  return ode;
}

/// Full construction for an instance.
inline NormalFormODE normal_form(const ProblemInstance& inst, bool allow_coincident = false) {
  return to_normal_form(build_first_order(inst, allow_coincident));
}

/// Partial fractions of r over the recorded pole basis (or a computed one when none is recorded).
inline PartialFractionForm pole_data(const NormalFormODE& ode, const std::vector<bool>& flips = {}) {
  if (ode.pole_basis.empty()) return partial_fractions(ode.r);
  return partial_fractions(ode.r, ode.pole_basis, flips);
}

}  // namespace nonint
