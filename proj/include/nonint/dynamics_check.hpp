#pragma once

// Numerical cross-validation of the exact pipeline: integrate the reduced Hamiltonian flow and the
// time-domain variational equations in extended precision, then confirm that the substitution chain
// lands on y'' = r(z) y.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "nonint/field_tower.hpp"
#include "nonint/nve_reduction.hpp"
#include "nonint/rational_function.hpp"

namespace nonint {

using Real = long double;

/// The state left the configuration interval I (or a chart-limiting margin).
class OutsideChart : public std::domain_error {
 public:
  explicit OutsideChart(const std::string& what) : std::domain_error(what) {}
};

/// The substitution y = p2/(sqrt(C) f^(1/4)) is singular on the requested arc.
class SingularSubstitution : public std::domain_error {
 public:
  explicit SingularSubstitution(const std::string& what) : std::domain_error(what) {}
};

/// z(t) is not monotone on the requested arc.
class TurningPointInArc : public std::domain_error {
 public:
  explicit TurningPointInArc(const std::string& what) : std::domain_error(what) {}
};

// ---------------------------------------------------------------- Poisson structure

// Coordinates are indexed theta, p_theta, p0, p1, p2.
enum Coord : int { kTheta = 0, kPTheta = 1, kP0 = 2, kP1 = 3, kP2 = 4 };
using FullState = std::array<Real, 5>;

struct PoissonStructure {
  /// {x_i, x_j} = constant + sum_k coeff[k] x_k, integer structure constants.
  struct Linear {
    int constant = 0;
    std::array<int, 5> coeff{};
  };

  Space space = Space::Sphere;
  std::array<std::array<Linear, 5>, 5> table{};

  static PoissonStructure of(Space s) {
    PoissonStructure ps;
    ps.space = s;
    auto set = [&ps](int i, int j, Linear v) {
      ps.table[i][j] = v;
      Linear neg;
      neg.constant = -v.constant;
      for (int k = 0; k < 5; ++k) neg.coeff[k] = -v.coeff[k];
      ps.table[j][i] = neg;
    };
    auto coord = [](int k, int sign) {
      Linear l;
      l.coeff[k] = sign;
      return l;
    };
    set(kTheta, kPTheta, Linear{1, {}});
    if (s == Space::Sphere) {
      set(kP0, kP1, coord(kP2, -1));  // {p0,p1} = -p2
      set(kP1, kP2, coord(kP0, -1));  // {p1,p2} = -p0
      set(kP2, kP0, coord(kP1, -1));  // {p2,p0} = -p1
    } else {
      set(kP0, kP1, coord(kP2, +1));  // {p0,p1} = p2
      set(kP1, kP2, coord(kP0, -1));  // {p1,p2} = -p0
      set(kP0, kP2, coord(kP1, +1));  // {p0,p2} = p1
    }
    return ps;
  }

  /// +1 on S2, -1 on H2: the Casimir is p0^2 + p1^2 + sign p2^2.
  int casimir_sign() const { return space == Space::Sphere ? 1 : -1; }

  Real casimir(const FullState& x) const {
    return x[kP0] * x[kP0] + x[kP1] * x[kP1] + casimir_sign() * x[kP2] * x[kP2];
  }

  Real bracket(int i, int j, const FullState& x) const {
    const Linear& l = table[i][j];
    Real v = l.constant;
    for (int k = 0; k < 5; ++k) v += l.coeff[k] * x[k];
    return v;
  }

  bool antisymmetric() const {
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        if (table[i][j].constant != -table[j][i].constant) return false;
        for (int k = 0; k < 5; ++k) {
          if (table[i][j].coeff[k] != -table[j][i].coeff[k]) return false;
        }
      }
    }
    return true;
  }

  /// {x_i,{x_j,x_k}} + cyclic, exactly; brackets are linear, so each term is a linear form.
  bool satisfies_jacobi() const {
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        for (int k = 0; k < 5; ++k) {
          Linear total;
          for (const auto& [a, b, c] : {std::array{i, j, k}, std::array{j, k, i}, std::array{k, i, j}}) {
            const Linear& inner = table[b][c];
            for (int l = 0; l < 5; ++l) {
              if (inner.coeff[l] == 0) continue;
              const Linear& outer = table[a][l];
              total.constant += inner.coeff[l] * outer.constant;
              for (int m = 0; m < 5; ++m) total.coeff[m] += inner.coeff[l] * outer.coeff[m];
            }
          }
          if (total.constant != 0) return false;
          for (int m = 0; m < 5; ++m) {
            if (total.coeff[m] != 0) return false;
          }
        }
      }
    }
    return true;
  }

  /// {casimir, x_j} == 0 as a polynomial identity, for every coordinate.
  bool casimir_is_central() const {
    const std::array<int, 5> grad_coeff{0, 0, 2, 2, 2 * casimir_sign()};  // d casimir/dx_i = grad_coeff[i] x_i
    for (int j = 0; j < 5; ++j) {
      // quadratic form in (x_0..x_4, 1); index 5 is the constant monomial
      std::array<std::array<int, 6>, 6> q{};
      for (int i = 0; i < 5; ++i) {
        if (grad_coeff[i] == 0) continue;
        const Linear& b = table[i][j];
        q[i][5] += grad_coeff[i] * b.constant;
        for (int m = 0; m < 5; ++m) q[std::min(i, m)][std::max(i, m)] += grad_coeff[i] * b.coeff[m];
      }
      for (const auto& row : q) {
        for (int v : row) {
          if (v != 0) return false;
        }
      }
    }
    return true;
  }
};

// ---------------------------------------------------------------- Hamiltonian

struct PotentialValues {
  Real v, dv, d2v;
};

namespace detail {

inline Real to_real(const BigRational& x) { return to_long_double(x); }

struct InstanceReals {
  Real mu, p, alpha, epsilon;
  explicit InstanceReals(const ProblemInstance& inst)
      : mu(to_real(inst.mu)), p(to_real(inst.p)), alpha(to_real(inst.alpha)), epsilon(to_real(inst.epsilon)) {}
};

}  // namespace detail

/// V = alpha tan(theta), -alpha/sin(theta) on S2; alpha tanh(theta), alpha/sinh(theta) on H2.
inline PotentialValues potential(const ProblemInstance& inst, Real theta) {
  const Real a = detail::to_real(inst.alpha);
  if (inst.space == Space::Sphere) {
    const Real s = std::sin(theta), c = std::cos(theta);
    if (inst.potential == Potential::TanFamily) {
      const Real sec2 = 1 / (c * c);
      return {a * s / c, a * sec2, 2 * a * sec2 * s / c};
    }
    return {-a / s, a * c / (s * s), a * (s * s + 2 * c * c) / (s * s * s)};
  }
  const Real s = std::sinh(theta), c = std::cosh(theta);
  if (inst.potential == Potential::TanFamily) {
    const Real sech2 = 1 / (c * c);
    return {a * s / c, a * sech2, -2 * a * sech2 * s / c};
  }
  return {a / s, -a * c / (s * s), a * (s * s + 2 * c * c) / (s * s * s)};
}

inline bool in_interval(Space s, Real theta) {
  return theta > 0 && (s == Space::Hyperbolic ? std::isfinite(theta) : theta < std::numbers::pi_v<Real>);
}

namespace detail {

inline void require_chart(const ProblemInstance& inst, Real theta) {
  if (!in_interval(inst.space, theta)) {
    throw OutsideChart("theta = " + std::to_string(static_cast<double>(theta)) + " is outside " +
                       (inst.space == Space::Sphere ? "(0, pi)" : "(0, inf)"));
  }
}

// sin/cos on S2, sinh/cosh on H2
inline std::pair<Real, Real> trig(Space s, Real theta) {
  return s == Space::Sphere ? std::pair{std::sin(theta), std::cos(theta)}
                            : std::pair{std::sinh(theta), std::cosh(theta)};
}

}  // namespace detail

/// h = (1/2mu)(p_theta^2 + p2^2/s^2) + p_theta p0 -+ p2^2 + p1 p2 c/s + V(theta), s,c = sin,cos (S2) or sinh,cosh (H2).
inline Real hamiltonian(const ProblemInstance& inst, const FullState& x) {
  detail::require_chart(inst, x[kTheta]);
  const detail::InstanceReals k(inst);
  const auto [s, c] = detail::trig(inst.space, x[kTheta]);
  const Real sign = inst.space == Space::Sphere ? -1 : 1;
  return (x[kPTheta] * x[kPTheta] + x[kP2] * x[kP2] / (s * s)) / (2 * k.mu) + x[kPTheta] * x[kP0] +
         sign * x[kP2] * x[kP2] + x[kP1] * x[kP2] * c / s + potential(inst, x[kTheta]).v;
}

inline FullState hamiltonian_gradient(const ProblemInstance& inst, const FullState& x) {
  detail::require_chart(inst, x[kTheta]);
  const detail::InstanceReals k(inst);
  const auto [s, c] = detail::trig(inst.space, x[kTheta]);
  const Real sign = inst.space == Space::Sphere ? -1 : 1;
  const Real cot = c / s;
  FullState g{};
  // d/dtheta of 1/s^2 is -2c/s^3, of c/s is -1/s^2 (both spaces).
  g[kTheta] = x[kP2] * x[kP2] / (2 * k.mu) * (-2 * c / (s * s * s)) - x[kP1] * x[kP2] / (s * s) +
              potential(inst, x[kTheta]).dv;
  g[kPTheta] = x[kPTheta] / k.mu + x[kP0];
  g[kP0] = x[kPTheta];
  g[kP1] = x[kP2] * cot;
  g[kP2] = x[kP2] / (k.mu * s * s) + 2 * sign * x[kP2] + x[kP1] * cot;
  return g;
}

/// x_i' = sum_j {x_i, x_j} dh/dx_j.
inline FullState hamiltonian_rhs(const PoissonStructure& ps, const ProblemInstance& inst, const FullState& x) {
  const FullState g = hamiltonian_gradient(inst, x);
  FullState dx{};
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) dx[i] += ps.bracket(i, j, x) * g[j];
  }
  return dx;
}

struct OrbitState {
  Real t = 0;
  Real theta = 0;
  Real p_theta = 0;
  Real p0 = 0, p1 = 0, p2 = 0;

  FullState full() const { return {theta, p_theta, p0, p1, p2}; }
};

inline Real z_of(const ProblemInstance& inst, Real p_theta) {
  const detail::InstanceReals k(inst);
  return (p_theta + k.mu * k.p) / k.alpha;
}

/// tan/tanh(theta) - f(z), or 1/sin(theta) - phi(z), 1/sinh(theta) + phi(z), scaled by max(1, |value|).
inline Real orbit_relation_residual(const ProblemInstance& inst, Real theta, Real z) {
  const detail::InstanceReals k(inst);
  const Real f = k.epsilon - k.alpha * z * z / (2 * k.mu);
  Real lhs = 0;
  if (inst.potential == Potential::TanFamily) {
    lhs = inst.space == Space::Sphere ? std::tan(theta) : std::tanh(theta);
  } else {
    lhs = inst.space == Space::Sphere ? -1 / std::sin(theta) : 1 / std::sinh(theta);  // both compare with f = -phi
  }
  return std::fabs(lhs - f) / std::max<Real>(1, std::fabs(f));
}

/// The geodesic-slice state at a given z, or nothing when z is not on the orbit.
/// On S2/csc two angles share one z; `upper` picks the one in (pi/2, pi).
inline std::optional<OrbitState> geodesic_state_at(const ProblemInstance& inst, Real z, bool upper = false) {
  const detail::InstanceReals k(inst);
  const Real f = k.epsilon - k.alpha * z * z / (2 * k.mu);
  Real theta = std::numeric_limits<Real>::quiet_NaN();
  if (inst.space == Space::Sphere) {
    if (inst.potential == Potential::TanFamily) {
      if (f == 0) return std::nullopt;
      theta = f > 0 ? std::atan(f) : std::numbers::pi_v<Real> + std::atan(f);
    } else {
      if (-f < 1) return std::nullopt;  // 1/sin(theta) = phi = -f >= 1
      theta = std::asin(-1 / f);
      if (upper) theta = std::numbers::pi_v<Real> - theta;
    }
  } else {
    if (inst.potential == Potential::TanFamily) {
      if (!(f > 0 && f < 1)) return std::nullopt;
      theta = std::atanh(f);
    } else {
      if (!(f > 0)) return std::nullopt;
      theta = std::asinh(1 / f);
    }
  }
  OrbitState s;
  s.theta = theta;
  s.p_theta = k.alpha * z - k.mu * k.p;
  s.p0 = k.p;
  return s;
}

// ---------------------------------------------------------------- integration

struct DynamicsOptions {
  Real abs_tol = 1e-16L;
  Real rel_tol = 1e-15L;      // local error; well inside the 1e-12 requirement on the variational flow
  Real theta_margin = 1e-2L;  // stop this close to a finite end of I
  Real theta_ceiling = 10;    // H2 only: treat theta beyond this as leaving the chart
  Real horizon = 50;
  Real singular_clearance = 0.05L;  // grid points keep this z-distance from singular points
  int grid_points = 400;
  int min_grid_points = 200;
  Real stencil_step = 1e-3L;  // in z
  Real chain_threshold = 1e-6L;
  Real energy_threshold = 1e-10L;
  Real casimir_threshold = 1e-9L;
  Real determinant_threshold = 1e-9L;
  Real relation_threshold = 1e-8L;
};

namespace detail {

inline bool usable(const ProblemInstance& inst, Real theta, const DynamicsOptions& o) {
  if (!in_interval(inst.space, theta)) return false;
  if (theta < o.theta_margin) return false;
  if (inst.space == Space::Sphere) {
    // tan has a pole at pi/2 inside I; the flow is not integrable through it
    if (inst.potential == Potential::TanFamily && std::fabs(theta - std::numbers::pi_v<Real> / 2) < o.theta_margin) {
      return false;
    }
    return theta < std::numbers::pi_v<Real> - o.theta_margin;
  }
  return theta < o.theta_ceiling;
}

/// Adaptive RKF7(8) integration that stops where `keep_going` fails.  Each accepted step is reported.
template <std::size_t N, class Rhs, class Keep, class Observe>
std::pair<bool, Real> integrate_until(Rhs rhs, std::array<Real, N>& x, Real t0, Real t1, const DynamicsOptions& o,
                                      Keep keep_going, Observe observe) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<Real, N>;
  auto stepper = ode::make_controlled(o.abs_tol, o.rel_tol, ode::runge_kutta_fehlberg78<State, Real>());
  auto system = [&rhs](const State& s, State& ds, Real) { ds = rhs(s); };
  Real t = t0;
  Real dt = std::min<Real>(1e-3L, (t1 - t0) / 4);
  observe(t, x);
  while (t < t1) {
    dt = std::min(dt, t1 - t);
    State trial = x;
    Real t_trial = t;
    Real dt_trial = dt;
    bool inside = true;
    try {
      if (stepper.try_step(system, trial, t_trial, dt_trial) == ode::fail) {
        if (dt_trial < 1e-14L) return {true, t};  // step size collapsed: stiff blow-up
        dt = dt_trial;
        continue;
      }
    } catch (const OutsideChart&) {
      inside = false;  // a stage left I: treat like a step past the boundary
    }
    if (!inside || !keep_going(trial)) {
      if (dt < 1e-10L) return {true, t};
      dt /= 2;
      continue;
    }
    x = trial;
    t = t_trial;
    dt = dt_trial;
    observe(t, x);
  }
  return {false, t};
}

}  // namespace detail

struct FullRunReport {
  Real t_end = 0;
  bool truncated = false;
  Real max_casimir_drift = 0;  // relative to max(1, |casimir(0)|)
  Real max_energy_drift = 0;   // relative to max(1, |h(0)|)
};

/// The full five-dimensional flow from arbitrary (off-geodesic) data.
inline FullRunReport integrate_full(const PoissonStructure& ps, const ProblemInstance& inst, FullState x,
                                    Real horizon, const DynamicsOptions& o = {}) {
  const Real cas0 = ps.casimir(x);
  const Real h0 = hamiltonian(inst, x);
  FullRunReport rep;
  const auto [truncated, t_end] = detail::integrate_until<5>(
      [&](const FullState& s) { return hamiltonian_rhs(ps, inst, s); }, x, 0, horizon, o,
      [&](const FullState& s) { return detail::usable(inst, s[kTheta], o); },
      [&](Real, const FullState& s) {
        rep.max_casimir_drift =
            std::max(rep.max_casimir_drift, std::fabs(ps.casimir(s) - cas0) / std::max<Real>(1, std::fabs(cas0)));
        rep.max_energy_drift =
            std::max(rep.max_energy_drift, std::fabs(hamiltonian(inst, s) - h0) / std::max<Real>(1, std::fabs(h0)));
      });
  rep.truncated = truncated;
  rep.t_end = t_end;
  return rep;
}

struct OrbitSample {
  Real t, theta, p_theta, z, zdot, energy;
};

struct Trajectory {
  std::vector<OrbitSample> samples;  // one per accepted step
  bool truncated = false;
  std::string truncation;            // why integration stopped early
  Real max_energy_drift = 0;         // relative to max(1, |h(0)|)
  Real max_relation_residual = 0;
  Real max_casimir_drift = 0;
};

/// Geodesic orbit p1 = p2 = 0, p0 = p under the full flow, recording z(t) = (p_theta + mu p)/alpha.
inline Trajectory integrate_orbit(const ProblemInstance& inst, const OrbitState& initial, Real horizon,
                                  const DynamicsOptions& o = {}) {
  const detail::InstanceReals k(inst);
  if (initial.p1 != 0 || initial.p2 != 0 || initial.p0 != k.p) {
    throw std::invalid_argument("initial state must lie on the geodesic slice p1 = p2 = 0, p0 = p");
  }
  if (!detail::usable(inst, initial.theta, o)) throw OutsideChart("initial angle outside the usable chart");
  const PoissonStructure ps = PoissonStructure::of(inst.space);
  FullState x = initial.full();
  const Real h0 = hamiltonian(inst, x);
  const Real cas0 = ps.casimir(x);
  Trajectory traj;
  const auto [truncated, t_end] = detail::integrate_until<5>(
      [&](const FullState& s) { return hamiltonian_rhs(ps, inst, s); }, x, initial.t, initial.t + horizon, o,
      [&](const FullState& s) { return detail::usable(inst, s[kTheta], o); },
      [&](Real t, const FullState& s) {
        const Real z = z_of(inst, s[kPTheta]);
        const Real h = hamiltonian(inst, s);
        const FullState ds = hamiltonian_rhs(ps, inst, s);
        traj.samples.push_back({t, s[kTheta], s[kPTheta], z, ds[kPTheta] / k.alpha, h});
        traj.max_energy_drift = std::max(traj.max_energy_drift, std::fabs(h - h0) / std::max<Real>(1, std::fabs(h0)));
        traj.max_relation_residual = std::max(traj.max_relation_residual, orbit_relation_residual(inst, s[kTheta], z));
        traj.max_casimir_drift =
            std::max(traj.max_casimir_drift, std::fabs(ps.casimir(s) - cas0) / std::max<Real>(1, std::fabs(cas0)));
      });
  traj.truncated = truncated;
  if (truncated) {
    traj.truncation = "theta left the usable part of I at t = " + std::to_string(static_cast<double>(t_end));
  }
  return traj;
}

// ---------------------------------------------------------------- variational equations in time

/// S2: p1' = -p cot p1 + (2p + p_theta - p/(mu sin^2)) p2,   p2' = -p_theta p1 + p cot p2.
/// H2: p1' = -p coth p1 - (2p + p_theta + p/(mu sinh^2)) p2, p2' = -p_theta p1 + p coth p2.
inline std::array<std::array<Real, 2>, 2> nve_time_matrix(const ProblemInstance& inst, Real theta, Real p_theta) {
  detail::require_chart(inst, theta);
  const detail::InstanceReals k(inst);
  const auto [s, c] = detail::trig(inst.space, theta);
  const Real cot = c / s;
  const Real b = inst.space == Space::Sphere ? 2 * k.p + p_theta - k.p / (k.mu * s * s)
                                             : -(2 * k.p + p_theta + k.p / (k.mu * s * s));
  return {{{-k.p * cot, b}, {-p_theta, k.p * cot}}};
}

// orbit (theta, p_theta) followed by Phi in column-major order (Phi11, Phi21, Phi12, Phi22)
using NveState = std::array<Real, 6>;

inline NveState nve_rhs(const ProblemInstance& inst, const NveState& x) {
  const detail::InstanceReals k(inst);
  const PoissonStructure ps = PoissonStructure::of(inst.space);
  const FullState full{x[0], x[1], k.p, 0, 0};
  const FullState d = hamiltonian_rhs(ps, inst, full);
  const auto m = nve_time_matrix(inst, x[0], x[1]);
  NveState dx{};
  dx[0] = d[kTheta];
  dx[1] = d[kPTheta];
  for (int col = 0; col < 2; ++col) {
    const Real p1 = x[2 + 2 * col], p2 = x[3 + 2 * col];
    dx[2 + 2 * col] = m[0][0] * p1 + m[0][1] * p2;
    dx[3 + 2 * col] = m[1][0] * p1 + m[1][1] * p2;
  }
  return dx;
}

struct NveSample {
  Real t, z;
  std::array<std::array<Real, 2>, 2> phi;
  Real det;
};

struct NveSolution {
  std::vector<NveSample> samples;
  Real max_det_deviation = 0;  // |det Phi - 1|
};

inline NveSample nve_sample(const ProblemInstance& inst, Real t, const NveState& x) {
  NveSample s{t, z_of(inst, x[1]), {{{x[2], x[4]}, {x[3], x[5]}}}, 0};
  s.det = x[2] * x[5] - x[4] * x[3];
  return s;
}

/// Fundamental matrix along a trajectory from integrate_orbit, Phi(t0) = identity.
inline NveSolution integrate_nve_time(const ProblemInstance& inst, const Trajectory& traj,
                                      const DynamicsOptions& o = {}) {
  if (traj.samples.size() < 2) throw std::invalid_argument("trajectory too short");
  const OrbitSample& first = traj.samples.front();
  NveState x{first.theta, first.p_theta, 1, 0, 0, 1};
  NveSolution sol;
  detail::integrate_until<6>(
      [&](const NveState& s) { return nve_rhs(inst, s); }, x, first.t, traj.samples.back().t, o,
      [&](const NveState& s) {
        if (!detail::usable(inst, s[0], o)) throw OutsideChart("variational flow propagated across a theta boundary");
        return true;
      },
      [&](Real t, const NveState& s) {
        sol.samples.push_back(nve_sample(inst, t, s));
        sol.max_det_deviation = std::max(sol.max_det_deviation, std::fabs(sol.samples.back().det - 1));
      });
  return sol;
}

// ---------------------------------------------------------------- substitution chain

namespace detail {

inline std::vector<std::complex<Real>> complex_coefficients(const Poly& p) {
  std::vector<std::complex<Real>> out;
  for (const auto& c : p.coefficients()) out.push_back(c.to_complex());
  return out;
}

inline std::complex<Real> horner(const std::vector<std::complex<Real>>& c, Real z) {
  std::complex<Real> v = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * z + *it;
  return v;
}

}  // namespace detail

/// A rational function evaluated in extended precision on the real line.
class RealEvaluator {
 public:
  RealEvaluator() = default;
  explicit RealEvaluator(const RatFunc& f)
      : num_(detail::complex_coefficients(f.numerator())), den_(detail::complex_coefficients(f.denominator())) {}
  Real operator()(Real z) const { return (detail::horner(num_, z) / detail::horner(den_, z)).real(); }

 private:
  std::vector<std::complex<Real>> num_, den_;
};

/// Everything compare_chain needs: a time-domain flow on (orbit, Phi), the map to z, and the
/// z-domain data of the substitution y = p2 / (sqrt(C) f^(1/4)).
struct ChainModel {
  std::function<NveState(const NveState&)> rhs;
  std::function<Real(const NveState&)> z;
  std::function<bool(const NveState&)> admissible;
  RatFunc C, f, r;
  bool radical_coupling = false;
  std::vector<Real> real_singular_points;
  std::vector<std::complex<Real>> singular_points;
};

inline ChainModel chain_model(const ProblemInstance& inst, const DynamicsOptions& o = {}) {
  const FirstOrderNVE sys = build_first_order(inst, /*allow_coincident=*/true);
  ChainModel m;
  m.rhs = [inst](const NveState& s) { return nve_rhs(inst, s); };
  m.z = [inst](const NveState& s) { return z_of(inst, s[1]); };
  m.admissible = [inst, o](const NveState& s) { return detail::usable(inst, s[0], o); };
  m.C = sys.C;
  m.f = sys.f;
  m.radical_coupling = sys.radical_coupling;
  m.r = to_normal_form(sys).r;
  for (const auto& factor : instance_pole_basis(inst)) {
    for (const auto& root : factor_roots(factor)) {
      const auto c = root.to_complex();
      m.singular_points.push_back(c);
      if (is_real(root)) m.real_singular_points.push_back(c.real());
    }
  }
  return m;
}

/// A = 0, B = C = 1 with z = t: p1' = p2, p2' = p1, so y = p2 solves y'' = y.
inline ChainModel constant_chain_model() {
  ChainModel m;
  m.rhs = [](const NveState& s) { return NveState{1, 0, s[3], s[2], s[5], s[4]}; };
  m.z = [](const NveState& s) { return s[0]; };
  m.admissible = [](const NveState&) { return true; };
  m.C = RatFunc(FieldElement(1));
  m.f = RatFunc(FieldElement(1));
  m.r = RatFunc(FieldElement(1));
  return m;
}

struct ArcReport {
  Real t_begin = 0, t_end = 0;
  Real z_begin = 0, z_end = 0;
  int points = 0;
  Real max_abs_deviation = 0;
  Real scale = 0;              // max |y''| over the grid
  Real max_rel_deviation = 0;  // max_abs_deviation / scale
  bool evaluated = false;
  std::string note;
};

namespace detail {

template <class Rhs>
std::vector<NveState> integrate_at(Rhs rhs, NveState x, std::vector<Real> times, const DynamicsOptions& o) {
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled(o.abs_tol, o.rel_tol, ode::runge_kutta_fehlberg78<NveState, Real>());
  auto system = [&rhs](const NveState& s, NveState& ds, Real) { ds = rhs(s); };
  std::vector<NveState> out;
  const Real dt0 = times.size() > 1 ? std::min<Real>((times[1] - times[0]) / 4, 1e-6L) : Real(1e-6L);
  ode::integrate_times(stepper, system, x, times.begin(), times.end(), dt0,
                       [&out](const NveState& s, Real) { out.push_back(s); });
  return out;
}

}  // namespace detail

/// y'' - r y on a grid of centres spread uniformly in z over [t_a, t_b].  y'' is taken numerically:
/// five-point stencils of the integrated p2 and z at equal z-spacing (o.stencil_step), then
/// y_zz = (y_tt z_t - y_t z_tt) / z_t^3.  Both columns of Phi are tested.
inline ArcReport compare_chain(const ChainModel& m, const NveState& start, Real t_start, Real t_a, Real t_b,
                               const DynamicsOptions& o = {}) {
  ArcReport rep;
  rep.t_begin = t_a;
  rep.t_end = t_b;
  if (!(t_b > t_a)) throw std::invalid_argument("empty arc");

  // Pass 1: a fine table of the flow over the arc.
  const int fine = 20 * o.grid_points;
  std::vector<Real> times{t_start};
  for (int k = 0; k <= fine; ++k) times.push_back(t_a + (t_b - t_a) * k / fine);
  if (times[1] == t_start) times.erase(times.begin());
  std::vector<NveState> table = detail::integrate_at(m.rhs, start, times, o);
  if (times.front() != t_a) {
    table.erase(table.begin());
    times.erase(times.begin());
  }
  for (const auto& s : table) {
    if (!m.admissible(s)) throw OutsideChart("chain arc leaves the chart");
  }
  std::vector<Real> zs;
  for (const auto& s : table) zs.push_back(m.z(s));
  rep.z_begin = zs.front();
  rep.z_end = zs.back();

  const RealEvaluator C(m.C), f(m.f), r(m.r);
  const Real direction = rep.z_end > rep.z_begin ? 1 : -1;
  for (std::size_t k = 0; k + 1 < zs.size(); ++k) {
    if ((zs[k + 1] - zs[k]) * direction < 0) throw TurningPointInArc("z(t) is not monotone on the arc");
    if (C(zs[k]) == 0 || (C(zs[k]) > 0) != (C(zs[k + 1]) > 0)) {
      throw SingularSubstitution("C(z) vanishes on the arc; sqrt(C) is singular there");
    }
  }
  auto g = [&](Real z) {
    Real v = 1 / std::sqrt(std::fabs(C(z)));
    if (m.radical_coupling) v /= std::sqrt(std::sqrt(std::fabs(f(z))));
    return v;
  };
  auto clear_of_singularities = [&](Real z) {
    if (std::fabs(z - rep.z_begin) < o.singular_clearance || std::fabs(z - rep.z_end) < o.singular_clearance) {
      return false;
    }
    for (const auto& sp : m.singular_points) {
      if (std::abs(std::complex<Real>(z) - sp) < o.singular_clearance) return false;
    }
    return true;
  };
  auto d1 = [](const std::array<Real, 5>& v, Real h) { return (v[0] - 8 * v[1] + 8 * v[3] - v[4]) / (12 * h); };
  auto d2 = [](const std::array<Real, 5>& v, Real h) {
    return (-v[0] + 16 * v[1] - 30 * v[2] + 16 * v[3] - v[4]) / (12 * h * h);
  };
  auto backward = [&m](const NveState& s) {
    NveState d = m.rhs(s);
    for (auto& v : d) v = -v;
    return d;
  };

  // Pass 2: centres uniform in z, each with its own short stencil integrations.
  std::vector<std::array<Real, 2>> residuals;
  std::array<Real, 2> scale{0, 0};
  std::size_t i = 1;
  for (int k = 0; k < o.grid_points; ++k) {
    const Real target = rep.z_begin + (rep.z_end - rep.z_begin) * (k + Real(0.5)) / o.grid_points;
    while (i + 1 < zs.size() && (zs[i] - target) * direction < 0) ++i;
    if (i + 1 >= zs.size() || !clear_of_singularities(target)) continue;
    // centre time by linear interpolation in the table, then integrate onto it exactly
    const Real w = (target - zs[i - 1]) / (zs[i] - zs[i - 1]);
    const Real tc = times[i - 1] + w * (times[i] - times[i - 1]);
    const NveState centre = tc > times[i - 1] ? detail::integrate_at(m.rhs, table[i - 1], {times[i - 1], tc}, o)[1]
                                              : table[i - 1];
    const Real zt_estimate = (zs[i] - zs[i - 1]) / (times[i] - times[i - 1]);
    if (zt_estimate == 0) continue;
    const Real h = o.stencil_step / std::fabs(zt_estimate);
    if (tc - 2 * h < t_a || tc + 2 * h > t_b) continue;

    const auto ahead = detail::integrate_at(m.rhs, centre, {0, h, 2 * h}, o);
    const auto behind = detail::integrate_at(backward, centre, {0, h, 2 * h}, o);
    const std::array<const NveState*, 5> st{&behind[2], &behind[1], &centre, &ahead[1], &ahead[2]};
    std::array<Real, 5> z5{};
    std::array<std::array<Real, 5>, 2> y5{};
    for (int j = 0; j < 5; ++j) {
      z5[j] = m.z(*st[j]);
      y5[0][j] = (*st[j])[3] * g(z5[j]);
      y5[1][j] = (*st[j])[5] * g(z5[j]);
    }
    const Real zt = d1(z5, h), ztt = d2(z5, h);
    std::array<Real, 2> res{};
    for (int col = 0; col < 2; ++col) {
      const Real yzz = (d2(y5[col], h) * zt - d1(y5[col], h) * ztt) / (zt * zt * zt);
      res[col] = std::fabs(yzz - r(z5[2]) * y5[col][2]);
      scale[col] = std::max(scale[col], std::fabs(yzz));
    }
    residuals.push_back(res);
  }
  rep.points = static_cast<int>(residuals.size());
  if (rep.points < o.min_grid_points) {
    rep.note = "only " + std::to_string(rep.points) + " grid points clear of singular points";
    return rep;
  }
  rep.evaluated = true;
  rep.scale = std::max(scale[0], scale[1]);
  for (const auto& res : residuals) {
    for (int col = 0; col < 2; ++col) {
      rep.max_abs_deviation = std::max(rep.max_abs_deviation, res[col]);
      rep.max_rel_deviation = std::max(rep.max_rel_deviation, res[col] / scale[col]);
    }
  }
  return rep;
}

// ---------------------------------------------------------------- orchestration

/// Start of the longest usable piece of the orbit: the admissible z furthest upstream of the flow.
inline std::optional<OrbitState> default_start(const ProblemInstance& inst, const DynamicsOptions& o = {}) {
  const ChainModel m = chain_model(inst, o);
  Real reach = 1;
  for (const auto& sp : m.singular_points) reach = std::max(reach, std::abs(sp));
  reach *= 4;
  const PoissonStructure ps = PoissonStructure::of(inst.space);
  std::optional<OrbitState> best;
  Real best_score = -std::numeric_limits<Real>::infinity();
  const int steps = 20000;
  for (int k = 0; k <= steps; ++k) {
    const Real z = -reach + 2 * reach * k / steps;
    const auto s = geodesic_state_at(inst, z);
    if (!s || !detail::usable(inst, s->theta, o)) continue;
    bool clear = true;
    for (const auto& sp : m.singular_points) clear = clear && std::abs(std::complex<Real>(z) - sp) >= o.singular_clearance;
    if (!clear) continue;
    const Real zdot = hamiltonian_rhs(ps, inst, s->full())[kPTheta];
    if (std::fabs(zdot) < 1e-3L) continue;
    const Real score = zdot < 0 ? z : -z;
    if (score > best_score) {
      best_score = score;
      best = s;
    }
  }
  return best;
}

struct CrosscheckReport {
  ProblemInstance instance;
  OrbitState start;
  Trajectory trajectory;
  Real max_det_deviation = 0;
  Real tolerance_halving_gap = 0;  // |Phi(tol) - Phi(tol/2)| at the end of the orbit
  std::vector<ArcReport> arcs;
  std::vector<std::string> splits;  // where and why the orbit was cut into arcs
  std::string error;
  DynamicsOptions options;

  bool energy_ok() const { return trajectory.max_energy_drift <= options.energy_threshold; }
  bool casimir_ok() const { return trajectory.max_casimir_drift <= options.casimir_threshold; }
  bool determinant_ok() const { return max_det_deviation <= options.determinant_threshold; }
  bool relation_ok() const { return trajectory.max_relation_residual <= options.relation_threshold; }
  bool chain_ok() const {
    bool any = false;
    for (const auto& a : arcs) {
      if (!a.evaluated) continue;
      any = true;
      if (!(a.max_rel_deviation <= options.chain_threshold)) return false;
    }
    return any;
  }
  bool passed() const {
    return error.empty() && energy_ok() && casimir_ok() && determinant_ok() && relation_ok() && chain_ok();
  }
};

/// Orbit, variational flow and chain comparison for one instance, split into arcs at turning points of
/// z(t) and at real singular points crossed by the orbit.
inline CrosscheckReport crosscheck(const ProblemInstance& inst, const DynamicsOptions& o = {},
                                   std::optional<OrbitState> start = std::nullopt) {
  CrosscheckReport rep;
  rep.instance = inst;
  rep.options = o;
  try {
    if (!start) start = default_start(inst, o);
    if (!start) {
      rep.error = "no admissible starting point: the geodesic orbit does not meet the usable chart";
      return rep;
    }
    rep.start = *start;
    rep.trajectory = integrate_orbit(inst, *start, o.horizon, o);
    const auto& samples = rep.trajectory.samples;
    if (samples.size() < 2) {
      rep.error = "orbit leaves I immediately";
      return rep;
    }
    const NveSolution sol = integrate_nve_time(inst, rep.trajectory, o);
    rep.max_det_deviation = sol.max_det_deviation;

    DynamicsOptions halved = o;
    halved.rel_tol /= 2;
    halved.abs_tol /= 2;
    const NveSolution sol2 = integrate_nve_time(inst, rep.trajectory, halved);
    const auto& e1 = sol.samples.back().phi;
    const auto& e2 = sol2.samples.back().phi;
    Real norm = 0;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        rep.tolerance_halving_gap = std::max(rep.tolerance_halving_gap, std::fabs(e1[i][j] - e2[i][j]));
        norm = std::max(norm, std::fabs(e1[i][j]));
      }
    }
    rep.tolerance_halving_gap /= std::max<Real>(1, norm);

    const ChainModel m = chain_model(inst, o);
    std::vector<std::size_t> cuts{0};
    for (std::size_t k = 1; k < samples.size(); ++k) {
      const auto& a = samples[k - 1];
      const auto& b = samples[k];
      if ((a.zdot > 0) != (b.zdot > 0)) {
        cuts.push_back(k);
        rep.splits.push_back("turning point of z near z = " + std::to_string(static_cast<double>(b.z)));
        continue;
      }
      for (Real sp : m.real_singular_points) {
        if ((a.z - sp) * (b.z - sp) <= 0) {
          cuts.push_back(k);
          rep.splits.push_back("singular point z = " + std::to_string(static_cast<double>(sp)) + " crossed");
          break;
        }
      }
    }
    cuts.push_back(samples.size() - 1);
    const NveState x0{samples.front().theta, samples.front().p_theta, 1, 0, 0, 1};
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const Real ta = samples[cuts[k]].t, tb = samples[cuts[k + 1] == 0 ? 0 : cuts[k + 1] - 1].t;
      if (tb - ta <= 10 * o.stencil_step) continue;
      rep.arcs.push_back(compare_chain(m, x0, samples.front().t, ta, tb, o));
    }
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  return rep;
}

}  // namespace nonint
