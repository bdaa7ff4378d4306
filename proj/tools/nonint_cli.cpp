// nonint: certify, sweep, cross-check and re-verify nonintegrability certificates.
//
// Exit codes: 0 certified / passed, 1 usage or input error, 2 inconclusive / failed, 3 degenerate (mu = 1).
// All numeric inputs are exact: "0.1" means 1/10, never the nearest binary double.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "nonint.hpp"

namespace {

using namespace nonint;

struct Options {
  std::string space = "S2";
  std::string potential = "tan";
  std::string mu, p, alpha, epsilon, energy;
  std::string mode = "certify";
  std::string format = "text";
  std::string out;
  std::string certificate;
  int workers = 0;
  std::string sweep_mu, sweep_p, sweep_alpha, sweep_epsilon, sweep_energy;
  std::vector<int> flip;
  bool no_row_verify = false;
  std::optional<double> z0;
  bool upper_branch = false;
  DynamicsOptions dyn;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

BigRational required(const std::string& value, const std::string& flag) {
  if (value.empty()) throw UsageError(flag + " is required in this mode");
  try {
    return parse_exact_rational(value);
  } catch (const std::exception& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

ProblemInstance instance_from(const Options& o) {
  const Space s = space_from_string(o.space);
  const Potential v = potential_from_string(o.potential);
  const BigRational mu = required(o.mu, "--mu"), p = required(o.p, "--p"), alpha = required(o.alpha, "--alpha");
  ProblemInstance inst;
  if (!o.energy.empty()) {
    inst = ProblemInstance::from_energy(s, v, mu, p, alpha, required(o.energy, "--energy"));
  } else {
    inst = {s, v, mu, p, alpha, required(o.epsilon, "--epsilon (or --energy)")};
  }
  inst.validate();
  return inst;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw UsageError("cannot write " + o.out);
  f << text;
}

std::string render(const Options& o, const Json& j, const std::string& text) {
  return o.format == "json" ? j.dump(2) + "\n" : text;
}

int run_certify(const Options& o) {
  const ProblemInstance inst = instance_from(o);
  std::vector<bool> flips(4, false);
  for (int j : o.flip) {
    if (j < 0 || j >= 4) throw UsageError("--flip takes pole-basis factor indices 0..3");
    flips[static_cast<std::size_t>(j)] = true;
  }
  const GaloisCertificate cert = decide(inst, o.flip.empty() ? std::vector<bool>{} : flips);
  emit(o, render(o, to_json(cert), certificate_text(cert)));
  return exit_code(cert.verdict);
}

std::vector<BigRational> axis(const std::string& range, const std::string& fixed, const std::string& flag) {
  if (!range.empty()) {
    try {
      return SweepRange::parse(range).values();
    } catch (const std::exception& e) {
      throw UsageError("--sweep-" + flag + ": " + e.what());
    }
  }
  return {required(fixed, "--" + flag + " or --sweep-" + flag)};
}

int run_sweep_mode(const Options& o) {
  SweepConfig cfg;
  cfg.space = space_from_string(o.space);
  cfg.potential = potential_from_string(o.potential);
  cfg.mu = axis(o.sweep_mu, o.mu, "mu");
  cfg.p = axis(o.sweep_p, o.p, "p");
  cfg.alpha = axis(o.sweep_alpha, o.alpha, "alpha");
  if (!o.sweep_energy.empty() || !o.energy.empty()) {
    cfg.energy = axis(o.sweep_energy, o.energy, "energy");
  } else {
    cfg.epsilon = axis(o.sweep_epsilon, o.epsilon, "epsilon");
  }
  cfg.workers = o.workers > 0 ? o.workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  cfg.verify_rows = !o.no_row_verify;
  const auto rows = run_sweep(cfg);
  emit(o, render(o, sweep_json(rows), sweep_text(rows)));
  return sweep_exit_code(rows);
}

int run_crosscheck_mode(const Options& o) {
  const ProblemInstance inst = instance_from(o);
  std::optional<OrbitState> start;
  if (o.z0) {
    start = geodesic_state_at(inst, static_cast<Real>(*o.z0), o.upper_branch);
    if (!start) throw UsageError("--z0 is not on the geodesic orbit of this instance");
  }
  const CrosscheckReport rep = crosscheck(inst, o.dyn, start);
  emit(o, render(o, to_json(rep), crosscheck_text(rep)));
  return rep.passed() ? 0 : kExitInconclusive;
}

int run_verify_mode(const Options& o) {
  if (o.certificate.empty()) throw UsageError("--certificate <path> is required in verify mode");
  std::ifstream f(o.certificate);
  if (!f) throw UsageError("cannot read " + o.certificate);
  Json j;
  try {
    j = Json::parse(f);
  } catch (const std::exception& e) {
    throw UsageError(std::string("certificate is not valid JSON: ") + e.what());
  }
  const VerifyReport rep = verify(j);
  emit(o, render(o, to_json(rep), verify_text(rep)));
  return rep.ok ? 0 : kExitInconclusive;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact nonintegrability certificates for the reduced two-body problem on S2 and H2"};
  Options o;
  app.add_option("--space", o.space, "S2 or H2")->check(CLI::IsMember({"S2", "H2"}));
  app.add_option("--potential", o.potential, "tan or csc")->check(CLI::IsMember({"tan", "csc"}));
  app.add_option("--mu", o.mu, "mass ratio m1/(m1+m2), exact (e.g. 1/2 or 0.5)");
  app.add_option("--p", o.p, "momentum p, gamma = p^2");
  app.add_option("--alpha", o.alpha, "potential strength");
  auto* eps = app.add_option("--epsilon", o.epsilon, "energy parameter epsilon");
  auto* energy = app.add_option("--energy", o.energy, "energy level h = alpha*epsilon - mu*p^2/2");
  eps->excludes(energy);
  app.add_option("--mode", o.mode, "certify, sweep, crosscheck or verify")
      ->check(CLI::IsMember({"certify", "sweep", "crosscheck", "verify"}));
  app.add_option("--format", o.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  app.add_option("--out", o.out, "write output here instead of stdout");
  app.add_option("--certificate", o.certificate, "certificate to re-check (verify mode)");
  app.add_option("--workers", o.workers, "sweep worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--flip", o.flip, "swap the roots of these pole-basis factors (0..3)");
  app.add_option("--sweep-mu", o.sweep_mu, "a:b:n");
  app.add_option("--sweep-p", o.sweep_p, "a:b:n");
  app.add_option("--sweep-alpha", o.sweep_alpha, "a:b:n");
  auto* se = app.add_option("--sweep-epsilon", o.sweep_epsilon, "a:b:n");
  auto* sh = app.add_option("--sweep-energy", o.sweep_energy, "a:b:n");
  se->excludes(sh);
  app.add_flag("--no-row-verify", o.no_row_verify, "skip re-verification of each sweep row");
  app.add_option("--z0", o.z0, "crosscheck: starting z on the orbit (default: automatic)");
  app.add_flag("--upper-branch", o.upper_branch, "crosscheck, S2/csc: start with theta in (pi/2, pi)");
  auto ld = [&app](const std::string& name, Real& target, const std::string& help) {
    app.add_option_function<double>(name, [&target](double v) { target = v; }, help);
  };
  ld("--chain-tol", o.dyn.chain_threshold, "relative threshold for |y'' - r y|");
  ld("--energy-tol", o.dyn.energy_threshold, "relative energy drift threshold");
  ld("--casimir-tol", o.dyn.casimir_threshold, "Casimir drift threshold");
  ld("--det-tol", o.dyn.determinant_threshold, "|det Phi - 1| threshold");
  ld("--relation-tol", o.dyn.relation_threshold, "orbit relation threshold");
  ld("--rel-tol", o.dyn.rel_tol, "integrator relative tolerance");
  ld("--abs-tol", o.dyn.abs_tol, "integrator absolute tolerance");
  ld("--horizon", o.dyn.horizon, "integration horizon");
  ld("--clearance", o.dyn.singular_clearance, "minimal z-distance of grid points to singular points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (o.mode == "certify") return run_certify(o);
    if (o.mode == "sweep") return run_sweep_mode(o);
    if (o.mode == "crosscheck") return run_crosscheck_mode(o);
    return run_verify_mode(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {  // InvalidParameters and malformed numbers
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInconclusive;  // nothing was certified
  }
  return kExitUsage;
}
