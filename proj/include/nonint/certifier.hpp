#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "nonint/certificate_io.hpp"
#include "nonint/dynamics_check.hpp"
#include "nonint/galois_decision.hpp"
#include "nonint/nve_reduction.hpp"

namespace nonint {

// ---------------------------------------------------------------- exact input parsing

/// "3/7", "-0.125", "2.5e-3", "+4": decimals are read base 10, never through binary floating point.
inline BigRational parse_exact_rational(std::string text) {
  text.erase(std::remove_if(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); }), text.end());
  if (text.empty()) throw std::invalid_argument("empty number");
  if (text.find('/') != std::string::npos) {
    if (text.front() == '+') text.erase(0, 1);
    return parse_big_rational(text);
  }
  std::string mantissa = text;
  long exponent = 0;
  if (const auto e = text.find_first_of("eE"); e != std::string::npos) {
    mantissa = text.substr(0, e);
    const std::string ex = text.substr(e + 1);
    std::size_t used = 0;
    try {
      exponent = std::stol(ex, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (ex.empty() || used != ex.size()) throw std::invalid_argument("not a number: '" + text + "'");
  }
  bool negative = false;
  if (!mantissa.empty() && (mantissa.front() == '-' || mantissa.front() == '+')) {
    negative = mantissa.front() == '-';
    mantissa.erase(0, 1);
  }
  std::string digits;
  bool seen_point = false;
  for (char c : mantissa) {
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
      if (seen_point) --exponent;
    } else {
      throw std::invalid_argument("not a number: '" + text + "'");
    }
  }
  if (digits.empty()) throw std::invalid_argument("not a number: '" + text + "'");
  if (std::labs(exponent) > 10000) throw std::invalid_argument("exponent out of range: '" + text + "'");
  mpz_class num(digits, 10), scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  BigRational out = exponent >= 0 ? BigRational(num * scale) : BigRational(num, scale);
  out.canonicalize();
  return negative ? BigRational(-out) : out;
}

struct SweepRange {
  BigRational lo, hi;
  int count = 1;

  /// "a:b:n" -> n equally spaced exact values from a to b inclusive.
  static SweepRange parse(const std::string& text) {
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw std::invalid_argument("sweep range must look like a:b:n, got '" + text + "'");
    SweepRange r{parse_exact_rational(text.substr(0, c1)), parse_exact_rational(text.substr(c1 + 1, c2 - c1 - 1)), 0};
    try {
      r.count = std::stoi(text.substr(c2 + 1));
    } catch (const std::exception&) {
      r.count = 0;
    }
    if (r.count < 1) throw std::invalid_argument("sweep step count must be a positive integer in '" + text + "'");
    return r;
  }

  std::vector<BigRational> values() const {
    if (count == 1) return {lo};
    std::vector<BigRational> out;
    for (int k = 0; k < count; ++k) {
      BigRational v = lo + (hi - lo) * k / (count - 1);
      v.canonicalize();
      out.push_back(v);
    }
    return out;
  }
};

// ---------------------------------------------------------------- exit codes

enum ExitCode : int { kExitCertified = 0, kExitUsage = 1, kExitInconclusive = 2, kExitDegenerate = 3 };

inline int exit_code(Verdict v) {
  switch (v) {
    case Verdict::NonAbelianCertified: return kExitCertified;
    case Verdict::Inconclusive: return kExitInconclusive;
    case Verdict::DegenerateIntegrableLimit: return kExitDegenerate;
  }
  return kExitUsage;
}

// ---------------------------------------------------------------- certify

inline std::string certificate_text(const GaloisCertificate& c) {
  std::ostringstream os;
  os << c.instance.label() << "  (energy " << to_fraction_string(c.instance.energy()) << ")\n";
  os << "verdict: " << to_string(c.verdict) << "\n";
  os << "reason:  " << c.reason << "\n";
  if (!c.r) return os.str();
  os << "singular points:\n";
  for (const auto& rec : c.records) {
    os << "  " << rec.label << "  ";
    if (!rec.at_infinity) os << "z = " << rec.location.to_string() << "  ";
    os << "order " << rec.order << "  alpha = " << rec.alpha.to_string()
       << "  Delta^2 = " << rec.delta_squared.to_string();
    if (rec.rational_delta) os << "  (Delta = " << to_fraction_string(*rec.rational_delta) << ")";
    os << "\n";
  }
  if (c.reality) {
    os << "reality lemma: condition " << (c.reality->condition_holds ? "holds" : "fails")
       << ", coefficients " << (c.reality->alphas_non_real ? "non-real" : "real") << "\n";
  }
  if (c.case3) {
    os << "case 3: " << (c.case3->excluded ? "excluded" : "not excluded");
    if (!c.case3->witnesses.empty()) os << " (" << c.case3->witnesses.front() << ")";
    os << "\n";
  }
  os << "case 1: " << c.product_candidates.size() << " product candidate(s)";
  for (const auto& pc : c.product_candidates) os << "; solution space dim " << pc.solution_dimension;
  os << "\n";
  if (c.exponential_rule) os << "exponential rule: " << to_string(*c.exponential_rule) << "\n";
  os << "case 2: " << c.case2.size() << " candidate(s)";
  for (const auto& cc : c.case2) os << "; d = " << cc.degree_d << ", dim " << cc.solution_dimension;
  if (!c.case2_error.empty()) os << "; " << c.case2_error;
  os << "\n";
  return os.str();
}

// ---------------------------------------------------------------- sweep

struct SweepConfig {
  Space space = Space::Sphere;
  Potential potential = Potential::TanFamily;
  std::vector<BigRational> mu, p, alpha;
  std::vector<BigRational> epsilon;  // either epsilon or energy values are swept
  std::vector<BigRational> energy;
  int workers = 1;
  bool verify_rows = true;
};

struct SweepRow {
  ProblemInstance instance;
  std::optional<Verdict> verdict;
  std::string reason;
  std::string error;
  bool reality_flagged = false;  // lemma condition fails on this row
  std::size_t product_candidates = 0;
  std::size_t case2_candidates = 0;
  std::optional<bool> verified;
  std::vector<std::string> disagreements;
};

inline SweepRow sweep_row(const ProblemInstance& inst, bool verify_row) {
  SweepRow row;
  row.instance = inst;
  try {
    const GaloisCertificate cert = decide(inst);
    row.verdict = cert.verdict;
    row.reason = cert.reason;
    row.reality_flagged = cert.reality && !cert.reality->condition_holds;
    row.product_candidates = cert.product_candidates.size();
    row.case2_candidates = cert.case2.size();
    if (verify_row) {
      // round trip through text, as an independent reader would see it
      const VerifyReport rep = verify(Json::parse(to_json(cert).dump()));
      row.verified = rep.ok;
      row.disagreements = rep.disagreements;
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

/// Rows in grid order (mu outermost); computed concurrently, assembled in order.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  std::vector<ProblemInstance> grid;
  const bool by_energy = !cfg.energy.empty();
  for (const auto& mu : cfg.mu) {
    for (const auto& p : cfg.p) {
      for (const auto& alpha : cfg.alpha) {
        for (const auto& e : by_energy ? cfg.energy : cfg.epsilon) {
          if (by_energy) {
            if (is_zero(alpha)) {
              grid.push_back({cfg.space, cfg.potential, mu, p, alpha, 0});  // reported as a row error
            } else {
              grid.push_back(ProblemInstance::from_energy(cfg.space, cfg.potential, mu, p, alpha, e));
            }
          } else {
            grid.push_back({cfg.space, cfg.potential, mu, p, alpha, e});
          }
        }
      }
    }
  }
  std::vector<SweepRow> rows(grid.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) rows[k] = sweep_row(grid[k], cfg.verify_rows);
  };
  const int n = std::max(1, std::min<int>(cfg.workers, static_cast<int>(grid.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

inline Json sweep_json(const std::vector<SweepRow>& rows) {
  Json out;
  Json list = Json::array();
  std::map<std::string, int> counts;
  int errors = 0, unverified = 0;
  for (const auto& row : rows) {
    Json j = to_json(row.instance);
    if (row.verdict) {
      j["verdict"] = to_string(*row.verdict);
      j["reason"] = row.reason;
      j["reality_flagged"] = row.reality_flagged;
      j["product_candidates"] = row.product_candidates;
      j["case2_candidates"] = row.case2_candidates;
      ++counts[to_string(*row.verdict)];
    } else {
      j["error"] = row.error;
      ++errors;
    }
    if (row.verified) {
      j["verified"] = *row.verified;
      if (!*row.verified) {
        j["disagreements"] = row.disagreements;
        ++unverified;
      }
    }
    list.push_back(j);
  }
  Json summary;
  for (const auto& [k, v] : counts) summary[k] = v;
  summary["errors"] = errors;
  summary["verification_failures"] = unverified;
  out["rows"] = list;
  out["summary"] = summary;
  return out;
}

inline std::string sweep_text(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  std::map<std::string, int> counts;
  for (const auto& row : rows) {
    os << row.instance.label() << "  ";
    if (row.verdict) {
      os << to_string(*row.verdict);
      if (row.reality_flagged) os << " [reality condition fails]";
      ++counts[to_string(*row.verdict)];
    } else {
      os << "error: " << row.error;
      ++counts["error"];
    }
    if (row.verified) os << (*row.verified ? "  verified" : "  VERIFY FAILED");
    os << "\n";
  }
  os << "summary:";
  for (const auto& [k, v] : counts) os << "  " << k << "=" << v;
  os << "\n";
  return os.str();
}

inline int sweep_exit_code(const std::vector<SweepRow>& rows) {
  for (const auto& row : rows) {
    if (!row.verdict || (row.verified && !*row.verified)) return kExitInconclusive;
  }
  return kExitCertified;
}

// ---------------------------------------------------------------- crosscheck

inline Json to_json(const CrosscheckReport& rep) {
  auto d = [](Real x) { return static_cast<double>(x); };
  Json j;
  j["instance"] = to_json(rep.instance);
  j["passed"] = rep.passed();
  if (!rep.error.empty()) j["error"] = rep.error;
  j["start"] = Json{{"theta", d(rep.start.theta)}, {"p_theta", d(rep.start.p_theta)},
                    {"z", d(z_of(rep.instance, rep.start.p_theta))}};
  j["orbit"] = Json{{"accepted_steps", rep.trajectory.samples.size()},
                    {"t_end", rep.trajectory.samples.empty() ? 0.0 : d(rep.trajectory.samples.back().t)},
                    {"truncated", rep.trajectory.truncated},
                    {"truncation", rep.trajectory.truncation},
                    {"max_energy_drift", d(rep.trajectory.max_energy_drift)},
                    {"max_casimir_drift", d(rep.trajectory.max_casimir_drift)},
                    {"max_orbit_relation_residual", d(rep.trajectory.max_relation_residual)}};
  j["variational"] = Json{{"max_det_deviation", d(rep.max_det_deviation)},
                          {"tolerance_halving_gap", d(rep.tolerance_halving_gap)}};
  j["splits"] = rep.splits;
  Json arcs = Json::array();
  for (const auto& a : rep.arcs) {
    Json aj{{"t", {d(a.t_begin), d(a.t_end)}}, {"z", {d(a.z_begin), d(a.z_end)}}, {"points", a.points},
            {"evaluated", a.evaluated}};
    if (a.evaluated) {
      aj["max_rel_deviation"] = d(a.max_rel_deviation);
      aj["max_abs_deviation"] = d(a.max_abs_deviation);
      aj["scale"] = d(a.scale);
    } else {
      aj["note"] = a.note;
    }
    arcs.push_back(aj);
  }
  j["arcs"] = arcs;
  j["thresholds"] = Json{{"chain", d(rep.options.chain_threshold)},
                         {"energy", d(rep.options.energy_threshold)},
                         {"casimir", d(rep.options.casimir_threshold)},
                         {"determinant", d(rep.options.determinant_threshold)},
                         {"orbit_relation", d(rep.options.relation_threshold)}};
  j["checks"] = Json{{"energy", rep.energy_ok()}, {"casimir", rep.casimir_ok()}, {"determinant", rep.determinant_ok()},
                     {"orbit_relation", rep.relation_ok()}, {"chain", rep.chain_ok()}};
  return j;
}

inline std::string crosscheck_text(const CrosscheckReport& rep) {
  std::ostringstream os;
  os.precision(3);
  os << rep.instance.label() << "\n";
  if (!rep.error.empty()) os << "error: " << rep.error << "\n";
  const auto& t = rep.trajectory;
  os << "start: theta = " << static_cast<double>(rep.start.theta)
     << ", z = " << static_cast<double>(z_of(rep.instance, rep.start.p_theta)) << "\n";
  if (t.truncated) os << "orbit truncated: " << t.truncation << "\n";
  os << "energy drift " << static_cast<double>(t.max_energy_drift) << (rep.energy_ok() ? " ok" : " FAIL")
     << "; Casimir drift " << static_cast<double>(t.max_casimir_drift) << (rep.casimir_ok() ? " ok" : " FAIL")
     << "; orbit relation " << static_cast<double>(t.max_relation_residual) << (rep.relation_ok() ? " ok" : " FAIL")
     << "\n";
  os << "|det Phi - 1| " << static_cast<double>(rep.max_det_deviation) << (rep.determinant_ok() ? " ok" : " FAIL")
     << "; tolerance-halving gap " << static_cast<double>(rep.tolerance_halving_gap) << "\n";
  for (const auto& s : rep.splits) os << "split: " << s << "\n";
  for (const auto& a : rep.arcs) {
    os << "arc z " << static_cast<double>(a.z_begin) << " -> " << static_cast<double>(a.z_end) << ": ";
    if (a.evaluated) {
      os << a.points << " points, max relative |y'' - r y| = " << static_cast<double>(a.max_rel_deviation)
         << (a.max_rel_deviation <= rep.options.chain_threshold ? " ok" : " FAIL");
    } else {
      os << "skipped (" << a.note << ")";
    }
    os << "\n";
  }
  os << (rep.passed() ? "PASSED" : "FAILED") << "\n";
  return os.str();
}

// ---------------------------------------------------------------- verify

inline Json to_json(const VerifyReport& rep) {
  return Json{{"ok", rep.ok}, {"recomputed_verdict", to_string(rep.recomputed)}, {"disagreements", rep.disagreements}};
}

inline std::string verify_text(const VerifyReport& rep) {
  std::ostringstream os;
  os << (rep.ok ? "certificate verified" : "certificate REJECTED") << "; recomputed verdict "
     << to_string(rep.recomputed) << "\n";
  for (const auto& d : rep.disagreements) os << "  " << d << "\n";
  return os.str();
}

}  // namespace nonint
