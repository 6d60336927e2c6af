#pragma once

// Scenario execution: build system, Lyapunov operator, constants and
// certificates from a Scenario, run the requested probes in declared order,
// and write report.csv / margins.csv / reports.txt plus trajectory CSVs.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "isslab/checkers.hpp"
#include "isslab/comparison.hpp"
#include "isslab/lyapunov.hpp"
#include "isslab/report.hpp"
#include "isslab/scenario.hpp"
#include "isslab/system.hpp"

#ifndef ISSLAB_VERSION
#define ISSLAB_VERSION "0.1.0"
#endif

namespace isslab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

/// Everything derived from a scenario before any probe runs.
struct ScenarioSetup {
  SpectralSystem system;
  LyapunovOperator lyapunov;
  Kappa0Evidence kappa0;
  DissipationParameters dissipation;
  ISSCertificate iss;
  NormToIntegralCertificate integral;
};

inline SpectralSystem build_system(const Scenario& s) {
  if (s.preset == SystemPreset::HeatDirichlet) {
    SpectralSystem sys = heat_dirichlet({s.a, s.modes});
    if (s.label.empty()) return sys;
    return SpectralSystem({sys.lambdas().begin(), sys.lambdas().end()}, {sys.b().begin(), sys.b().end()}, s.label);
  }
  return SpectralSystem(s.lambdas, s.b, s.label.empty() ? "diagonal" : s.label);
}

/// Defaults when the scenario leaves the ISS certificate open:
///   beta = decay(1, lambda_1)  (contraction with the slowest decay rate)
///   gamma = linear(1/sqrt(3)) for the heat preset, otherwise
///           linear(int_0^inf |T(s)B| ds), an upper bound on sup_t kappa(t).
inline ISSCertificate default_iss_certificate(const Scenario& s, const SpectralSystem& sys) {
  const DecayEnvelope beta = s.beta.value_or(DecayEnvelope(1.0, sys.lambda(0)));
  if (s.gamma) return {beta, *s.gamma};
  if (s.preset == SystemPreset::HeatDirichlet) return {beta, ComparisonFunction::linear(1.0 / std::numbers::sqrt3)};
  double gain = kappa_bounds(sys, 60.0 / sys.lambda(0)).upper;
  if (!(gain > 0.0)) gain = 1e-12;
  return {beta, ComparisonFunction::linear(gain)};
}

inline ScenarioSetup prepare(const Scenario& s) {
  SpectralSystem sys = build_system(s);
  LyapunovOperator op = build_lyapunov(sys, s.construction);
  Kappa0Policy policy;
  policy.gate_time = s.kappa_gate_time;
  policy.threshold = s.kappa_threshold;
  Kappa0Evidence ev = estimate_kappa0(sys, policy);
  DissipationParameters diss = dissipation_constants(op, sys, s.epsilon, ev.kappa0);
  ISSCertificate iss = default_iss_certificate(s, sys);

  NormToIntegralCertificate integral{ComparisonFunction::linear(1), ComparisonFunction::linear(1), ComparisonFunction::linear(1)};
  switch (s.integral) {
    case IntegralCertificateSource::Lyapunov: {
      // Integrating dV/dt <= -(1 - eps)|x|^2 + c |u|^2 and V(x) <= |P| |x|^2.
      const double c = diss.c_eps > 0.0 ? diss.c_eps : 1e-12;
      integral = {ComparisonFunction::power(1.0 - s.epsilon, 2.0), ComparisonFunction::power(op.norm(), 2.0),
                  ComparisonFunction::power(c, 2.0)};
      break;
    }
    case IntegralCertificateSource::DeriveFromIss:
      integral = derive_norm_to_integral(iss);
      break;
    case IntegralCertificateSource::Explicit:
      integral = {*s.alpha, *s.psi, *s.sigma};
      break;
  }
  return {std::move(sys), std::move(op), std::move(ev), diss, std::move(iss), std::move(integral)};
}

struct CheckEntry {
  std::string name;
  StabilityReport report;
  double seconds = 0.0;
  std::optional<Trajectory> witness_trajectory;  // set for violated checks
};

struct RunReport {
  std::string scenario_digest;
  std::string version = ISSLAB_VERSION;
  std::vector<CheckEntry> entries;
  std::vector<Trajectory> trajectories;
};

/// FNV-1a over the canonical scenario text.
inline std::string scenario_digest(const Scenario& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialize_scenario(s)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline StabilityReport run_check(const std::string& name, const Scenario& s, const ScenarioSetup& setup) {
  const auto& sys = setup.system;
  const auto& budget = s.budget;
  if (name == "identity") return check_identity(sys, budget);
  if (name == "causality") return check_causality(sys, budget);
  if (name == "cocycle") return check_cocycle(sys, budget);
  if (name == "iss") return check_iss(sys, setup.iss, budget);
  if (name == "uls") return check_uls(sys, ComparisonFunction::linear(setup.iss.beta.M), setup.iss.gamma, budget.radius, budget);
  if (name == "ulim") return check_ulim(sys, setup.iss.gamma, s.ulim_eps, budget.radius, budget);
  if (name == "brs") return check_brs(sys, s.brs_c.value_or(budget.radius), s.brs_tau.value_or(budget.horizon), budget);
  if (name == "cep") return check_cep(sys, budget, s.cep_h);
  if (name == "dissipation") return check_dissipation(sys, setup.lyapunov, setup.dissipation, budget);
  if (name == "norm_to_integral") return check_norm_to_integral(sys, setup.integral, budget);
  if (name == "integral_to_integral") return check_integral_to_integral(sys, setup.integral, budget);
  if (name == "lyapunov_hypotheses") return check_lyapunov_hypotheses(sys, budget);
  throw std::invalid_argument("unknown check " + name);
}

/// Uniform grid on [0, horizon] with every input breakpoint added.
inline std::vector<double> witness_grid(const InputSignal& u, double t_end, std::size_t points = 200) {
  std::vector<double> g;
  if (!(t_end > 0.0)) return {0.0};
  for (std::size_t m = 0; m <= points; ++m) g.push_back(t_end * static_cast<double>(m) / static_cast<double>(points));
  for (double b : u.breakpoints()) {
    if (b > 0.0 && b < t_end) g.push_back(b);
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

enum class RunMode { Simulate, Check };

/// Probes run in declared order. A failing probe is rethrown with its name.
inline RunReport run_scenario(const Scenario& s, RunMode mode = RunMode::Check) {
  validate(s);
  const ScenarioSetup setup = prepare(s);
  RunReport report;
  report.scenario_digest = scenario_digest(s);
  if (mode == RunMode::Check) {
    for (const auto& name : s.checks) {
      const auto start = std::chrono::steady_clock::now();
      CheckEntry e;
      e.name = name;
      try {
        e.report = run_check(name, s, setup);
      } catch (const std::exception& ex) {
        throw std::runtime_error("check " + name + " failed: " + ex.what());
      }
      e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (e.report.violated() && e.report.witness) {
        const auto& w = *e.report.witness;
        const double t_end = std::max(w.t, s.budget.horizon);
        e.witness_trajectory = sample_trajectory(setup.system, w.x0, w.u, witness_grid(w.u, t_end));
      }
      report.entries.push_back(std::move(e));
    }
  }
  const std::size_t n_traj = mode == RunMode::Simulate ? std::max<std::size_t>(s.trajectories, 1) : s.trajectories;
  for (std::size_t i = 0; i < n_traj; ++i) {
    const std::size_t si = i % s.budget.n_states;
    const std::size_t ui = i % s.budget.n_inputs;
    const State x0 = sample_state(s.budget, setup.system.n_modes(), si);
    const InputSignal u = sample_input(s.budget, ui);
    report.trajectories.push_back(sample_trajectory(setup.system, x0, u, witness_grid(u, s.budget.horizon)));
  }
  return report;
}

inline bool any_violation(const RunReport& r) {
  for (const auto& e : r.entries) {
    if (e.report.violated()) return true;
  }
  return false;
}

inline int exit_status(const RunReport& r) { return any_violation(r) ? kExitViolation : kExitOk; }

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  return os;
}

}  // namespace detail

/// Writes, under `dir`:
///   report.csv        check,verdict,worst_margin,samples,seconds
///   margins.csv       check,sample_index,t,margin
///   reports.txt       property,verdict,worst_margin,samples_checked[,witness_file]
///   witness_<check>.csv for each violated check (trajectory CSV)
///   trajectory_<i>.csv
/// The `seconds` column is 0 unless `include_timing`, so that files are
/// byte-identical across reruns with the same scenario.
inline void emit_csv(const RunReport& report, const std::filesystem::path& dir, bool include_timing = false) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  auto rep = detail::open_for_write(dir / "report.csv");
  rep << "check,verdict,worst_margin,samples,seconds\n";
  auto mar = detail::open_for_write(dir / "margins.csv");
  mar << "check,sample_index,t,margin\n";
  auto txt = detail::open_for_write(dir / "reports.txt");

  for (const auto& e : report.entries) {
    const auto& r = e.report;
    rep << e.name << ',' << to_string(r.verdict) << ',' << format_real(r.worst_margin) << ',' << r.samples_checked << ','
        << format_real(include_timing ? e.seconds : 0.0) << '\n';
    for (const auto& m : r.margins) {
      mar << e.name << ',' << m.index << ',' << format_real(m.t) << ',' << format_real(m.margin) << '\n';
    }
    std::string witness_file;
    if (e.witness_trajectory) {
      witness_file = "witness_" + e.name + ".csv";
      auto os = detail::open_for_write(dir / witness_file);
      write_trajectory_csv(os, *e.witness_trajectory);
    }
    txt << serialize_line(r, witness_file) << '\n';
  }
  for (std::size_t i = 0; i < report.trajectories.size(); ++i) {
    auto os = detail::open_for_write(dir / ("trajectory_" + std::to_string(i) + ".csv"));
    write_trajectory_csv(os, report.trajectories[i]);
  }
  if (!rep || !mar || !txt) throw std::runtime_error("write error under " + dir.string());
}

}  // namespace isslab
