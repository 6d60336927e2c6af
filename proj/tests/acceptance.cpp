// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "isslab/harness.hpp"

namespace {

using namespace isslab;
namespace fs = std::filesystem;

const double kPi2 = std::numbers::pi * std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Scenario bundled(const std::string& name) {
  return parse_and_validate(slurp(fs::path(ISSLAB_SCENARIO_DIR) / (name + ".scn")));
}

SampleBudget budget(std::size_t s, std::size_t u, std::size_t t, double horizon = 2.0) {
  SampleBudget b;
  b.n_states = s;
  b.n_inputs = u;
  b.n_times = t;
  b.horizon = horizon;
  return b;
}

Outcome steady_state_gain() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sys = heat_dirichlet({1.0, 128});
  const double n = state_norm(mild_solution(sys, State(128, 0.0), InputSignal::constant(1.0, 3.0), 3.0));
  const double err = std::abs(n - 1.0 / std::sqrt(3.0));
  const double secs = seconds_since(t0);
  return {err <= 2e-3 && secs < 1.0, "|phi(3)| = " + fmt("%.6f", n) + ", error " + fmt("%.2e", err) + ", " + fmt("%.3f", secs) + " s"};
}

Outcome iss_envelope() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sys = heat_dirichlet({1.0, 64});
  const ISSCertificate cert{DecayEnvelope(1.0, kPi2), ComparisonFunction::linear(1.0 / std::sqrt(3.0))};
  const auto b = budget(10, 10, 5);
  double worst = INFINITY;
  std::size_t n = 0;
  for (std::size_t i = 0; i < b.n_states; ++i) {
    const State x0 = sample_state(b, 64, i);
    for (std::size_t j = 0; j < b.n_inputs; ++j) {
      const InputSignal u = sample_input(b, j);
      for (std::size_t l = 0; l < b.n_times; ++l) {
        worst = std::min(worst, iss_margin(sys, cert, x0, u, sample_time(b, l)) + 1e-6);
        ++n;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {n == 500 && worst >= 0.0 && secs < 5.0,
          std::to_string(n) + " samples, worst slack " + fmt("%.3e", worst) + ", " + fmt("%.3f", secs) + " s"};
}

Outcome decay_envelope() {
  const auto sys = heat_dirichlet({1.0, 64});
  double worst = 0.0;
  for (double t : {0.1, 0.5, 1.0}) {
    const double ratio = state_norm(mild_solution(sys, unit_vector(64, 0), InputSignal::zero(), t));
    const double expected = std::exp(-kPi2 * t);
    worst = std::max(worst, std::abs(ratio - expected) / expected);
  }
  return {worst <= 1e-12, "max relative error " + fmt("%.2e", worst)};
}

Outcome lyapunov_equation() {
  const auto sys = heat_dirichlet({1.0, 64});
  const auto op = build_datko(sys);
  std::mt19937_64 gen(4);
  std::normal_distribution<double> N(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    State x(64);
    for (auto& v : x) v = N(gen);
    const double n2 = state_norm(x) * state_norm(x);
    worst = std::max(worst, std::abs(lyapunov_residual(op, sys, x)) / n2);
  }
  return {worst <= 1e-12, "1000 states, max |residual| / |x|^2 = " + fmt("%.2e", worst)};
}

Outcome non_coercivity() {
  const auto sys = heat_dirichlet({1.0, 64});
  const auto op = build_neg_inverse(sys);
  const double v64 = v_value(op, unit_vector(64, 63));
  const double v1 = v_value(op, unit_vector(64, 0));
  const bool ok = std::abs(v64 - 1.0 / (kPi2 * 4096.0)) <= 1e-9 && v64 < 1e-4 && std::abs(v1 - 1.0 / kPi2) <= 1e-9;
  return {ok, "V(e_64) = " + fmt("%.4e", v64) + ", V(e_1) = " + fmt("%.6f", v1)};
}

Outcome dissipation_inequality() {
  const auto sys = heat_dirichlet({1.0, 64});
  const auto op = build_neg_inverse(sys);
  // (a) kappa(0) = 0 evidence required by the criterion
  const auto gate = kappa_bounds(sys, 1e-3);
  const bool gate_ok = gate.upper < 1e-2;
  // (b) analytic derivative against eps = 1/2, c = 2/3 on 200 samples
  DissipationParameters params = dissipation_constants(op, sys, 0.5, 0.0);
  params.c_eps = 2.0 / 3.0;
  const auto b = budget(20, 10, 1);
  const auto steps = default_dini_steps(sys);
  double worst = INFINITY;
  double gap = 0.0;
  for (std::size_t i = 0; i < b.n_states; ++i) {
    const State x0 = sample_state(b, 64, i);
    for (std::size_t j = 0; j < b.n_inputs; ++j) {
      const InputSignal u = sample_input(b, j);
      worst = std::min(worst, dissipation_margin_analytic(sys, op, params, x0, u));
      // (c) difference quotient against analytic derivative
      const auto d = dini_estimate(op, sys, x0, u, steps);
      gap = std::max(gap, std::abs(d.finite_difference - d.analytic) / (1.0 + std::abs(d.analytic)));
    }
  }
  const bool ineq_ok = worst >= -1e-9;
  const bool fd_ok = gap <= 1e-3;
  std::string detail = std::string("kappa gate ") + (gate_ok ? "ok" : "FAILED") + " (upper(1e-3) = " + fmt("%.4f", gate.upper) +
                       ", lower = " + fmt("%.4f", gate.lower) + ", need < 1e-2); inequality with c = 2/3 " +
                       (ineq_ok ? "ok" : "FAILED") + " (worst margin " + fmt("%.3e", worst) + "); difference quotient " +
                       (fd_ok ? "ok" : "FAILED") + " (max gap " + fmt("%.2e", gap) + ")";
  return {gate_ok && ineq_ok && fd_ok, detail};
}

Outcome norm_to_integral() {
  const auto sys = heat_dirichlet({1.0, 64});
  const NormToIntegralCertificate cert{ComparisonFunction::power(0.5, 2.0), ComparisonFunction::power(1.0 / kPi2, 2.0),
                                       ComparisonFunction::power(2.0 / 3.0, 2.0)};
  const auto r = check_norm_to_integral(sys, cert, budget(10, 10, 2));
  return {r.samples_checked == 200 && !r.violated() && r.worst_margin >= -1e-6,
          std::to_string(r.samples_checked) + " samples, worst margin " + fmt("%.3e", r.worst_margin)};
}

Outcome sontag_exactness() {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> Um(1.0, 10.0), Uw(0.1, 20.0), Ur(0.0, 10.0), Ut(0.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double M = Um(gen), w = Uw(gen), r = Ur(gen), t = Ut(gen);
    const auto [xi1, xi2] = sontag_factor_exponential(DecayEnvelope(M, w));
    const double rhs = M * std::exp(-w * t) * r;
    worst = std::max(worst, std::abs(invert(xi1, std::exp(-t) * xi2(r), 1e-300) - rhs) / (1.0 + rhs));
  }
  return {worst <= 1e-10, "100 draws, max scaled error " + fmt("%.2e", worst)};
}

Outcome axioms() {
  const auto sys = heat_dirichlet({1.0, 64});
  const auto b = budget(10, 10, 2);
  const auto id = check_identity(sys, b);
  const auto co = check_cocycle(sys, b);
  const auto ca = check_causality(sys, b);
  double worst_dev = 0.0;
  for (const auto& m : co.margins) worst_dev = std::max(worst_dev, 1e-10 - m.margin);
  const bool ok = !id.violated() && id.worst_margin == 0.0 && !co.violated() && co.samples_checked == 200 &&
                  !ca.violated() && ca.worst_margin == 0.0;
  return {ok, "identity exact, cocycle max relative error " + fmt("%.2e", worst_dev) + " over 200, causality " +
                  (ca.worst_margin == 0.0 ? "exact" : "inexact")};
}

Outcome kappa_evidence() {
  const auto sys = heat_dirichlet({1.0, 64});
  const auto a = kappa_bounds(sys, 1e-1);
  const auto b = kappa_bounds(sys, 1e-2);
  const auto c = kappa_bounds(sys, 1e-3);
  const bool decreasing = a.upper > b.upper && b.upper > c.upper;
  const bool small = c.upper < 1e-2;
  return {decreasing && small, "upper bounds " + fmt("%.4f", a.upper) + ", " + fmt("%.4f", b.upper) + ", " +
                                   fmt("%.4f", c.upper) + " (decreasing " + (decreasing ? "yes" : "no") +
                                   "); lower bound at 1e-3 is " + fmt("%.4f", c.lower) + ", need upper < 1e-2"};
}

Outcome negative_control() {
  const auto s = bundled("heat_bad_gain");
  const auto r = run_scenario(s);
  if (r.entries.empty() || !r.entries[0].report.violated() || !r.entries[0].report.witness) {
    return {false, "no violation reported"};
  }
  const auto& rep = r.entries[0].report;
  const auto setup = prepare(s);
  const auto& w = *rep.witness;
  const double replay = iss_margin(setup.system, setup.iss, w.x0, w.u, w.t);
  const bool ok = exit_status(r) != 0 && replay == rep.worst_margin && rep.worst_margin < -0.4 && r.entries[0].witness_trajectory;
  return {ok, "violated, witness margin " + fmt("%.4f", rep.worst_margin) + ", replayed " + fmt("%.4f", replay)};
}

Outcome battery() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sys = heat_dirichlet({1.0, 64});
  const ISSCertificate cert{DecayEnvelope(1.0, kPi2), ComparisonFunction::linear(1.0 / std::sqrt(3.0))};
  const auto res = run_iss_characterization_battery(sys, {cert, 0.1}, SampleBudget{});
  const bool all_clear = !res.ulim.violated() && !res.uls.violated() && !res.brs.violated() && !res.iss.violated();
  for (const char* name : {"heat_iss", "heat_bad_gain", "diagonal_custom", "datko_vs_neginverse"}) {
    (void)run_scenario(bundled(name));
  }
  const double secs = seconds_since(t0);
  return {all_clear && res.consistent && secs < 60.0,
          std::string("ulim/uls/brs/iss ") + (all_clear ? "no violation found" : "violation") + ", bundled suite + battery " +
              fmt("%.2f", secs) + " s"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"heat steady-state gain", steady_state_gain},
      {"ISS envelope", iss_envelope},
      {"decay envelope", decay_envelope},
      {"Lyapunov equation", lyapunov_equation},
      {"non-coercivity exhibit", non_coercivity},
      {"dissipation inequality", dissipation_inequality},
      {"norm-to-integral ISS", norm_to_integral},
      {"Sontag factorization", sontag_exactness},
      {"axiom conformance", axioms},
      {"kappa(0) = 0 evidence", kappa_evidence},
      {"negative control", negative_control},
      {"ISS iff ULIM, ULS, BRS battery", battery},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2zu %s: %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed ? 1 : 0;
}
