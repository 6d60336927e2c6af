#pragma once

// Falsification probes for the stability notions of linear spectral systems.
//
// Each probe evaluates an inequality on a stratified random sample set drawn
// from a SampleBudget and reports the worst margin (right side minus left
// side). A negative margin beyond tolerance is a violation and comes with a
// replayable witness; a clean run only means no violation was found.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "isslab/comparison.hpp"
#include "isslab/lyapunov.hpp"
#include "isslab/quadrature.hpp"
#include "isslab/report.hpp"
#include "isslab/sampling.hpp"
#include "isslab/system.hpp"

namespace isslab {

// ---------------------------------------------------------------------------
// Per-sample margins. The probes below are loops over these, and witness
// replay calls them directly.

/// beta(|x0|, t) + gamma(|u|_inf) - |phi(t, x0, u)|
inline double iss_margin(const SpectralSystem& sys, const ISSCertificate& cert, std::span<const double> x0,
                         const InputSignal& u, double t) {
  return cert.beta(state_norm(x0), t) + cert.gamma(u.sup_norm()) - state_norm(mild_solution(sys, x0, u, t));
}

/// sigma(|x0|) + gamma(|u|_inf) - |phi(t, x0, u)|
inline double uls_margin(const SpectralSystem& sys, const ComparisonFunction& sigma, const ComparisonFunction& gamma,
                         std::span<const double> x0, const InputSignal& u, double t) {
  return sigma(state_norm(x0)) + gamma(u.sup_norm()) - state_norm(mild_solution(sys, x0, u, t));
}

struct IntegralOptions {
  std::size_t per_panel = 16;         // Simpson subintervals per graded panel (even)
  double first_width_factor = 0.05;   // first panel width, in units of 1/lambda_max
  double max_width_factor = 0.5;      // panel width cap, in units of 1/lambda_1
};

/// Composite Simpson of samples `values` on `times`, restarted at every knot
/// so no panel straddles a kink. Every knot inside the grid's span must be a
/// grid node. Returns the running integral at each knot.
inline std::vector<double> integrate_to_knots(std::span<const double> times, std::span<const double> values,
                                              std::span<const double> knots) {
  if (times.size() != values.size()) throw std::invalid_argument("integrate: size mismatch");
  std::vector<double> out;
  out.reserve(knots.size());
  std::size_t start = 0;
  double acc = 0.0;
  for (double knot : knots) {
    const auto it = std::lower_bound(times.begin(), times.end(), knot);
    if (it == times.end() || *it != knot) {
      throw std::invalid_argument("integration grid does not refine the input breakpoints (missing node at " +
                                  format_real(knot) + ")");
    }
    const auto stop = static_cast<std::size_t>(it - times.begin());
    if (stop > start) {
      acc += simpson_nonuniform(times.subspan(start, stop - start + 1), values.subspan(start, stop - start + 1));
    }
    out.push_back(acc);
    start = std::max(start, stop);
  }
  return out;
}

namespace detail {

// Knots: 0, input breakpoints below t_end, extra times, t_end.
inline std::vector<double> knots_for(const InputSignal& u, std::span<const double> extra, double t_end) {
  std::vector<double> k{0.0};
  for (double b : u.breakpoints()) {
    if (b > 0.0 && b < t_end) k.push_back(b);
  }
  for (double e : extra) {
    if (e > 0.0 && e < t_end) k.push_back(e);
  }
  k.push_back(t_end);
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end()), k.end());
  return k;
}

inline std::vector<double> grid_for_knots(const SpectralSystem& sys, std::span<const double> knots,
                                          const IntegralOptions& opt) {
  const double first = opt.first_width_factor / sys.lambda_max();
  const double cap = opt.max_width_factor / sys.lambda(0);
  std::vector<double> grid{knots.front()};
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const auto piece = graded_nodes(knots[i - 1], knots[i], first, opt.per_panel);
    // graded_nodes doubles panel widths; split oversized panels afterwards
    for (std::size_t j = 1; j < piece.size(); ++j) {
      const double a = piece[j - 1];
      const double b = piece[j];
      const double sub = cap / static_cast<double>(opt.per_panel);
      const auto parts = static_cast<std::size_t>(std::ceil((b - a) / sub));
      for (std::size_t p = 1; p < parts; ++p) grid.push_back(a + (b - a) * static_cast<double>(p) / static_cast<double>(parts));
      grid.push_back(b);
    }
  }
  return grid;
}

}  // namespace detail

/// int_0^{t} f(|phi(s, x0, u)|) ds evaluated at each time in `times`
/// (any order; each must lie in [0, inf)).
template <class F>
std::vector<double> trajectory_integrals(const SpectralSystem& sys, std::span<const double> x0, const InputSignal& u,
                                         std::span<const double> times, F&& f, const IntegralOptions& opt = {}) {
  double t_end = 0.0;
  for (double t : times) {
    if (!(t >= 0.0)) throw std::domain_error("trajectory_integrals: negative time");
    t_end = std::max(t_end, t);
  }
  std::vector<double> out(times.size(), 0.0);
  if (t_end == 0.0) return out;
  const auto knots = detail::knots_for(u, times, t_end);
  const auto grid = detail::grid_for_knots(sys, knots, opt);
  const Trajectory traj = sample_trajectory(sys, x0, u, grid);
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = f(state_norm(traj.states[i]));
  const auto cumulative = integrate_to_knots(grid, vals, knots);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] == 0.0) continue;
    const auto it = std::lower_bound(knots.begin(), knots.end(), times[i]);
    out[i] = cumulative[static_cast<std::size_t>(it - knots.begin())];
  }
  return out;
}

/// int_0^t sigma(|u(s)|) ds, exact for piecewise-constant u.
inline double input_integral(const ComparisonFunction& sigma, const InputSignal& u, double t) {
  const auto bp = u.breakpoints();
  const auto vals = u.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double a = bp[i];
    const double b = std::min(bp[i + 1], t);
    if (b > a) acc += sigma(std::abs(vals[i])) * (b - a);
  }
  return acc;
}

/// psi(|x0|) + t sigma(|u|_inf) - int_0^t alpha(|phi|)
inline double norm_to_integral_margin(const SpectralSystem& sys, const NormToIntegralCertificate& cert,
                                      std::span<const double> x0, const InputSignal& u, double t,
                                      const IntegralOptions& opt = {}) {
  const double ts[] = {t};
  const double lhs = trajectory_integrals(sys, x0, u, ts, cert.alpha, opt)[0];
  return cert.psi(state_norm(x0)) + t * cert.sigma(u.sup_norm()) - lhs;
}

/// psi(|x0|) + int_0^t sigma(|u|) - int_0^t alpha(|phi|)
inline double integral_to_integral_margin(const SpectralSystem& sys, const NormToIntegralCertificate& cert,
                                          std::span<const double> x0, const InputSignal& u, double t,
                                          const IntegralOptions& opt = {}) {
  const double ts[] = {t};
  const double lhs = trajectory_integrals(sys, x0, u, ts, cert.alpha, opt)[0];
  return cert.psi(state_norm(x0)) + input_integral(cert.sigma, u, t) - lhs;
}

/// (eps - 1)|x0|^2 + c(eps)|u|_inf^2 - (finite-difference Dini derivative of V at x0).
inline double dissipation_margin(const SpectralSystem& sys, const LyapunovOperator& op,
                                 const DissipationParameters& params, std::span<const double> x0, const InputSignal& u) {
  const auto steps = default_dini_steps(sys);
  const double n = state_norm(x0);
  const double w = u.sup_norm();
  return (params.epsilon - 1.0) * n * n + params.c_eps * w * w - dini_estimate(op, sys, x0, u, steps).finite_difference;
}

/// Same inequality with the analytic derivative in place of the difference quotient.
inline double dissipation_margin_analytic(const SpectralSystem& sys, const LyapunovOperator& op,
                                          const DissipationParameters& params, std::span<const double> x0,
                                          const InputSignal& u) {
  const double n = state_norm(x0);
  const double w = u.sup_norm();
  return (params.epsilon - 1.0) * n * n + params.c_eps * w * w - v_derivative(op, sys, x0, u.value_at(0.0));
}

struct HittingResult {
  double time = 0.0;         // first time with |phi| <= target (horizon if none)
  double min_norm = 0.0;     // smallest sampled norm on [0, horizon]
  bool hit = false;
};

/// First t in [0, horizon] with |phi(t)| <= target, located on a uniform grid
/// and refined by bisection inside the first crossing interval.
inline HittingResult hitting_time(const SpectralSystem& sys, std::span<const double> x0, const InputSignal& u,
                                  double target, double horizon, std::size_t grid_points = 400) {
  std::vector<double> grid(grid_points + 1);
  for (std::size_t m = 0; m <= grid_points; ++m) grid[m] = horizon * static_cast<double>(m) / static_cast<double>(grid_points);
  const Trajectory traj = sample_trajectory(sys, x0, u, grid);
  HittingResult res{horizon, std::numeric_limits<double>::infinity(), false};
  for (std::size_t m = 0; m < grid.size(); ++m) {
    const double nrm = state_norm(traj.states[m]);
    res.min_norm = std::min(res.min_norm, nrm);
    if (!res.hit && nrm <= target) {
      res.hit = true;
      if (m == 0) {
        res.time = 0.0;
      } else {
        double lo = grid[m - 1];
        double hi = grid[m];
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (state_norm(mild_solution(sys, x0, u, mid)) <= target) {
            hi = mid;
          } else {
            lo = mid;
          }
        }
        res.time = hi;
      }
    }
  }
  return res;
}

/// eps + gamma(|u|_inf) - min_{t <= horizon} |phi(t)|; nonnegative iff the level is reached.
inline double ulim_margin(const SpectralSystem& sys, const ComparisonFunction& gamma, double eps,
                          std::span<const double> x0, const InputSignal& u, double horizon) {
  const double target = eps + gamma(u.sup_norm());
  return target - hitting_time(sys, x0, u, target, horizon).min_norm;
}

/// A-priori bound on reachable norms from |x0|, |u|_inf <= C within time tau: C (M + kappa_upper(tau)).
inline double brs_bound(const SpectralSystem& sys, double C, double tau, std::size_t quad_points = 16) {
  return C * (1.0 + kappa_bounds(sys, tau, quad_points).upper);
}

// ---------------------------------------------------------------------------
// Probes

namespace detail {

inline double scaled_tol(double rel, double scale) { return rel * (1.0 + std::abs(scale)); }

template <class Body>
void for_each_pair(const SpectralSystem& sys, const SampleBudget& budget, Body&& body) {
  for (std::size_t i = 0; i < budget.n_states; ++i) {
    const State x0 = sample_state(budget, sys.n_modes(), i);
    for (std::size_t j = 0; j < budget.n_inputs; ++j) body(x0, sample_input(budget, j));
  }
}

inline std::vector<double> indexed_times(const SampleBudget& budget) {
  std::vector<double> ts;
  for (std::size_t l = 0; l < budget.n_times; ++l) ts.push_back(sample_time(budget, l));
  return ts;
}

}  // namespace detail

inline StabilityReport check_iss(const SpectralSystem& sys, const ISSCertificate& cert, const SampleBudget& budget,
                                 double tol_rel = 1e-9) {
  budget.validate();
  ReportBuilder rb(Property::ISS);
  const auto times = detail::indexed_times(budget);
  detail::for_each_pair(sys, budget, [&](const State& x0, const InputSignal& u) {
    const double bound_u = cert.gamma(u.sup_norm());
    for (double t : times) {
      const double phi = state_norm(mild_solution(sys, x0, u, t));
      const double rhs = cert.beta(state_norm(x0), t) + bound_u;
      rb.add(t, rhs - phi, detail::scaled_tol(tol_rel, rhs + phi), [&] { return Witness{x0, u, t}; });
    }
  });
  return std::move(rb).finish();
}

inline StabilityReport check_uls(const SpectralSystem& sys, const ComparisonFunction& sigma,
                                 const ComparisonFunction& gamma, double r, const SampleBudget& budget,
                                 double tol_rel = 1e-9) {
  if (!(r > 0.0)) throw std::invalid_argument("check_uls: r must be positive");
  SampleBudget local = budget;
  local.radius = r;
  local.validate();
  ReportBuilder rb(Property::ULS);
  const auto times = detail::indexed_times(local);
  detail::for_each_pair(sys, local, [&](const State& x0, const InputSignal& u) {
    const double rhs = sigma(state_norm(x0)) + gamma(u.sup_norm());
    for (double t : times) {
      const double phi = state_norm(mild_solution(sys, x0, u, t));
      rb.add(t, rhs - phi, detail::scaled_tol(tol_rel, rhs + phi), [&] { return Witness{x0, u, t}; });
    }
  });
  return std::move(rb).finish();
}

/// Per (x0, u) with |x0| <= r: the first time the trajectory drops to
/// eps + gamma(|u|_inf). The largest such time is reported as `tau_empirical`.
inline StabilityReport check_ulim(const SpectralSystem& sys, const ComparisonFunction& gamma, double eps, double r,
                                  const SampleBudget& budget, std::size_t grid_points = 400) {
  if (!(eps > 0.0) || !(r > 0.0)) throw std::invalid_argument("check_ulim: eps and r must be positive");
  SampleBudget local = budget;
  local.radius = r;
  local.validate();
  ReportBuilder rb(Property::ULIM);
  double tau = 0.0;
  detail::for_each_pair(sys, local, [&](const State& x0, const InputSignal& u) {
    const double target = eps + gamma(u.sup_norm());
    const HittingResult h = hitting_time(sys, x0, u, target, local.horizon, grid_points);
    if (h.hit) tau = std::max(tau, h.time);
    rb.add(h.time, target - h.min_norm, 0.0, [&] { return Witness{x0, u, local.horizon}; });
  });
  rb.detail("tau_empirical", tau);
  return std::move(rb).finish();
}

/// For eps_j = radius 2^-j (j < levels) finds the largest delta in
/// {eps_j 2^-i : i < probes} such that every sample with |x0|, |u|_inf <= delta
/// stays within eps_j on [0, h]. Samples are unit-radius draws scaled by delta.
inline StabilityReport check_cep(const SpectralSystem& sys, const SampleBudget& budget, double h, std::size_t levels = 4,
                                 std::size_t probes = 12, std::size_t grid_points = 100) {
  if (!(h > 0.0)) throw std::invalid_argument("check_cep: h must be positive");
  budget.validate();
  SampleBudget unit = budget;
  unit.radius = 1.0;
  unit.horizon = h;

  struct PairSup {
    State x0;
    InputSignal u;
    double sup = 0.0;
    double t_at = 0.0;
  };
  std::vector<PairSup> pairs;
  std::vector<double> grid(grid_points + 1);
  for (std::size_t m = 0; m <= grid_points; ++m) grid[m] = h * static_cast<double>(m) / static_cast<double>(grid_points);
  detail::for_each_pair(sys, unit, [&](const State& x0, const InputSignal& u) {
    std::vector<double> g = grid;
    for (double b : u.breakpoints()) {
      if (b > 0.0 && b < h) g.push_back(b);
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    const Trajectory traj = sample_trajectory(sys, x0, u, g);
    PairSup ps{x0, u, 0.0, 0.0};
    for (std::size_t m = 0; m < g.size(); ++m) {
      const double n = state_norm(traj.states[m]);
      if (n > ps.sup) {
        ps.sup = n;
        ps.t_at = g[m];
      }
    }
    pairs.push_back(std::move(ps));
  });
  double sup_all = 0.0;
  for (const auto& p : pairs) sup_all = std::max(sup_all, p.sup);

  ReportBuilder rb(Property::CEP);
  auto scaled_input = [](const InputSignal& u, double s) {
    std::vector<double> v(u.values().begin(), u.values().end());
    for (double& x : v) x *= s;
    return InputSignal({u.breakpoints().begin(), u.breakpoints().end()}, std::move(v));
  };
  for (std::size_t j = 0; j < levels; ++j) {
    const double eps = budget.radius * std::ldexp(1.0, -static_cast<int>(j));
    double delta = 0.0;
    for (std::size_t i = 0; i < probes; ++i) {
      const double cand = eps * std::ldexp(1.0, -static_cast<int>(i));
      if (cand * sup_all <= eps) {
        delta = cand;
        break;
      }
    }
    const double used = delta > 0.0 ? delta : eps * std::ldexp(1.0, -static_cast<int>(probes - 1));
    for (const auto& p : pairs) {
      rb.add(p.t_at, eps - used * p.sup, 0.0, [&] {
        State x = p.x0;
        for (double& c : x) c *= used;
        return Witness{x, scaled_input(p.u, used), p.t_at};
      });
    }
    rb.detail("eps_" + std::to_string(j), eps);
    rb.detail("delta_" + std::to_string(j), delta);
  }
  return std::move(rb).finish();
}

inline StabilityReport check_brs(const SpectralSystem& sys, double C, double tau, const SampleBudget& budget,
                                 double tol_rel = 1e-9) {
  if (!(C > 0.0) || !(tau > 0.0)) throw std::invalid_argument("check_brs: C and tau must be positive");
  SampleBudget local = budget;
  local.radius = C;
  local.horizon = tau;
  local.validate();
  const double bound = brs_bound(sys, C, tau);
  ReportBuilder rb(Property::BRS);
  double sup = 0.0;
  const auto times = detail::indexed_times(local);
  detail::for_each_pair(sys, local, [&](const State& x0, const InputSignal& u) {
    for (double t : times) {
      const double phi = state_norm(mild_solution(sys, x0, u, t));
      sup = std::max(sup, phi);
      rb.add(t, bound - phi, detail::scaled_tol(tol_rel, bound), [&] { return Witness{x0, u, t}; });
    }
  });
  rb.detail("empirical_sup", sup);
  rb.detail("bound", bound);
  return std::move(rb).finish();
}

inline StabilityReport check_norm_to_integral(const SpectralSystem& sys, const NormToIntegralCertificate& cert,
                                              const SampleBudget& budget, const IntegralOptions& opt = {},
                                              double tol_rel = 1e-6) {
  budget.validate();
  ReportBuilder rb(Property::NormToIntegralISS);
  const auto times = detail::indexed_times(budget);
  detail::for_each_pair(sys, budget, [&](const State& x0, const InputSignal& u) {
    const auto lhs = trajectory_integrals(sys, x0, u, times, cert.alpha, opt);
    const double psi = cert.psi(state_norm(x0));
    const double sig = cert.sigma(u.sup_norm());
    for (std::size_t l = 0; l < times.size(); ++l) {
      const double rhs = psi + times[l] * sig;
      rb.add(times[l], rhs - lhs[l], detail::scaled_tol(tol_rel, rhs + lhs[l]), [&] { return Witness{x0, u, times[l]}; });
    }
  });
  return std::move(rb).finish();
}

inline StabilityReport check_integral_to_integral(const SpectralSystem& sys, const NormToIntegralCertificate& cert,
                                                  const SampleBudget& budget, const IntegralOptions& opt = {},
                                                  double tol_rel = 1e-6) {
  budget.validate();
  ReportBuilder rb(Property::IntegralToIntegralISS);
  const auto times = detail::indexed_times(budget);
  detail::for_each_pair(sys, budget, [&](const State& x0, const InputSignal& u) {
    const auto lhs = trajectory_integrals(sys, x0, u, times, cert.alpha, opt);
    const double psi = cert.psi(state_norm(x0));
    for (std::size_t l = 0; l < times.size(); ++l) {
      const double rhs = psi + input_integral(cert.sigma, u, times[l]);
      rb.add(times[l], rhs - lhs[l], detail::scaled_tol(tol_rel, rhs + lhs[l]), [&] { return Witness{x0, u, times[l]}; });
    }
  });
  return std::move(rb).finish();
}

/// Finite-difference Dini derivative of V against (eps - 1)|x0|^2 + c(eps)|u|_inf^2.
/// Also reports the largest disagreement between difference quotient and
/// analytic derivative, relative to 1 + |analytic|.
inline StabilityReport check_dissipation(const SpectralSystem& sys, const LyapunovOperator& op,
                                         const DissipationParameters& params, const SampleBudget& budget,
                                         double tol_rel = 1e-4) {
  budget.validate();
  ReportBuilder rb(Property::Dissipation);
  const auto steps = default_dini_steps(sys);
  double fd_gap = 0.0;
  double worst_analytic = std::numeric_limits<double>::infinity();
  detail::for_each_pair(sys, budget, [&](const State& x0, const InputSignal& u) {
    const DiniEstimate d = dini_estimate(op, sys, x0, u, steps);
    const double n2 = state_norm(x0) * state_norm(x0);
    const double w2 = u.sup_norm() * u.sup_norm();
    const double rhs = (params.epsilon - 1.0) * n2 + params.c_eps * w2;
    fd_gap = std::max(fd_gap, std::abs(d.finite_difference - d.analytic) / (1.0 + std::abs(d.analytic)));
    worst_analytic = std::min(worst_analytic, rhs - d.analytic);
    rb.add(0.0, rhs - d.finite_difference, tol_rel * (1.0 + n2 + w2), [&] { return Witness{x0, u, 0.0}; });
  });
  rb.detail("max_fd_gap", fd_gap);
  rb.detail("worst_analytic_margin", worst_analytic);
  return std::move(rb).finish();
}

/// phi(0, x0, u) == x0 bit for bit.
inline StabilityReport check_identity(const SpectralSystem& sys, const SampleBudget& budget) {
  budget.validate();
  ReportBuilder rb(Property::Identity);
  const double zero[] = {0.0};
  detail::for_each_pair(sys, budget, [&](const State& x0, const InputSignal& u) {
    const Trajectory traj = sample_trajectory(sys, x0, u, zero);
    double dev = 0.0;
    for (std::size_t k = 0; k < x0.size(); ++k) dev = std::max(dev, std::abs(traj.states[0][k] - x0[k]));
    if (traj.states[0] != x0) dev = std::max(dev, std::numeric_limits<double>::denorm_min());
    rb.add(0.0, -dev, 0.0, [&] { return Witness{x0, u, 0.0}; });
  });
  return std::move(rb).finish();
}

/// Inputs agreeing on [0, t) give identical states at t (exact comparison).
inline StabilityReport check_causality(const SpectralSystem& sys, const SampleBudget& budget) {
  budget.validate();
  ReportBuilder rb(Property::Causality);
  const auto times = detail::indexed_times(budget);
  std::size_t j = 0;
  detail::for_each_pair(sys, budget, [&](const State& x0, const InputSignal& u) {
    const InputSignal other = sample_input(budget, budget.n_inputs + (j++ % 7));
    for (double t : times) {
      const InputSignal spliced = InputSignal::concatenate(u, other, t);
      const State a = mild_solution(sys, x0, u, t);
      const State b = mild_solution(sys, x0, spliced, t);
      double dev = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) dev = std::max(dev, std::abs(a[k] - b[k]));
      rb.add(t, -dev, 0.0, [&] { return Witness{x0, spliced, t}; });
    }
  });
  return std::move(rb).finish();
}

/// |phi(t+h, x0, u) - phi(h, phi(t, x0, u), u(t + .))| / |phi(t+h, x0, u)|
inline double cocycle_deviation(const SpectralSystem& sys, std::span<const double> x0, const InputSignal& u, double t,
                                double h) {
  const State direct = mild_solution(sys, x0, u, t + h);
  const State mid = mild_solution(sys, x0, u, t);
  const State restarted = mild_solution(sys, mid, u.shifted(t), h);
  State diff(direct.size());
  for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = direct[k] - restarted[k];
  const double scale = std::max(state_norm(direct), state_norm(restarted));
  const double d = state_norm(diff);
  return d == 0.0 ? 0.0 : d / scale;
}

inline StabilityReport check_cocycle(const SpectralSystem& sys, const SampleBudget& budget, double rel_tol = 1e-10) {
  budget.validate();
  ReportBuilder rb(Property::Cocycle);
  const auto times = detail::indexed_times(budget);
  std::size_t idx = 0;
  detail::for_each_pair(sys, budget, [&](const State& x0, const InputSignal& u) {
    for (double t : times) {
      SampleRng rng(budget.seed, stream::kAux, idx++);
      const double h = rng.uniform(0.0, budget.horizon);
      const double dev = cocycle_deviation(sys, x0, u, t, h);
      rb.add(t, rel_tol - dev, 0.0, [&] { return Witness{x0, u, t}; });
    }
  });
  return std::move(rb).finish();
}

// ---------------------------------------------------------------------------
// ISS <=> ULIM and ULS and BRS

struct BatteryCertificates {
  ISSCertificate iss;
  double ulim_eps = 0.1;
};

struct BatteryResult {
  StabilityReport ulim;
  StabilityReport uls;
  StabilityReport brs;
  StabilityReport iss;
  /// False when the component probes and the ISS probe disagree even after
  /// rerunning the silent side with a larger budget. Probes only falsify, so
  /// agreement is evidence, not proof.
  bool consistent = true;
  std::string note;
};

/// Runs ULIM, ULS, BRS and ISS probes with comparison functions taken from
/// an ISS certificate: sigma = beta(., 0), the same gamma, C = r = radius and
/// tau = horizon.
inline BatteryResult run_iss_characterization_battery(const SpectralSystem& sys, const BatteryCertificates& certs,
                                           const SampleBudget& budget) {
  const ComparisonFunction sigma = ComparisonFunction::linear(certs.iss.beta.M);
  const auto& gamma = certs.iss.gamma;
  auto components = [&](const SampleBudget& b) {
    return std::tuple{check_ulim(sys, gamma, certs.ulim_eps, b.radius, b), check_uls(sys, sigma, gamma, b.radius, b),
                      check_brs(sys, b.radius, b.horizon, b)};
  };
  auto [ulim, uls, brs] = components(budget);
  BatteryResult res{std::move(ulim), std::move(uls), std::move(brs), check_iss(sys, certs.iss, budget), true, {}};
  auto any_component = [](const StabilityReport& a, const StabilityReport& b, const StabilityReport& c) {
    return a.violated() || b.violated() || c.violated();
  };
  const bool comp = any_component(res.ulim, res.uls, res.brs);
  if (comp && !res.iss.violated()) {
    const auto bigger = check_iss(sys, certs.iss, budget.enlarged(2));
    if (!bigger.violated()) {
      res.consistent = false;
      res.note = "component probe violated but ISS probe found no violation on enlarged budget";
    }
  } else if (!comp && res.iss.violated()) {
    auto [u2, s2, b2] = components(budget.enlarged(2));
    if (!any_component(u2, s2, b2)) {
      res.consistent = false;
      res.note = "ISS probe violated but no component probe violated on enlarged budget";
    }
  }
  return res;
}

}  // namespace isslab
