#pragma once

// Truncated diagonal systems x' = A x + B u in spectral coordinates.
//
// A e_k = -lambda_k e_k and B has coefficients b_k against the eigenbasis, so
// the semigroup acts coordinatewise, T(t) e_k = exp(-lambda_k t) e_k, and on
// every interval where u is constant the mild solution is known in closed
// form. Nothing here time-steps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "isslab/quadrature.hpp"
#include "isslab/text.hpp"

namespace isslab {

/// Spectral coefficients of a state against e_1, ..., e_N.
using State = std::vector<double>;

inline double state_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

inline State unit_vector(std::size_t n, std::size_t k) {
  State e(n, 0.0);
  e.at(k) = 1.0;
  return e;
}

class SpectralSystem {
 public:
  SpectralSystem(std::vector<double> lambdas, std::vector<double> b_coeffs, std::string label = {})
      : lambdas_(std::move(lambdas)), b_(std::move(b_coeffs)), label_(std::move(label)) {
    if (lambdas_.empty()) throw std::invalid_argument("lambdas: need at least one mode");
    if (lambdas_.size() != b_.size()) throw std::invalid_argument("lambdas and b must have equal length");
    if (!(lambdas_.front() > 0.0)) throw std::invalid_argument("lambdas: lambda_1 must be positive");
    for (std::size_t k = 1; k < lambdas_.size(); ++k) {
      if (!(lambdas_[k] > lambdas_[k - 1])) throw std::invalid_argument("lambdas must be strictly increasing");
    }
    for (double v : lambdas_) {
      if (!std::isfinite(v)) throw std::invalid_argument("lambdas must be finite");
    }
    for (double v : b_) {
      if (!std::isfinite(v)) throw std::invalid_argument("b must be finite");
    }
  }

  std::size_t n_modes() const { return lambdas_.size(); }
  std::span<const double> lambdas() const { return lambdas_; }
  std::span<const double> b() const { return b_; }
  double lambda(std::size_t k) const { return lambdas_[k]; }
  double b(std::size_t k) const { return b_[k]; }
  const std::string& label() const { return label_; }
  double lambda_max() const { return lambdas_.back(); }

  /// First n modes only.
  SpectralSystem truncated(std::size_t n) const {
    if (n == 0 || n > n_modes()) throw std::invalid_argument("truncation order out of range");
    return SpectralSystem({lambdas_.begin(), lambdas_.begin() + static_cast<std::ptrdiff_t>(n)},
                          {b_.begin(), b_.begin() + static_cast<std::ptrdiff_t>(n)}, label_);
  }

  friend bool operator==(const SpectralSystem&, const SpectralSystem&) = default;

 private:
  std::vector<double> lambdas_;
  std::vector<double> b_;
  std::string label_;
};

/// x_t = a x_xixi on (0,1), x(0,t) = 0, x(1,t) = u(t).
struct HeatDirichletParams {
  double a = 1.0;
  std::size_t n_modes = 64;
};

/// lambda_k = a pi^2 k^2 and b_k = a sqrt(2) k pi (-1)^(k+1), from the
/// eigenbasis e_k = sqrt(2) sin(k pi xi). The steady state for u = 1 is the
/// profile xi, whose coefficients are b_k / lambda_k = sqrt(2)(-1)^(k+1)/(k pi).
inline SpectralSystem heat_dirichlet(const HeatDirichletParams& params) {
  if (!(params.a > 0.0)) throw std::invalid_argument("heat_dirichlet: a must be positive");
  if (params.n_modes == 0) throw std::invalid_argument("heat_dirichlet: need at least one mode");
  std::vector<double> lambdas(params.n_modes);
  std::vector<double> b(params.n_modes);
  for (std::size_t i = 0; i < params.n_modes; ++i) {
    const double k = static_cast<double>(i + 1);
    lambdas[i] = params.a * std::numbers::pi * std::numbers::pi * k * k;
    b[i] = params.a * std::numbers::sqrt2 * k * std::numbers::pi * ((i % 2 == 0) ? 1.0 : -1.0);
  }
  return SpectralSystem(std::move(lambdas), std::move(b), "heat_dirichlet");
}

/// Piecewise-constant scalar input: value[i] on [breakpoints[i], breakpoints[i+1]),
/// zero from breakpoints.back() on. An empty value list is the zero input.
class InputSignal {
 public:
  InputSignal() : breakpoints_{0.0} {}

  InputSignal(std::vector<double> breakpoints, std::vector<double> values)
      : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (breakpoints_.empty() || breakpoints_.front() != 0.0) throw std::invalid_argument("input breakpoints must start at 0");
    if (breakpoints_.size() != values_.size() + 1) throw std::invalid_argument("input needs one value per segment");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
      if (!(breakpoints_[i] > breakpoints_[i - 1])) throw std::invalid_argument("input breakpoints must increase");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw std::invalid_argument("input values must be finite");
    }
  }

  static InputSignal zero() { return {}; }
  static InputSignal constant(double value, double horizon) { return InputSignal({0.0, horizon}, {value}); }

  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> values() const { return values_; }
  std::size_t n_segments() const { return values_.size(); }
  double horizon() const { return breakpoints_.back(); }

  double value_at(double t) const {
    if (t < 0.0 || t >= horizon()) return 0.0;
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
  }

  double sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  /// u(tau + .)
  InputSignal shifted(double tau) const {
    if (tau < 0.0) throw std::domain_error("input shift must be nonnegative");
    if (tau >= horizon()) return zero();
    std::vector<double> bp{0.0};
    std::vector<double> vals;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (breakpoints_[i + 1] <= tau) continue;
      vals.push_back(values_[i]);
      bp.push_back(breakpoints_[i + 1] - tau);
    }
    return InputSignal(std::move(bp), std::move(vals));
  }

  /// head on [0, tau), tail(. - tau) afterwards.
  static InputSignal concatenate(const InputSignal& head, const InputSignal& tail, double tau) {
    if (!(tau > 0.0)) return tail;
    std::vector<double> bp{0.0};
    std::vector<double> vals;
    for (std::size_t i = 0; i < head.values_.size() && head.breakpoints_[i] < tau; ++i) {
      vals.push_back(head.values_[i]);
      bp.push_back(std::min(head.breakpoints_[i + 1], tau));
    }
    if (bp.back() < tau) {
      vals.push_back(0.0);
      bp.push_back(tau);
    }
    for (std::size_t i = 0; i < tail.values_.size(); ++i) {
      vals.push_back(tail.values_[i]);
      bp.push_back(tail.breakpoints_[i + 1] + tau);
    }
    return InputSignal(std::move(bp), std::move(vals));
  }

  friend bool operator==(const InputSignal&, const InputSignal&) = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// x_k exp(-lambda_k t).
inline State semigroup_apply(const SpectralSystem& sys, double t, std::span<const double> x) {
  if (!(t >= 0.0)) throw std::domain_error("semigroup_apply: time must be nonnegative");
  if (x.size() != sys.n_modes()) throw std::invalid_argument("semigroup_apply: state dimension mismatch");
  State out(x.begin(), x.end());
  if (t == 0.0) return out;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] *= std::exp(-sys.lambda(k) * t);
  return out;
}

namespace detail {

// One closed-form step of length h with constant input v.
inline void step_constant(const SpectralSystem& sys, State& x, double h, double v) {
  if (h <= 0.0) return;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lh = sys.lambda(k) * h;
    const double decay = std::exp(-lh);
    x[k] = decay * x[k];
    if (v != 0.0) x[k] += (sys.b(k) / sys.lambda(k)) * (-std::expm1(-lh)) * v;
  }
}

}  // namespace detail

/// Evolves x from absolute time `from` to `to` under u.
inline void advance(const SpectralSystem& sys, State& x, const InputSignal& u, double from, double to) {
  const auto bp = u.breakpoints();
  const auto vals = u.values();
  double s = from;
  for (std::size_t i = 0; i < vals.size() && s < to; ++i) {
    if (bp[i + 1] <= s) continue;
    const double end = std::min(bp[i + 1], to);
    detail::step_constant(sys, x, end - s, vals[i]);
    s = end;
  }
  if (s < to) detail::step_constant(sys, x, to - s, 0.0);
}

/// phi(t, x0, u) = T(t) x0 + int_0^t T_{-1}(t - s) B u(s) ds, exact per input segment.
inline State mild_solution(const SpectralSystem& sys, std::span<const double> x0, const InputSignal& u, double t) {
  if (!(t >= 0.0)) throw std::domain_error("mild_solution: time must be nonnegative");
  if (x0.size() != sys.n_modes()) throw std::invalid_argument("mild_solution: state dimension mismatch");
  State x(x0.begin(), x0.end());
  advance(sys, x, u, 0.0, t);
  return x;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  SpectralSystem system;
  InputSignal input;

  std::vector<double> norms() const {
    std::vector<double> out;
    out.reserve(states.size());
    for (const auto& s : states) out.push_back(state_norm(s));
    return out;
  }
};

/// States on an increasing grid starting at 0. Consecutive grid points are
/// joined by exact steps, so refining the grid leaves samples unchanged up to
/// rounding.
inline Trajectory sample_trajectory(const SpectralSystem& sys, std::span<const double> x0, const InputSignal& u,
                                    std::span<const double> grid) {
  if (grid.empty() || grid.front() != 0.0) throw std::invalid_argument("sample_trajectory: grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("sample_trajectory: grid must be strictly increasing");
  }
  if (x0.size() != sys.n_modes()) throw std::invalid_argument("sample_trajectory: state dimension mismatch");
  Trajectory traj{{grid.begin(), grid.end()}, {}, sys, u};
  traj.states.reserve(grid.size());
  State x(x0.begin(), x0.end());
  traj.states.push_back(x);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    advance(sys, x, u, grid[i - 1], grid[i]);
    traj.states.push_back(x);
  }
  return traj;
}

/// `t,norm,c1,...,cN`, 17 significant digits.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,norm";
  for (std::size_t k = 1; k <= traj.system.n_modes(); ++k) os << ",c" << k;
  os << '\n';
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    os << format_real(traj.times[i]) << ',' << format_real(state_norm(traj.states[i]));
    for (double c : traj.states[i]) os << ',' << format_real(c);
    os << '\n';
  }
}

/// Two-sided bracket on the input-to-state constant kappa(t).
struct AdmissibilityBound {
  double t = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Norm of the operator T(s) B, i.e. sqrt(sum_k b_k^2 exp(-2 lambda_k s)).
inline double semigroup_input_norm(const SpectralSystem& sys, double s) {
  double acc = 0.0;
  for (std::size_t k = 0; k < sys.n_modes(); ++k) {
    const double v = sys.b(k) * std::exp(-sys.lambda(k) * s);
    acc += v * v;
  }
  return std::sqrt(acc);
}

/// lower: response norm to the unit constant input (an achievable value).
/// upper: int_0^t ||T(s) B|| ds by Gauss-Legendre on panels graded
/// geometrically toward s = 0, where the integrand is largest.
inline AdmissibilityBound kappa_bounds(const SpectralSystem& sys, double t, std::size_t quad_points = 16) {
  if (!(t > 0.0)) throw std::domain_error("kappa_bounds: time must be positive");
  if (quad_points == 0) throw std::invalid_argument("kappa_bounds: need at least one quadrature point");
  const State zero(sys.n_modes(), 0.0);
  const double lower = state_norm(mild_solution(sys, zero, InputSignal::constant(1.0, t), t));

  const GaussRule rule = gauss_legendre(quad_points);
  auto panel = [&](double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * semigroup_input_norm(sys, mid + half * rule.nodes[i]);
    return acc * half;
  };
  // Panels [t q^(j+1), t q^j]; the innermost [0, s_min] has an essentially
  // constant integrand once s_min * lambda_max is small.
  const double s_min = std::min(t, 1e-6 / sys.lambda_max());
  double upper = 0.0;
  double hi = t;
  while (hi > s_min) {
    const double lo = std::max(0.5 * hi, s_min);
    upper += panel(lo, hi);
    hi = lo;
  }
  upper += panel(0.0, hi);
  // The two bounds coincide for a single mode; keep rounding from inverting them.
  return {t, lower, std::max(upper, lower)};
}

}  // namespace isslab
