#pragma once

// Diagonal Lyapunov operators P for spectral systems, the quadratic form
// V(x) = <P x, x>, its derivative along trajectories, and the constants of
// the linear dissipation inequality
//
//   dV/dt <= (eps - 1) |x0|^2 + c(eps) |u|_inf^2,
//   c(eps) = (|A*P| + |PA|)^2 |A^{-1}B|^2 M^2 / (4 eps) + M |A*P| |A^{-1}B| kappa(0).

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "isslab/report.hpp"
#include "isslab/sampling.hpp"
#include "isslab/system.hpp"

namespace isslab {

enum class LyapunovConstruction { NegInverseA, Datko };

inline std::string_view to_string(LyapunovConstruction c) {
  return c == LyapunovConstruction::Datko ? "datko" : "neg_inverse";
}

class LyapunovOperator {
 public:
  LyapunovOperator(std::vector<double> p, LyapunovConstruction construction)
      : p_(std::move(p)), construction_(construction) {
    if (p_.empty()) throw std::invalid_argument("Lyapunov operator needs at least one coefficient");
    for (double v : p_) {
      if (!(v > 0.0)) throw std::invalid_argument("Lyapunov coefficients must be positive");
    }
  }

  std::span<const double> coefficients() const { return p_; }
  double coefficient(std::size_t k) const { return p_[k]; }
  std::size_t n_modes() const { return p_.size(); }
  LyapunovConstruction construction() const { return construction_; }

  /// |P| = max_k p_k.
  double norm() const { return *std::max_element(p_.begin(), p_.end()); }

 private:
  std::vector<double> p_;
  LyapunovConstruction construction_;
};

/// P = -A^{-1}: p_k = 1 / lambda_k.
inline LyapunovOperator build_neg_inverse(const SpectralSystem& sys) {
  std::vector<double> p(sys.n_modes());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = 1.0 / sys.lambda(k);
  return {std::move(p), LyapunovConstruction::NegInverseA};
}

/// Solution of <P x, A x> + <A x, P x> = -|x|^2: p_k = 1 / (2 lambda_k).
inline LyapunovOperator build_datko(const SpectralSystem& sys) {
  std::vector<double> p(sys.n_modes());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = 0.5 / sys.lambda(k);
  return {std::move(p), LyapunovConstruction::Datko};
}

inline LyapunovOperator build_lyapunov(const SpectralSystem& sys, LyapunovConstruction c) {
  return c == LyapunovConstruction::Datko ? build_datko(sys) : build_neg_inverse(sys);
}

inline double v_value(const LyapunovOperator& op, std::span<const double> x) {
  if (x.size() != op.n_modes()) throw std::invalid_argument("v_value: state dimension mismatch");
  double v = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) v += op.coefficient(k) * x[k] * x[k];
  return v;
}

/// 2 <P x, A x> + |x|^2; identically zero for the Datko construction.
inline double lyapunov_residual(const LyapunovOperator& op, const SpectralSystem& sys, std::span<const double> x) {
  double acc = 0.0;
  double nrm2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    acc += op.coefficient(k) * (-sys.lambda(k)) * x[k] * x[k];
    nrm2 += x[k] * x[k];
  }
  return 2.0 * acc + nrm2;
}

/// d/dt V(phi(t)) at t = 0+ for input value u0: 2 sum_k p_k x_k (-lambda_k x_k + b_k u0).
inline double v_derivative(const LyapunovOperator& op, const SpectralSystem& sys, std::span<const double> x, double u0) {
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += op.coefficient(k) * x[k] * (-sys.lambda(k) * x[k] + sys.b(k) * u0);
  return 2.0 * acc;
}

struct DiniEstimate {
  double finite_difference = 0.0;  // max over h of (V(phi(h)) - V(x)) / h
  double analytic = 0.0;           // classical right derivative, u right-continuous at 0
};

inline DiniEstimate dini_estimate(const LyapunovOperator& op, const SpectralSystem& sys, std::span<const double> x,
                                  const InputSignal& u, std::span<const double> h_seq) {
  if (h_seq.empty()) throw std::invalid_argument("dini_estimate: empty step sequence");
  for (std::size_t i = 0; i < h_seq.size(); ++i) {
    if (!(h_seq[i] > 0.0)) throw std::invalid_argument("dini_estimate: steps must be positive");
    if (i > 0 && !(h_seq[i] < h_seq[i - 1])) throw std::invalid_argument("dini_estimate: steps must decrease");
  }
  const double v0 = v_value(op, x);
  double best = -std::numeric_limits<double>::infinity();
  for (double h : h_seq) best = std::max(best, (v_value(op, mild_solution(sys, x, u, h)) - v0) / h);
  return {best, v_derivative(op, sys, x, u.value_at(0.0))};
}

/// Steps {1e-4, 1e-5, 1e-6} / lambda_N: small against the fastest mode, so the
/// difference quotient is within ~1e-4 relative of the derivative.
inline std::vector<double> default_dini_steps(const SpectralSystem& sys) {
  const double s = 1.0 / sys.lambda_max();
  return {1e-4 * s, 1e-5 * s, 1e-6 * s};
}

struct DissipationParameters {
  double epsilon = 0.5;
  double c_eps = 0.0;
  double norm_AstarP = 0.0;
  double norm_PA = 0.0;
  double norm_AinvB = 0.0;
  double M = 1.0;
  double kappa0 = 0.0;
};

inline double assemble_c_eps(const DissipationParameters& d) {
  const double s = d.norm_AstarP + d.norm_PA;
  return s * s * d.norm_AinvB * d.norm_AinvB * d.M * d.M / (4.0 * d.epsilon) + d.M * d.norm_AstarP * d.norm_AinvB * d.kappa0;
}

/// How kappa(0) = lim_{t->0} kappa(t) is settled. kappa is nondecreasing in t,
/// so the upper bound at any probed time bounds kappa(0) from above. If the
/// bound at `gate_time` is below `threshold`, kappa(0) is taken as 0;
/// otherwise the upper bound at the smallest probe time is used.
struct Kappa0Policy {
  std::vector<double> probe_times{1e-1, 1e-2, 1e-3};
  double gate_time = 1e-3;
  double threshold = 1e-2;
  std::size_t quad_points = 16;
};

struct Kappa0Evidence {
  std::vector<AdmissibilityBound> probes;
  AdmissibilityBound gate;
  bool gate_passed = false;
  double kappa0 = 0.0;
};

inline Kappa0Evidence estimate_kappa0(const SpectralSystem& sys, const Kappa0Policy& policy = {}) {
  Kappa0Evidence ev;
  for (double t : policy.probe_times) ev.probes.push_back(kappa_bounds(sys, t, policy.quad_points));
  ev.gate = kappa_bounds(sys, policy.gate_time, policy.quad_points);
  ev.gate_passed = ev.gate.upper < policy.threshold;
  if (ev.gate_passed) {
    ev.kappa0 = 0.0;
  } else {
    AdmissibilityBound smallest = ev.gate;
    for (const auto& p : ev.probes) {
      if (p.t < smallest.t) smallest = p;
    }
    ev.kappa0 = smallest.upper;
  }
  return ev;
}

/// Closed forms for diagonal self-adjoint systems: |A*P| = |PA| = max_k lambda_k p_k,
/// M = 1 (contraction semigroup), |A^{-1}B| = sqrt(sum_k (b_k / lambda_k)^2).
inline DissipationParameters dissipation_constants(const LyapunovOperator& op, const SpectralSystem& sys, double epsilon,
                                                   double kappa0) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::domain_error("epsilon must lie in (0,1)");
  if (!(kappa0 >= 0.0)) throw std::domain_error("kappa0 must be nonnegative");
  if (op.n_modes() != sys.n_modes()) throw std::invalid_argument("operator and system dimensions differ");
  DissipationParameters d;
  d.epsilon = epsilon;
  double lp = 0.0;
  double ainvb2 = 0.0;
  for (std::size_t k = 0; k < sys.n_modes(); ++k) {
    lp = std::max(lp, sys.lambda(k) * op.coefficient(k));
    const double q = sys.b(k) / sys.lambda(k);
    ainvb2 += q * q;
  }
  d.norm_AstarP = lp;
  d.norm_PA = lp;
  d.norm_AinvB = std::sqrt(ainvb2);
  d.M = 1.0;
  d.kappa0 = kappa0;
  d.c_eps = assemble_c_eps(d);
  return d;
}

inline DissipationParameters dissipation_constants(const LyapunovOperator& op, const SpectralSystem& sys, double epsilon,
                                                   const Kappa0Policy& policy = {}) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::domain_error("epsilon must lie in (0,1)");
  return dissipation_constants(op, sys, epsilon, estimate_kappa0(sys, policy).kappa0);
}

/// Hypotheses of the -A^{-1} construction for a diagonal self-adjoint A:
///   (a) D(A) in D(A*): holds structurally (A = A*).
///   (b) <A* A^{-1} x, x> + delta |x|^2 >= 0: A* A^{-1} = I, so delta = 0 works;
///       the smallest delta needed over the samples is reported.
///   (c) <A x, x> < 0 for x != 0: checked on samples (x = 0 is excluded).
/// Per-sample margin is min(<A*A^{-1}x,x>, -<Ax,x>) / |x|^2.
inline StabilityReport check_lyapunov_hypotheses(const SpectralSystem& sys, const SampleBudget& budget) {
  budget.validate();
  const std::size_t n = sys.n_modes();
  ReportBuilder rb(Property::LyapunovHypotheses);
  double delta_min = 0.0;
  for (std::size_t i = 0; i < budget.n_states; ++i) {
    const State x = sample_state(budget, n, i);
    const double nrm2 = state_norm(x) * state_norm(x);
    if (nrm2 == 0.0) continue;
    double b_form = 0.0;
    double c_form = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double a = -sys.lambda(k);
      const double ainv = -1.0 / sys.lambda(k);
      b_form += a * ainv * x[k] * x[k];
      c_form += a * x[k] * x[k];
    }
    delta_min = std::max(delta_min, -b_form / nrm2);
    const double margin = std::min(b_form / nrm2, -c_form / nrm2);
    rb.add(0.0, margin, 1e-12, [&] { return Witness{x, InputSignal::zero(), 0.0}; });
  }
  rb.detail("a_structural", 1.0);
  rb.detail("delta_min", delta_min);
  return std::move(rb).finish();
}

}  // namespace isslab
