#pragma once

// Deterministic, prefix-stable sample generation for the checkers.
//
// Every sample is drawn from its own generator seeded by (seed, stream,
// index), so the i-th state, j-th input and l-th time never depend on how
// many samples were requested. Enlarging a budget only appends samples.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "isslab/system.hpp"

namespace isslab {

struct SampleBudget {
  std::size_t n_states = 10;
  std::size_t n_inputs = 10;
  std::size_t n_times = 5;
  double horizon = 2.0;
  double radius = 1.0;
  std::uint64_t seed = 20190101;

  void validate() const {
    if (n_states == 0 || n_inputs == 0 || n_times == 0) throw std::invalid_argument("budget: counts must be at least 1");
    if (!(horizon > 0.0)) throw std::invalid_argument("budget: horizon must be positive");
    if (!(radius > 0.0)) throw std::invalid_argument("budget: radius must be positive");
  }

  SampleBudget enlarged(std::size_t factor) const {
    SampleBudget b = *this;
    b.n_states *= factor;
    b.n_inputs *= factor;
    b.n_times *= factor;
    return b;
  }

  std::size_t pair_count() const { return n_states * n_inputs; }

  friend bool operator==(const SampleBudget&, const SampleBudget&) = default;
};

/// Uniform doubles and normals built directly on mt19937_64 bits so the
/// streams are identical across standard libraries.
class SampleRng {
 public:
  SampleRng(std::uint64_t seed, std::uint32_t stream, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream,
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    engine_.seed(seq);
  }

  /// [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index_below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

  double normal() {
    if (spare_) {
      spare_ = false;
      return spare_value_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_value_ = r * std::sin(2.0 * std::numbers::pi * u2);
    spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
  bool spare_ = false;
  double spare_value_ = 0.0;
};

namespace stream {
inline constexpr std::uint32_t kStates = 1;
inline constexpr std::uint32_t kInputs = 2;
inline constexpr std::uint32_t kTimes = 3;
inline constexpr std::uint32_t kAux = 4;
}  // namespace stream

/// Uniform in the ball of the given radius spanned by the first d modes.
inline State sample_ball(SampleRng& rng, std::size_t n, std::size_t d, double radius) {
  State x(n, 0.0);
  double norm = 0.0;
  while (norm == 0.0) {
    for (std::size_t k = 0; k < d; ++k) x[k] = rng.normal();
    norm = state_norm(x);
  }
  const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
  for (std::size_t k = 0; k < d; ++k) x[k] *= r / norm;
  return x;
}

/// Index 0 is the origin. Every fourth sample (when N > 8) is a single high
/// mode +-c e_k with k > 8, which probes the directions where a non-coercive
/// Lyapunov function is small. The rest are uniform in the ball of the first
/// min(N, 8) modes.
inline State sample_state(const SampleBudget& budget, std::size_t n_modes, std::size_t index) {
  const std::size_t low = std::min<std::size_t>(n_modes, 8);
  if (index == 0) return State(n_modes, 0.0);
  SampleRng rng(budget.seed, stream::kStates, index);
  if (n_modes > low && index % 4 == 3) {
    State x(n_modes, 0.0);
    const std::size_t k = low + rng.index_below(n_modes - low);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    x[k] = sign * budget.radius * (1.0 - rng.uniform());
    return x;
  }
  return sample_ball(rng, n_modes, low, budget.radius);
}

/// Index 0: zero input; 1: constant +radius; 2: constant -radius; otherwise
/// 1..8 random segments on [0, horizon] with values uniform in [-radius, radius].
inline InputSignal sample_input(const SampleBudget& budget, std::size_t index) {
  const double T = budget.horizon;
  if (index == 0) return InputSignal::constant(0.0, T);
  if (index == 1) return InputSignal::constant(budget.radius, T);
  if (index == 2) return InputSignal::constant(-budget.radius, T);
  SampleRng rng(budget.seed, stream::kInputs, index);
  const std::size_t m = 1 + rng.index_below(8);
  std::vector<double> cuts;
  for (std::size_t i = 0; i + 1 < m; ++i) cuts.push_back(rng.uniform(0.0, T));
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> bp{0.0};
  for (double c : cuts) {
    if (c > bp.back()) bp.push_back(c);
  }
  bp.push_back(T);
  if (bp[bp.size() - 2] >= T) bp.pop_back();
  std::vector<double> values;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) values.push_back(rng.uniform(-budget.radius, budget.radius));
  return InputSignal(std::move(bp), std::move(values));
}

/// Index 0: the horizon; 1: time 0; otherwise uniform in (0, horizon).
inline double sample_time(const SampleBudget& budget, std::size_t index) {
  if (index == 0) return budget.horizon;
  if (index == 1) return 0.0;
  SampleRng rng(budget.seed, stream::kTimes, index);
  double t = 0.0;
  while (t == 0.0) t = rng.uniform() * budget.horizon;
  return t;
}

/// Sorted, de-duplicated sample times.
inline std::vector<double> sample_times(const SampleBudget& budget) {
  std::vector<double> ts;
  for (std::size_t l = 0; l < budget.n_times; ++l) ts.push_back(sample_time(budget, l));
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

}  // namespace isslab
