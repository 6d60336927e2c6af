#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isslab/system.hpp"
#include "isslab/text.hpp"

namespace isslab {

enum class Property {
  ISS,
  NormToIntegralISS,
  IntegralToIntegralISS,
  ULS,
  ULIM,
  CEP,
  BRS,
  Dissipation,
  Cocycle,
  Identity,
  Causality,
  LyapunovHypotheses,
};

enum class Verdict { NoViolationFound, Violated };

inline std::string_view to_string(Property p) {
  switch (p) {
    case Property::ISS: return "iss";
    case Property::NormToIntegralISS: return "norm_to_integral";
    case Property::IntegralToIntegralISS: return "integral_to_integral";
    case Property::ULS: return "uls";
    case Property::ULIM: return "ulim";
    case Property::CEP: return "cep";
    case Property::BRS: return "brs";
    case Property::Dissipation: return "dissipation";
    case Property::Cocycle: return "cocycle";
    case Property::Identity: return "identity";
    case Property::Causality: return "causality";
    case Property::LyapunovHypotheses: return "lyapunov_hypotheses";
  }
  return "?";
}

inline std::string_view to_string(Verdict v) {
  return v == Verdict::Violated ? "violated" : "no_violation_found";
}

/// The sample at which an inequality failed: initial state, input and time.
struct Witness {
  State x0;
  InputSignal u;
  double t = 0.0;
};

struct SampleMargin {
  std::size_t index = 0;
  double t = 0.0;
  double margin = 0.0;
};

/// Outcome of a falsification probe. A checker can refute an inequality with
/// a witness; otherwise it only reports that no violation was found.
struct StabilityReport {
  Property property = Property::ISS;
  Verdict verdict = Verdict::NoViolationFound;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::optional<Witness> witness;
  std::size_t samples_checked = 0;
  std::vector<SampleMargin> margins;
  /// Probe-specific numbers (empirical tau, (eps, delta) table, ...).
  std::vector<std::pair<std::string, double>> details;

  bool violated() const { return verdict == Verdict::Violated; }

  double detail(std::string_view key) const {
    for (const auto& [k, v] : details) {
      if (k == key) return v;
    }
    throw std::out_of_range("report has no detail " + std::string(key));
  }
};

/// Accumulates per-sample margins and picks the worst one. The minimum is
/// taken over the full list (lowest index wins ties), so the result does not
/// depend on evaluation order.
class ReportBuilder {
 public:
  explicit ReportBuilder(Property p) : property_(p) {}

  /// Records one sample. `tol` is the slack below zero tolerated before the
  /// sample counts as a violation; `make_witness` is only called when the
  /// sample becomes the new worst one.
  template <class MakeWitness>
  void add(double t, double margin, double tol, MakeWitness&& make_witness) {
    const std::size_t idx = margins_.size();
    margins_.push_back({idx, t, margin});
    if (margin < -tol) violated_ = true;
    if (idx == 0 || margin < worst_) {
      worst_ = margin;
      witness_ = make_witness();
    }
  }

  void detail(std::string key, double value) { details_.emplace_back(std::move(key), value); }

  StabilityReport finish() && {
    StabilityReport r;
    r.property = property_;
    r.samples_checked = margins_.size();
    r.worst_margin = margins_.empty() ? 0.0 : worst_;
    r.details = std::move(details_);
    if (violated_) {
      r.verdict = Verdict::Violated;
      r.witness = std::move(witness_);
    }
    r.margins = std::move(margins_);
    return r;
  }

 private:
  Property property_;
  std::vector<SampleMargin> margins_;
  double worst_ = std::numeric_limits<double>::infinity();
  bool violated_ = false;
  Witness witness_;
  std::vector<std::pair<std::string, double>> details_;
};

/// `property,verdict,worst_margin,samples_checked[,witness_file]`
inline std::string serialize_line(const StabilityReport& r, std::string_view witness_file = {}) {
  std::string s(to_string(r.property));
  s += ',';
  s += to_string(r.verdict);
  s += ',';
  s += format_real(r.worst_margin);
  s += ',';
  s += std::to_string(r.samples_checked);
  if (!witness_file.empty()) {
    s += ',';
    s += witness_file;
  }
  return s;
}

}  // namespace isslab
