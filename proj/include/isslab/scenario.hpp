#pragma once

// Scenario files: line-oriented `section.key = value` pairs, `#` comments,
// comma-separated lists, and comparison functions written as
// `linear(c)`, `power(c,p)`, `saturation(c,s)`, `compose(f,g)`.
//
//   system.preset        heat_dirichlet | diagonal
//   system.a             diffusivity (heat_dirichlet)
//   system.modes         truncation order (heat_dirichlet)
//   system.lambdas       eigenvalues of -A (diagonal)
//   system.b             input coefficients (diagonal)
//   system.label         free text
//   lyapunov.construction    neg_inverse | datko
//   lyapunov.epsilon         in (0,1)
//   lyapunov.kappa_gate_time, lyapunov.kappa_threshold
//   certificate.beta     decay(M,omega)
//   certificate.gamma    comparison function
//   certificate.integral lyapunov | derive_from_iss | explicit
//   certificate.alpha, certificate.psi, certificate.sigma   (explicit only)
//   checks.list          names, see kCheckNames
//   checks.ulim_eps, checks.cep_h, checks.brs_c, checks.brs_tau
//   budget.n_states, budget.n_inputs, budget.n_times, budget.horizon,
//   budget.radius, budget.seed
//   outputs.dir, outputs.trajectories, outputs.timing

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "isslab/comparison.hpp"
#include "isslab/lyapunov.hpp"
#include "isslab/sampling.hpp"
#include "isslab/text.hpp"

namespace isslab {

inline constexpr std::array<std::string_view, 12> kCheckNames{
    "identity", "causality", "cocycle",     "iss",         "uls",                  "ulim",
    "brs",      "cep",       "dissipation", "norm_to_integral", "integral_to_integral",
    "lyapunov_hypotheses"};

/// Raised for malformed or invalid scenario text. `line` and `column` are
/// 1-based; 0 when the problem is not tied to a position.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& what, std::size_t line = 0, std::size_t column = 0, std::string key = {})
      : std::runtime_error(line ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what
                                : what),
        line_(line),
        column_(column),
        key_(std::move(key)) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& key() const { return key_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string key_;
};

enum class SystemPreset { HeatDirichlet, Diagonal };
enum class IntegralCertificateSource { Lyapunov, DeriveFromIss, Explicit };

struct Scenario {
  SystemPreset preset = SystemPreset::HeatDirichlet;
  double a = 1.0;
  std::size_t modes = 64;
  std::vector<double> lambdas;
  std::vector<double> b;
  std::string label;

  LyapunovConstruction construction = LyapunovConstruction::NegInverseA;
  double epsilon = 0.5;
  double kappa_gate_time = 1e-3;
  double kappa_threshold = 1e-2;

  std::optional<DecayEnvelope> beta;
  std::optional<ComparisonFunction> gamma;
  IntegralCertificateSource integral = IntegralCertificateSource::Lyapunov;
  std::optional<ComparisonFunction> alpha;
  std::optional<ComparisonFunction> psi;
  std::optional<ComparisonFunction> sigma;

  std::vector<std::string> checks;
  double ulim_eps = 0.1;
  double cep_h = 1.0;
  std::optional<double> brs_c;
  std::optional<double> brs_tau;

  SampleBudget budget;

  std::string out_dir = "out";
  std::size_t trajectories = 4;
  bool timing = false;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

inline std::string_view preset_name(SystemPreset p) { return p == SystemPreset::Diagonal ? "diagonal" : "heat_dirichlet"; }

inline std::string_view integral_name(IntegralCertificateSource s) {
  switch (s) {
    case IntegralCertificateSource::DeriveFromIss: return "derive_from_iss";
    case IntegralCertificateSource::Explicit: return "explicit";
    default: return "lyapunov";
  }
}

struct ValueCursor {
  std::string_view text;
  std::size_t line;
  std::size_t column;  // of the first character of text
  std::string key;

  [[noreturn]] void syntax(const std::string& msg, std::size_t offset = 0) const {
    throw ScenarioError(msg, line, column + offset, key);
  }
  [[noreturn]] void invalid(const std::string& msg) const { throw ScenarioError(key + ": " + msg, line, column, key); }

  double real() const {
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) syntax("expected a number for " + key, static_cast<std::size_t>(ptr - first));
    return v;
  }

  std::uint64_t integer() const {
    std::uint64_t v = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) syntax("expected a nonnegative integer for " + key, static_cast<std::size_t>(ptr - first));
    return v;
  }

  bool boolean() const {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    syntax("expected true or false for " + key);
  }

  std::vector<std::string_view> items() const {
    std::vector<std::string_view> out;
    if (text.empty()) return out;
    std::size_t start = 0;
    while (true) {
      const auto comma = text.find(',', start);
      const auto piece = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (piece.empty()) syntax("empty list item in " + key, start);
      out.push_back(piece);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return out;
  }

  std::vector<double> reals() const {
    std::vector<double> out;
    for (auto item : items()) out.push_back(ValueCursor{item, line, column + static_cast<std::size_t>(item.data() - text.data()), key}.real());
    return out;
  }

  ComparisonFunction comparison() const {
    try {
      return parse_comparison(text);
    } catch (const std::invalid_argument& e) {
      syntax(std::string("bad comparison function for ") + key + " (" + e.what() + ")");
    }
  }

  DecayEnvelope decay() const {
    try {
      return parse_decay(text);
    } catch (const std::invalid_argument& e) {
      syntax(std::string("bad decay envelope for ") + key + " (" + e.what() + ")");
    }
  }
};

}  // namespace detail

/// Strict parser: unknown keys, duplicate keys and invalid values are errors.
inline Scenario parse_scenario(std::string_view text) {
  Scenario s;
  std::vector<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    const std::size_t key_col = static_cast<std::size_t>(trim(line).data() - line.data()) + 1;
    if (eq == std::string_view::npos) throw ScenarioError("expected 'section.key = value'", line_no, key_col);
    const std::string key(trim(line.substr(0, eq)));
    if (key.find('.') == std::string::npos) throw ScenarioError("key must have the form section.key", line_no, key_col, key);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) throw ScenarioError("duplicate key " + key, line_no, key_col, key);
    seen.push_back(key);
    const std::string_view raw = line.substr(eq + 1);
    const std::string_view value = trim(raw);
    const std::size_t val_col = value.empty() ? eq + 2 : static_cast<std::size_t>(value.data() - line.data()) + 1;
    const detail::ValueCursor v{value, line_no, val_col, key};

    if (key == "system.preset") {
      if (value == "heat_dirichlet") s.preset = SystemPreset::HeatDirichlet;
      else if (value == "diagonal") s.preset = SystemPreset::Diagonal;
      else v.invalid("unknown preset '" + std::string(value) + "'");
    } else if (key == "system.a") {
      s.a = v.real();
    } else if (key == "system.modes") {
      s.modes = static_cast<std::size_t>(v.integer());
    } else if (key == "system.lambdas") {
      s.lambdas = v.reals();
    } else if (key == "system.b") {
      s.b = v.reals();
    } else if (key == "system.label") {
      s.label = std::string(value);
    } else if (key == "lyapunov.construction") {
      if (value == "neg_inverse") s.construction = LyapunovConstruction::NegInverseA;
      else if (value == "datko") s.construction = LyapunovConstruction::Datko;
      else v.invalid("unknown construction '" + std::string(value) + "'");
    } else if (key == "lyapunov.epsilon") {
      s.epsilon = v.real();
    } else if (key == "lyapunov.kappa_gate_time") {
      s.kappa_gate_time = v.real();
    } else if (key == "lyapunov.kappa_threshold") {
      s.kappa_threshold = v.real();
    } else if (key == "certificate.beta") {
      s.beta = v.decay();
    } else if (key == "certificate.gamma") {
      s.gamma = v.comparison();
    } else if (key == "certificate.integral") {
      if (value == "lyapunov") s.integral = IntegralCertificateSource::Lyapunov;
      else if (value == "derive_from_iss") s.integral = IntegralCertificateSource::DeriveFromIss;
      else if (value == "explicit") s.integral = IntegralCertificateSource::Explicit;
      else v.invalid("unknown source '" + std::string(value) + "'");
    } else if (key == "certificate.alpha") {
      s.alpha = v.comparison();
    } else if (key == "certificate.psi") {
      s.psi = v.comparison();
    } else if (key == "certificate.sigma") {
      s.sigma = v.comparison();
    } else if (key == "checks.list") {
      s.checks.clear();
      for (auto item : v.items()) {
        if (std::find(kCheckNames.begin(), kCheckNames.end(), item) == kCheckNames.end()) {
          v.invalid("unknown check '" + std::string(item) + "'");
        }
        s.checks.emplace_back(item);
      }
    } else if (key == "checks.ulim_eps") {
      s.ulim_eps = v.real();
    } else if (key == "checks.cep_h") {
      s.cep_h = v.real();
    } else if (key == "checks.brs_c") {
      s.brs_c = v.real();
    } else if (key == "checks.brs_tau") {
      s.brs_tau = v.real();
    } else if (key == "budget.n_states") {
      s.budget.n_states = static_cast<std::size_t>(v.integer());
    } else if (key == "budget.n_inputs") {
      s.budget.n_inputs = static_cast<std::size_t>(v.integer());
    } else if (key == "budget.n_times") {
      s.budget.n_times = static_cast<std::size_t>(v.integer());
    } else if (key == "budget.horizon") {
      s.budget.horizon = v.real();
    } else if (key == "budget.radius") {
      s.budget.radius = v.real();
    } else if (key == "budget.seed") {
      s.budget.seed = v.integer();
    } else if (key == "outputs.dir") {
      s.out_dir = std::string(value);
    } else if (key == "outputs.trajectories") {
      s.trajectories = static_cast<std::size_t>(v.integer());
    } else if (key == "outputs.timing") {
      s.timing = v.boolean();
    } else {
      throw ScenarioError("unknown key " + key, line_no, key_col, key);
    }
  }
  return s;
}

/// Semantic validation; throws ScenarioError naming the offending key.
inline void validate(const Scenario& s) {
  auto bad = [](const std::string& key, const std::string& msg) { throw ScenarioError(key + ": " + msg, 0, 0, key); };
  if (s.preset == SystemPreset::HeatDirichlet) {
    if (!(s.a > 0.0)) bad("system.a", "must be positive");
    if (s.modes == 0) bad("system.modes", "must be at least 1");
  } else {
    if (s.lambdas.empty()) bad("system.lambdas", "required for the diagonal preset");
    if (!(s.lambdas.front() > 0.0)) bad("system.lambdas", "lambda_1 must be positive");
    for (std::size_t k = 1; k < s.lambdas.size(); ++k) {
      if (!(s.lambdas[k] > s.lambdas[k - 1])) bad("system.lambdas", "must be strictly increasing");
    }
    if (s.b.size() != s.lambdas.size()) bad("system.b", "must have the same length as system.lambdas");
  }
  if (!(s.epsilon > 0.0 && s.epsilon < 1.0)) bad("lyapunov.epsilon", "epsilon must lie in (0,1)");
  if (!(s.kappa_gate_time > 0.0)) bad("lyapunov.kappa_gate_time", "must be positive");
  if (!(s.kappa_threshold > 0.0)) bad("lyapunov.kappa_threshold", "must be positive");
  if (s.integral == IntegralCertificateSource::Explicit) {
    if (!s.alpha) bad("certificate.alpha", "required when certificate.integral = explicit");
    if (!s.psi) bad("certificate.psi", "required when certificate.integral = explicit");
    if (!s.sigma) bad("certificate.sigma", "required when certificate.integral = explicit");
  } else if (s.alpha || s.psi || s.sigma) {
    bad(s.alpha ? "certificate.alpha" : s.psi ? "certificate.psi" : "certificate.sigma",
        "only allowed when certificate.integral = explicit");
  }
  if (!(s.ulim_eps > 0.0)) bad("checks.ulim_eps", "must be positive");
  if (!(s.cep_h > 0.0)) bad("checks.cep_h", "must be positive");
  if (s.brs_c && !(*s.brs_c > 0.0)) bad("checks.brs_c", "must be positive");
  if (s.brs_tau && !(*s.brs_tau > 0.0)) bad("checks.brs_tau", "must be positive");
  if (s.budget.n_states == 0) bad("budget.n_states", "must be at least 1");
  if (s.budget.n_inputs == 0) bad("budget.n_inputs", "must be at least 1");
  if (s.budget.n_times == 0) bad("budget.n_times", "must be at least 1");
  if (!(s.budget.horizon > 0.0)) bad("budget.horizon", "must be positive");
  if (!(s.budget.radius > 0.0)) bad("budget.radius", "must be positive");
  if (s.out_dir.empty()) bad("outputs.dir", "must not be empty");
}

inline Scenario parse_and_validate(std::string_view text) {
  Scenario s = parse_scenario(text);
  validate(s);
  return s;
}

/// Canonical text form; parse_scenario(serialize_scenario(s)) == s.
inline std::string serialize_scenario(const Scenario& s) {
  std::ostringstream os;
  os << "system.preset = " << detail::preset_name(s.preset) << '\n';
  if (s.preset == SystemPreset::HeatDirichlet) {
    os << "system.a = " << format_real(s.a) << '\n';
    os << "system.modes = " << s.modes << '\n';
  }
  if (!s.lambdas.empty()) os << "system.lambdas = " << join_reals(s.lambdas, ", ") << '\n';
  if (!s.b.empty()) os << "system.b = " << join_reals(s.b, ", ") << '\n';
  if (!s.label.empty()) os << "system.label = " << s.label << '\n';
  os << "lyapunov.construction = " << to_string(s.construction) << '\n';
  os << "lyapunov.epsilon = " << format_real(s.epsilon) << '\n';
  os << "lyapunov.kappa_gate_time = " << format_real(s.kappa_gate_time) << '\n';
  os << "lyapunov.kappa_threshold = " << format_real(s.kappa_threshold) << '\n';
  if (s.beta) os << "certificate.beta = " << s.beta->to_string() << '\n';
  if (s.gamma) os << "certificate.gamma = " << s.gamma->to_string() << '\n';
  os << "certificate.integral = " << detail::integral_name(s.integral) << '\n';
  if (s.alpha) os << "certificate.alpha = " << s.alpha->to_string() << '\n';
  if (s.psi) os << "certificate.psi = " << s.psi->to_string() << '\n';
  if (s.sigma) os << "certificate.sigma = " << s.sigma->to_string() << '\n';
  os << "checks.list = ";
  for (std::size_t i = 0; i < s.checks.size(); ++i) os << (i ? ", " : "") << s.checks[i];
  os << '\n';
  os << "checks.ulim_eps = " << format_real(s.ulim_eps) << '\n';
  os << "checks.cep_h = " << format_real(s.cep_h) << '\n';
  if (s.brs_c) os << "checks.brs_c = " << format_real(*s.brs_c) << '\n';
  if (s.brs_tau) os << "checks.brs_tau = " << format_real(*s.brs_tau) << '\n';
  os << "budget.n_states = " << s.budget.n_states << '\n';
  os << "budget.n_inputs = " << s.budget.n_inputs << '\n';
  os << "budget.n_times = " << s.budget.n_times << '\n';
  os << "budget.horizon = " << format_real(s.budget.horizon) << '\n';
  os << "budget.radius = " << format_real(s.budget.radius) << '\n';
  os << "budget.seed = " << s.budget.seed << '\n';
  os << "outputs.dir = " << s.out_dir << '\n';
  os << "outputs.trajectories = " << s.trajectories << '\n';
  os << "outputs.timing = " << (s.timing ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace isslab
