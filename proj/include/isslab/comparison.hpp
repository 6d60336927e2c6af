#pragma once

// Comparison functions (classes K, K-infinity and sections of KL functions)
// represented as a closed algebra of parametric forms, plus the exact
// factorization of exponential KL envelopes into two K-infinity functions.

#include <cctype>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "isslab/text.hpp"

namespace isslab {

enum class ComparisonKind { K, Kinf, KLSection };

/// A strictly increasing function f : [0, inf) -> [0, inf) with f(0) = 0.
///
/// Forms:
///   linear(c)         f(r) = c r
///   power(c, p)       f(r) = c r^p
///   saturation(c, s)  f(r) = c r / (s + r)      (class K, bounded by c)
///   composition       f = f_0 o f_1 o ... o f_{n-1}
///
/// Values are immutable after construction.
class ComparisonFunction {
 public:
  enum class Form { Linear, Power, Saturation, Composition };

  static ComparisonFunction linear(double c) {
    require_positive(c, "linear: coefficient");
    return ComparisonFunction(Form::Linear, c, 1.0, ComparisonKind::Kinf);
  }

  static ComparisonFunction power(double c, double p) {
    require_positive(c, "power: coefficient");
    require_positive(p, "power: exponent");
    if (p == 1.0) return linear(c);
    return ComparisonFunction(Form::Power, c, p, ComparisonKind::Kinf);
  }

  static ComparisonFunction saturation(double c, double s) {
    require_positive(c, "saturation: level");
    require_positive(s, "saturation: half-level point");
    return ComparisonFunction(Form::Saturation, c, s, ComparisonKind::K);
  }

  /// outer o inner. Monomial forms collapse to a single power law:
  /// c1 (c2 r^p2)^p1 = c1 c2^p1 r^(p1 p2).
  static ComparisonFunction compose(const ComparisonFunction& outer, const ComparisonFunction& inner) {
    if (outer.is_monomial() && inner.is_monomial()) {
      const double p = outer.exponent() * inner.exponent();
      const double c = outer.coeff_ * std::pow(inner.coeff_, outer.exponent());
      return power(c, p);
    }
    // Chains never hold two adjacent monomials, so every composition has one
    // canonical representation.
    std::vector<ComparisonFunction> chain;
    auto push = [&chain](const ComparisonFunction& f) {
      if (!chain.empty() && chain.back().is_monomial() && f.is_monomial()) {
        chain.back() = compose(chain.back(), f);
      } else {
        chain.push_back(f);
      }
    };
    auto append = [&push](const ComparisonFunction& f) {
      if (f.form_ == Form::Composition) {
        for (const auto& g : f.chain_) push(g);
      } else {
        push(f);
      }
    };
    append(outer);
    append(inner);
    return composition(std::move(chain));
  }

  /// chain[0] is applied last (outermost).
  static ComparisonFunction composition(std::vector<ComparisonFunction> chain) {
    if (chain.empty()) throw std::invalid_argument("composition: empty chain");
    if (chain.size() == 1) return chain.front();
    ComparisonKind kind = ComparisonKind::Kinf;
    for (const auto& f : chain) {
      if (f.kind_ == ComparisonKind::K) kind = ComparisonKind::K;
    }
    ComparisonFunction out(Form::Composition, 1.0, 1.0, kind);
    out.chain_ = std::move(chain);
    return out;
  }

  /// The linear section r -> factor * r of a KL function at a fixed time.
  static ComparisonFunction kl_section(double factor) {
    require_positive(factor, "KL section: factor");
    return ComparisonFunction(Form::Linear, factor, 1.0, ComparisonKind::KLSection);
  }

  double operator()(double r) const {
    if (!(r >= 0.0)) throw std::domain_error("comparison function evaluated at negative argument");
    return eval(r);
  }

  Form form() const { return form_; }
  ComparisonKind kind() const { return kind_; }
  double coefficient() const { return coeff_; }
  /// Exponent for power/linear forms, half-level point for saturation.
  double second_parameter() const { return param_; }
  const std::vector<ComparisonFunction>& chain() const { return chain_; }

  /// Characteristic argument magnitude, used to seed inversion brackets.
  double scale() const {
    switch (form_) {
      case Form::Saturation:
        return param_;
      case Form::Composition:
        return chain_.back().scale();
      default:
        return 1.0;
    }
  }

  bool unbounded() const { return kind_ != ComparisonKind::K; }

  std::string to_string() const {
    switch (form_) {
      case Form::Linear:
        return "linear(" + format_real(coeff_) + ")";
      case Form::Power:
        return "power(" + format_real(coeff_) + "," + format_real(param_) + ")";
      case Form::Saturation:
        return "saturation(" + format_real(coeff_) + "," + format_real(param_) + ")";
      case Form::Composition: {
        std::string s = "compose(";
        for (std::size_t i = 0; i < chain_.size(); ++i) {
          if (i) s += ",";
          s += chain_[i].to_string();
        }
        return s + ")";
      }
    }
    return {};
  }

  friend bool operator==(const ComparisonFunction&, const ComparisonFunction&) = default;

 private:
  ComparisonFunction(Form form, double coeff, double param, ComparisonKind kind)
      : form_(form), kind_(kind), coeff_(coeff), param_(param) {}

  static void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }

  bool is_monomial() const { return form_ == Form::Linear || form_ == Form::Power; }
  double exponent() const { return form_ == Form::Linear ? 1.0 : param_; }

  double eval(double r) const {
    switch (form_) {
      case Form::Linear:
        return coeff_ * r;
      case Form::Power:
        return r == 0.0 ? 0.0 : coeff_ * std::pow(r, param_);
      case Form::Saturation:
        return coeff_ * r / (param_ + r);
      case Form::Composition: {
        double v = r;
        for (auto it = chain_.rbegin(); it != chain_.rend(); ++it) v = it->eval(v);
        return v;
      }
    }
    return 0.0;
  }

  Form form_;
  ComparisonKind kind_;
  double coeff_;
  double param_;
  std::vector<ComparisonFunction> chain_;
};

inline double evaluate(const ComparisonFunction& f, double r) { return f(r); }

/// Solves f(r) = y for r >= 0.
///
/// Linear and power forms are inverted in closed form. Other forms use
/// bracketing on [0, R] with R doubling from f.scale() until f(R) >= y (capped
/// at 2^60 * scale), followed by bisection until |f(r) - y| <= tol.
inline double invert(const ComparisonFunction& f, double y, double tol) {
  if (!(y >= 0.0)) throw std::domain_error("invert: target must be nonnegative");
  if (!(tol > 0.0)) throw std::invalid_argument("invert: tolerance must be positive");
  if (y == 0.0) return 0.0;
  using Form = ComparisonFunction::Form;
  if (f.form() == Form::Linear) return y / f.coefficient();
  if (f.form() == Form::Power) return std::pow(y / f.coefficient(), 1.0 / f.second_parameter());

  const double scale = f.scale();
  const double cap = std::ldexp(scale, 60);
  double lo = 0.0;
  double hi = scale;
  while (f(hi) < y) {
    lo = hi;
    hi *= 2.0;
    if (hi > cap) throw std::range_error("invert: target " + format_real(y) + " not reached within bracket");
  }
  for (int it = 0; it < 2000; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    const double fm = f(mid);
    if (std::abs(fm - y) <= tol) return mid;
    if (mid <= lo || mid >= hi) return mid;
    if (fm < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

/// beta(r, t) = M exp(-omega t) r.
struct DecayEnvelope {
  double M = 1.0;
  double omega = 1.0;

  DecayEnvelope() = default;
  DecayEnvelope(double overshoot, double rate) : M(overshoot), omega(rate) {
    if (!(M > 0.0) || !std::isfinite(M)) throw std::invalid_argument("decay envelope: M must be positive");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("decay envelope: omega must be positive");
  }

  double operator()(double r, double t) const { return M * std::exp(-omega * t) * r; }
  ComparisonFunction section(double t) const { return ComparisonFunction::kl_section(M * std::exp(-omega * t)); }

  std::string to_string() const { return "decay(" + format_real(M) + "," + format_real(omega) + ")"; }
  friend bool operator==(const DecayEnvelope&, const DecayEnvelope&) = default;
};

struct ISSCertificate {
  DecayEnvelope beta;
  ComparisonFunction gamma;
};

struct NormToIntegralCertificate {
  ComparisonFunction alpha;
  ComparisonFunction psi;
  ComparisonFunction sigma;
};

struct SontagFactors {
  ComparisonFunction xi1;
  ComparisonFunction xi2;
};

/// xi1(s) = (s / M)^(1/omega), xi2(r) = r^(1/omega); then
/// xi1^{-1}(exp(-t) xi2(r)) = M exp(-omega t) r with equality.
inline SontagFactors sontag_factor_exponential(const DecayEnvelope& env) {
  const double p = 1.0 / env.omega;
  return {ComparisonFunction::power(std::pow(env.M, -p), p), ComparisonFunction::power(1.0, p)};
}

/// alpha(r) = xi1(r / 2), psi = xi2, sigma = xi1 o gamma.
inline NormToIntegralCertificate derive_norm_to_integral(const ISSCertificate& cert) {
  const auto [xi1, xi2] = sontag_factor_exponential(cert.beta);
  return {ComparisonFunction::compose(xi1, ComparisonFunction::linear(0.5)), xi2,
          ComparisonFunction::compose(xi1, cert.gamma)};
}

namespace detail {

class FormParser {
 public:
  explicit FormParser(std::string_view text) : text_(text) {}

  ComparisonFunction parse_function() {
    const std::string name = identifier();
    expect('(');
    if (name == "compose") {
      std::vector<ComparisonFunction> chain;
      chain.push_back(parse_function());
      while (accept(',')) chain.push_back(parse_function());
      expect(')');
      if (chain.size() < 2) fail("compose needs at least two arguments");
      ComparisonFunction f = chain.back();
      for (std::size_t i = chain.size() - 1; i-- > 0;) f = ComparisonFunction::compose(chain[i], f);
      return f;
    }
    std::vector<double> args{number()};
    while (accept(',')) args.push_back(number());
    expect(')');
    try {
      if (name == "linear" && args.size() == 1) return ComparisonFunction::linear(args[0]);
      if (name == "power" && args.size() == 2) return ComparisonFunction::power(args[0], args[1]);
      if (name == "saturation" && args.size() == 2) return ComparisonFunction::saturation(args[0], args[1]);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    fail("unknown form or wrong arity: " + name);
  }

  DecayEnvelope parse_decay() {
    const std::string name = identifier();
    if (name != "decay") fail("expected decay(M,omega)");
    expect('(');
    const double m = number();
    expect(',');
    const double w = number();
    expect(')');
    try {
      return DecayEnvelope(m, w);
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }

  void finish() {
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
  }

  std::size_t position() const { return pos_; }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw std::invalid_argument("at offset " + std::to_string(pos_) + ": " + msg);
  }
  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  std::string identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    if (start == pos_) fail("expected a form name");
    return std::string(text_.substr(start, pos_ - start));
  }
  double number() {
    skip_ws();
    const std::string rest(text_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("expected a number");
    }
    pos_ += used;
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `linear(c)`, `power(c,p)`, `saturation(c,s)` or `compose(f,g,...)`.
/// Throws std::invalid_argument carrying the character offset of the problem.
inline ComparisonFunction parse_comparison(std::string_view text) {
  detail::FormParser p(text);
  auto f = p.parse_function();
  p.finish();
  return f;
}

inline DecayEnvelope parse_decay(std::string_view text) {
  detail::FormParser p(text);
  auto d = p.parse_decay();
  p.finish();
  return d;
}

}  // namespace isslab
