#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "isslab/comparison.hpp"

using isslab::ComparisonFunction;
using isslab::ComparisonKind;
using isslab::DecayEnvelope;

TEST(Comparison, LinearPowerSaturationValues) {
  EXPECT_DOUBLE_EQ(ComparisonFunction::linear(2.0)(3.0), 6.0);
  EXPECT_DOUBLE_EQ(ComparisonFunction::power(1.0, 2.0)(3.0), 9.0);
  EXPECT_DOUBLE_EQ(ComparisonFunction::power(0.5, 3.0)(2.0), 4.0);
  EXPECT_DOUBLE_EQ(ComparisonFunction::saturation(2.0, 1.0)(1.0), 1.0);
  EXPECT_EQ(ComparisonFunction::linear(1.0)(0.0), 0.0);
  EXPECT_EQ(ComparisonFunction::saturation(2.0, 1.0)(0.0), 0.0);
}

TEST(Comparison, Kinds) {
  EXPECT_EQ(ComparisonFunction::linear(1.0).kind(), ComparisonKind::Kinf);
  EXPECT_EQ(ComparisonFunction::power(1.0, 0.5).kind(), ComparisonKind::Kinf);
  EXPECT_EQ(ComparisonFunction::saturation(1.0, 1.0).kind(), ComparisonKind::K);
  EXPECT_FALSE(ComparisonFunction::saturation(1.0, 1.0).unbounded());
  const auto c = ComparisonFunction::compose(ComparisonFunction::saturation(1.0, 1.0), ComparisonFunction::linear(2.0));
  EXPECT_EQ(c.kind(), ComparisonKind::K);
}

TEST(Comparison, RejectsInvalidParameters) {
  EXPECT_THROW(ComparisonFunction::linear(0.0), std::invalid_argument);
  EXPECT_THROW(ComparisonFunction::linear(-1.0), std::invalid_argument);
  EXPECT_THROW(ComparisonFunction::power(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(ComparisonFunction::saturation(1.0, -1.0), std::invalid_argument);
  EXPECT_THROW(ComparisonFunction::linear(1.0)(-1.0), std::domain_error);
}

TEST(Comparison, StrictlyIncreasingOnGrid) {
  const ComparisonFunction fs[] = {
      ComparisonFunction::linear(0.3), ComparisonFunction::power(2.0, 0.7), ComparisonFunction::saturation(3.0, 0.5),
      ComparisonFunction::compose(ComparisonFunction::saturation(1.0, 2.0), ComparisonFunction::power(1.0, 2.0))};
  for (const auto& f : fs) {
    double prev = f(0.0);
    for (int i = 1; i <= 200; ++i) {
      const double v = f(0.05 * i);
      EXPECT_GT(v, prev) << f.to_string() << " at " << 0.05 * i;
      prev = v;
    }
  }
}

TEST(Comparison, MonomialCompositionCollapses) {
  // 2 (3 r^2) = 6 r^2 ; (3 r)^2 = 9 r^2
  const auto a = ComparisonFunction::compose(ComparisonFunction::linear(2.0), ComparisonFunction::power(3.0, 2.0));
  EXPECT_EQ(a.form(), ComparisonFunction::Form::Power);
  EXPECT_DOUBLE_EQ(a.coefficient(), 6.0);
  const auto b = ComparisonFunction::compose(ComparisonFunction::power(1.0, 2.0), ComparisonFunction::linear(3.0));
  EXPECT_DOUBLE_EQ(b.coefficient(), 9.0);
  EXPECT_DOUBLE_EQ(b.second_parameter(), 2.0);
  const auto c = ComparisonFunction::compose(ComparisonFunction::power(1.0, 0.5), ComparisonFunction::power(4.0, 2.0));
  EXPECT_EQ(c.form(), ComparisonFunction::Form::Linear);
  EXPECT_DOUBLE_EQ(c(5.0), 10.0);
}

TEST(Comparison, CompositionIsCanonical) {
  const auto sat = ComparisonFunction::saturation(1.0, 1.0);
  const auto left = ComparisonFunction::compose(ComparisonFunction::compose(sat, ComparisonFunction::linear(2.0)),
                                                ComparisonFunction::linear(3.0));
  const auto right = ComparisonFunction::compose(sat, ComparisonFunction::linear(6.0));
  EXPECT_EQ(left, right);
  EXPECT_DOUBLE_EQ(left(0.5), 3.0 / 4.0);
}

TEST(Comparison, InvertClosedForms) {
  EXPECT_DOUBLE_EQ(isslab::invert(ComparisonFunction::linear(4.0), 2.0, 1e-12), 0.5);
  EXPECT_NEAR(isslab::invert(ComparisonFunction::power(2.0, 3.0), 16.0, 1e-12), 2.0, 1e-14);
  EXPECT_EQ(isslab::invert(ComparisonFunction::linear(4.0), 0.0, 1e-12), 0.0);
}

TEST(Comparison, InvertByBisection) {
  // c r / (s + r) = y  =>  r = s y / (c - y)
  const auto f = ComparisonFunction::saturation(2.0, 3.0);
  EXPECT_NEAR(isslab::invert(f, 1.5, 1e-13), 3.0 * 1.5 / 0.5, 1e-9);
  EXPECT_THROW(isslab::invert(f, 2.5, 1e-12), std::range_error);
  EXPECT_THROW(isslab::invert(f, -1.0, 1e-12), std::domain_error);
}

TEST(Comparison, InvertRoundTripProperty) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> U(0.01, 5.0);
  for (int i = 0; i < 200; ++i) {
    const auto f = ComparisonFunction::compose(ComparisonFunction::power(U(gen), U(gen)),
                                               ComparisonFunction::compose(ComparisonFunction::saturation(10.0, U(gen)),
                                                                           ComparisonFunction::linear(U(gen))));
    const double r = U(gen);
    const double y = f(r);
    EXPECT_NEAR(f(isslab::invert(f, y, 1e-13 * (1.0 + y))), y, 1e-12 * (1.0 + y));
  }
}

TEST(Comparison, ToStringParsesBack) {
  const ComparisonFunction fs[] = {
      ComparisonFunction::linear(0.1), ComparisonFunction::power(1.0 / 3.0, 2.5), ComparisonFunction::saturation(2.0, 0.25),
      ComparisonFunction::compose(ComparisonFunction::saturation(1.0, 1.0), ComparisonFunction::linear(std::acos(-1.0))),
      ComparisonFunction::compose(ComparisonFunction::linear(2.0),
                                  ComparisonFunction::compose(ComparisonFunction::saturation(1.0, 1.0),
                                                              ComparisonFunction::saturation(3.0, 2.0)))};
  for (const auto& f : fs) {
    EXPECT_EQ(isslab::parse_comparison(f.to_string()), f) << f.to_string();
  }
}

TEST(Comparison, ParseAcceptsWhitespace) {
  EXPECT_EQ(isslab::parse_comparison(" power( 1.0 , 2 ) "), ComparisonFunction::power(1.0, 2.0));
  EXPECT_EQ(isslab::parse_comparison("compose(linear(2), linear(3))"), ComparisonFunction::linear(6.0));
}

TEST(Comparison, ParseErrorsCarryOffset) {
  for (const char* bad : {"linear(", "lin(1)", "power(1)", "linear(1) x", "linear(-1)", "compose(linear(1))", ""}) {
    EXPECT_THROW(isslab::parse_comparison(bad), std::invalid_argument) << bad;
  }
  try {
    isslab::parse_comparison("linear(1,x)");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos) << e.what();
  }
}

TEST(Decay, ValuesAndSection) {
  const DecayEnvelope b(2.0, 3.0);
  EXPECT_DOUBLE_EQ(b(1.5, 0.0), 3.0);
  EXPECT_NEAR(b(1.0, 1.0), 2.0 * std::exp(-3.0), 1e-16);
  EXPECT_NEAR(b.section(0.5)(4.0), b(4.0, 0.5), 1e-15);
  EXPECT_EQ(isslab::parse_decay(b.to_string()), b);
  EXPECT_THROW(DecayEnvelope(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(DecayEnvelope(1.0, -1.0), std::invalid_argument);
  EXPECT_THROW(isslab::parse_decay("decay(1)"), std::invalid_argument);
}

// Oracle: xi1^{-1}(e^{-t} xi2(r)) should equal M e^{-omega t} r exactly, by
// solving xi1(s) = (s/M)^{1/omega} for s.
TEST(Sontag, FactorizationIsExact) {
  std::mt19937_64 gen(20190101);
  std::uniform_real_distribution<double> Um(1.0, 10.0), Uw(0.1, 20.0), Ur(0.0, 10.0), Ut(0.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const double M = Um(gen), w = Uw(gen), r = Ur(gen), t = Ut(gen);
    const auto [xi1, xi2] = isslab::sontag_factor_exponential(DecayEnvelope(M, w));
    const double lhs = isslab::invert(xi1, std::exp(-t) * xi2(r), 1e-300);
    const double rhs = M * std::exp(-w * t) * r;
    EXPECT_LE(std::abs(lhs - rhs), 1e-10 * (1.0 + rhs)) << "M=" << M << " w=" << w << " r=" << r << " t=" << t;
  }
}

TEST(Sontag, DerivedCertificateForms) {
  // beta = e^{-2t} r, gamma = s/2: xi1(s) = s^{1/2}, xi2(r) = r^{1/2}
  const isslab::ISSCertificate cert{DecayEnvelope(1.0, 2.0), ComparisonFunction::linear(0.5)};
  const auto nti = isslab::derive_norm_to_integral(cert);
  EXPECT_NEAR(nti.alpha(8.0), std::sqrt(4.0), 1e-15);
  EXPECT_NEAR(nti.psi(9.0), 3.0, 1e-15);
  EXPECT_NEAR(nti.sigma(8.0), 2.0, 1e-15);
  EXPECT_EQ(nti.alpha.form(), ComparisonFunction::Form::Power);
}
