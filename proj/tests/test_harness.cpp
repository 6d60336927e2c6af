#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "isslab/harness.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

isslab::Scenario bundled(const std::string& name) {
  return isslab::parse_and_validate(slurp(fs::path(ISSLAB_SCENARIO_DIR) / (name + ".scn")));
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("isslab_test_" + name);
  fs::remove_all(p);
  return p;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Harness, HeatIssScenarioPasses) {
  const auto s = bundled("heat_iss");
  const auto r = isslab::run_scenario(s);
  const std::vector<std::string> expected{"identity", "cocycle",     "iss",           "uls", "ulim",
                                          "brs",      "cep",         "dissipation",   "norm_to_integral"};
  ASSERT_EQ(r.entries.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(r.entries[i].name, expected[i]);
    EXPECT_FALSE(r.entries[i].report.violated()) << expected[i] << " " << r.entries[i].report.worst_margin;
  }
  EXPECT_EQ(isslab::exit_status(r), isslab::kExitOk);
  EXPECT_EQ(r.version, ISSLAB_VERSION);
}

TEST(Harness, BadGainScenarioWritesWitness) {
  const auto s = bundled("heat_bad_gain");
  const auto r = isslab::run_scenario(s);
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(isslab::exit_status(r), isslab::kExitViolation);
  const auto dir = scratch("bad_gain");
  isslab::emit_csv(r, dir);
  ASSERT_TRUE(fs::exists(dir / "witness_iss.csv"));
  const std::string reports = slurp(dir / "reports.txt");
  EXPECT_NE(reports.find("iss,violated,"), std::string::npos);
  EXPECT_NE(reports.find("witness_iss.csv"), std::string::npos);
  // replay
  const auto& w = *r.entries[0].report.witness;
  const auto setup = isslab::prepare(s);
  EXPECT_DOUBLE_EQ(isslab::iss_margin(setup.system, setup.iss, w.x0, w.u, w.t), r.entries[0].report.worst_margin);
  fs::remove_all(dir);
}

TEST(Harness, EmptyChecks) {
  auto s = isslab::parse_and_validate("checks.list =\noutputs.trajectories = 0\n");
  const auto r = isslab::run_scenario(s);
  EXPECT_TRUE(r.entries.empty());
  EXPECT_EQ(isslab::exit_status(r), isslab::kExitOk);
  const auto dir = scratch("empty");
  isslab::emit_csv(r, dir);
  EXPECT_EQ(slurp(dir / "report.csv"), "check,verdict,worst_margin,samples,seconds\n");
  fs::remove_all(dir);
}

TEST(Harness, CsvShapeAndDeterminism) {
  auto s = bundled("heat_iss");
  s.checks = {"iss", "cocycle", "brs"};
  const auto a = isslab::run_scenario(s);
  const auto b = isslab::run_scenario(s);
  const auto da = scratch("det_a");
  const auto db = scratch("det_b");
  isslab::emit_csv(a, da);
  isslab::emit_csv(b, db);
  const std::string rep = slurp(da / "report.csv");
  EXPECT_EQ(rep, slurp(db / "report.csv"));
  EXPECT_EQ(slurp(da / "margins.csv"), slurp(db / "margins.csv"));
  EXPECT_EQ(line_count(rep), 1 + s.checks.size());
  EXPECT_EQ(rep.substr(0, rep.find('\n')), "check,verdict,worst_margin,samples,seconds");
  std::size_t total = 0;
  for (const auto& e : a.entries) total += e.report.samples_checked;
  const std::string mar = slurp(da / "margins.csv");
  EXPECT_EQ(line_count(mar), 1 + total);
  EXPECT_EQ(mar.substr(0, mar.find('\n')), "check,sample_index,t,margin");
  for (std::size_t i = 0; i < s.trajectories; ++i) {
    EXPECT_TRUE(fs::exists(da / ("trajectory_" + std::to_string(i) + ".csv")));
  }
  EXPECT_EQ(a.scenario_digest, b.scenario_digest);
  fs::remove_all(da);
  fs::remove_all(db);
}

TEST(Harness, OneCheckOneRow) {
  auto s = bundled("heat_iss");
  s.checks = {"identity"};
  s.trajectories = 0;
  const auto dir = scratch("one");
  isslab::emit_csv(isslab::run_scenario(s), dir);
  EXPECT_EQ(line_count(slurp(dir / "report.csv")), 2u);
  fs::remove_all(dir);
}

TEST(Harness, DigestTracksScenarioText) {
  auto s = bundled("heat_iss");
  const auto d0 = isslab::scenario_digest(s);
  s.budget.seed += 1;
  EXPECT_NE(isslab::scenario_digest(s), d0);
}

TEST(Harness, SimulateWritesTrajectoriesOnly) {
  auto s = bundled("heat_iss");
  s.modes = 8;
  const auto r = isslab::run_scenario(s, isslab::RunMode::Simulate);
  EXPECT_TRUE(r.entries.empty());
  EXPECT_EQ(r.trajectories.size(), s.trajectories);
  EXPECT_EQ(r.trajectories[0].system.n_modes(), 8u);
}

TEST(Harness, DefaultCertificates) {
  auto heat = isslab::parse_and_validate("system.modes = 16\n");
  const auto h = isslab::prepare(heat);
  EXPECT_NEAR(h.iss.beta.omega, std::numbers::pi * std::numbers::pi, 1e-15);
  EXPECT_NEAR(h.iss.gamma(1.0), 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_EQ(h.integral.alpha, isslab::ComparisonFunction::power(0.5, 2.0));

  auto diag = isslab::parse_and_validate("system.preset = diagonal\nsystem.lambdas = 2\nsystem.b = 4\n");
  const auto d = isslab::prepare(diag);
  // one mode: sup_t kappa(t) = |b| / lambda = 2
  EXPECT_NEAR(d.iss.gamma(1.0), 2.0, 1e-12);
  EXPECT_EQ(d.iss.beta.omega, 2.0);
}

TEST(Harness, EmitToUnwritableDirectoryFails) {
  const auto file = scratch("blocker");
  { std::ofstream(file) << "x"; }
  isslab::RunReport r;
  try {
    isslab::emit_csv(r, file / "sub");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(file.string()), std::string::npos);
  }
  fs::remove(file);
}

TEST(Harness, CheckFailureNamesCheck) {
  // epsilon is validated before any check runs; a bad scenario never reaches a probe
  isslab::Scenario s;
  s.epsilon = 2.0;
  EXPECT_THROW(isslab::run_scenario(s), isslab::ScenarioError);
}
