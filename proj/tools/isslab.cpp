// isslab: run a scenario file.
//
//   isslab simulate <scenario> [--out DIR] [--seed N] [--modes N]
//   isslab check    <scenario> [--out DIR] [--seed N] [--modes N]
//
// Exit status: 0 no violation, 1 violation found, 2 configuration error,
// 3 runtime error.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "isslab/harness.hpp"

namespace {

struct Options {
  std::string scenario_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> modes;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw isslab::ScenarioError("cannot read scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void apply_overrides(isslab::Scenario& s, const Options& o) {
  if (o.out) s.out_dir = *o.out;
  if (o.seed) s.budget.seed = *o.seed;
  if (o.modes) {
    if (s.preset == isslab::SystemPreset::HeatDirichlet) {
      s.modes = *o.modes;
    } else {
      if (*o.modes == 0 || *o.modes > s.lambdas.size()) {
        throw isslab::ScenarioError("--modes must be between 1 and the length of system.lambdas", 0, 0, "system.lambdas");
      }
      s.lambdas.resize(*o.modes);
      s.b.resize(*o.modes);
    }
  }
}

int run(const Options& o, isslab::RunMode mode) {
  isslab::Scenario s;
  try {
    s = isslab::parse_scenario(read_file(o.scenario_path));
    apply_overrides(s, o);
    isslab::validate(s);
  } catch (const isslab::ScenarioError& e) {
    std::cerr << o.scenario_path << ": " << e.what() << '\n';
    return isslab::kExitConfigError;
  }
  try {
    const auto report = isslab::run_scenario(s, mode);
    isslab::emit_csv(report, s.out_dir, s.timing);
    for (const auto& e : report.entries) {
      std::cout << isslab::serialize_line(e.report, e.witness_trajectory ? "witness_" + e.name + ".csv" : "") << '\n';
    }
    if (mode == isslab::RunMode::Simulate) {
      std::cout << "wrote " << report.trajectories.size() << " trajectories to " << s.out_dir << '\n';
    }
    return isslab::exit_status(report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return isslab::kExitRuntimeError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical ISS laboratory for diagonal spectral systems", "isslab"};
  app.set_version_flag("--version", std::string(ISSLAB_VERSION));
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&opt](CLI::App* sub) {
    sub->add_option("scenario", opt.scenario_path, "scenario file")->required();
    sub->add_option("--out", opt.out, "output directory (overrides outputs.dir)");
    sub->add_option("--seed", opt.seed, "sampling seed (overrides budget.seed)");
    sub->add_option("--modes", opt.modes, "truncation order (overrides system.modes)")->check(CLI::PositiveNumber);
  };
  auto* simulate = app.add_subcommand("simulate", "write sample trajectories only");
  auto* check = app.add_subcommand("check", "run the configured checks");
  add_common(simulate);
  add_common(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : isslab::kExitConfigError;
  }
  return run(opt, simulate->parsed() ? isslab::RunMode::Simulate : isslab::RunMode::Check);
}
