// csrgame: solve a three-tier CSR Stackelberg scenario and write the
// equilibrium trajectory and a diagnostics report.
//
//   csrgame solve <scenario-file> [--out-dir DIR] [--oracle] [--tolerance EPS]
//                 [--seed N] [--no-strict-alpha]
//
// Exit status: 0 solved within tolerance, 1 residual above tolerance,
// 2 invalid scenario, 3 solver failure, 4 I/O failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "csrgame/errors.hpp"
#include "csrgame/output.hpp"
#include "csrgame/run.hpp"
#include "csrgame/scenario.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kAboveTolerance = 1,
  kInvalidScenario = 2,
  kSolverFailure = 3,
  kIoFailure = 4,
};

int solve(const std::filesystem::path& scenario_path, const std::filesystem::path& out_dir,
          const csrgame::ScenarioOverrides& overrides) {
  csrgame::Scenario scenario;
  try {
    scenario = csrgame::load_scenario(scenario_path, overrides);
  } catch (const csrgame::ValidationError& e) {
    std::cerr << scenario_path.string() << ": " << e.what() << "\n";
    return kInvalidScenario;
  } catch (const csrgame::ParseError& e) {
    std::cerr << scenario_path.string() << ": " << e.what() << "\n";
    return kInvalidScenario;
  } catch (const std::runtime_error& e) {
    std::cerr << e.what() << "\n";
    return kIoFailure;
  }

  csrgame::SolveResult result;
  try {
    result = csrgame::run(scenario);
  } catch (const csrgame::SolverError& e) {
    std::cerr << "solve failed: " << e.what() << "\n";
    return kSolverFailure;
  }

  const auto csv_path = out_dir / (scenario.name + ".trajectory.csv");
  const auto report_path = out_dir / (scenario.name + ".report");
  try {
    std::filesystem::create_directories(out_dir);
    csrgame::emit_csv(result.trajectory, csv_path);
    csrgame::emit_report(result.report, report_path);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kIoFailure;
  }

  const auto& report = result.report;
  std::cout << fmt::format("{}: T={} residual_max={:.3e} ({:.3f} ms)\n", scenario.name,
                           report.horizon, report.residual_max, 1e3 * report.elapsed_seconds);
  if (report.oracle) {
    std::cout << fmt::format("  oracle: delta={:.3e} supplier_stationarity={:.3e}\n",
                             report.oracle->max_delta, report.oracle->supplier_stationarity);
  }
  std::cout << "  wrote " << csv_path.string() << "\n  wrote " << report_path.string() << "\n";
  if (!report.within_tolerance()) {
    std::cerr << fmt::format("residual {:.3e} exceeds tolerance {:.3e}\n", report.residual_max,
                             report.tolerance);
    return kAboveTolerance;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-loop Stackelberg equilibrium of a supplier-manufacturer-retailer CSR game"};
  app.require_subcommand(1);

  auto* solve_cmd = app.add_subcommand("solve", "Solve one scenario file");
  std::string scenario_path;
  std::string out_dir = ".";
  bool oracle = false;
  bool no_strict_alpha = false;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  solve_cmd->add_option("scenario", scenario_path, "Scenario file")->required();
  solve_cmd->add_option("--out-dir", out_dir, "Directory for the CSV and report")
      ->capture_default_str();
  solve_cmd->add_flag("--oracle", oracle, "Cross-check against the dense oracle");
  auto* tolerance_opt =
      solve_cmd->add_option("--tolerance", tolerance, "Residual max-norm tolerance")
          ->check(CLI::PositiveNumber);
  auto* seed_opt = solve_cmd->add_option("--seed", seed, "Seed for the oracle's directions");
  solve_cmd->add_flag("--no-strict-alpha", no_strict_alpha, "Allow alpha outside (0, 1]");

  CLI11_PARSE(app, argc, argv);

  csrgame::ScenarioOverrides overrides;
  if (oracle) overrides.oracle = true;
  if (no_strict_alpha) overrides.strict_alpha = false;
  if (*tolerance_opt) overrides.tolerance = tolerance;
  if (*seed_opt) overrides.seed = seed;
  return solve(scenario_path, out_dir, overrides);
}
