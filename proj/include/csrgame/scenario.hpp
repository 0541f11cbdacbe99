#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "csrgame/model.hpp"

namespace csrgame {

struct SolverOptions {
  double tolerance = 1e-8;  ///< exit succeeds iff residual max-norm <= tolerance
  bool oracle = false;      ///< cross-check against the dense solve
  bool strict_alpha = true;
  std::uint64_t seed = 20261018;  ///< seed for the oracle's random directions
};

struct Scenario {
  std::string name;
  ModelParams params;
  SolverOptions options;
};

/// Command-line values that take precedence over the file's options block.
struct ScenarioOverrides {
  std::optional<double> tolerance;
  std::optional<bool> oracle;
  std::optional<bool> strict_alpha;
  std::optional<std::uint64_t> seed;
};

/// Parses the scenario schema (see scenarios/README.md):
///
///   name: <label>
///   params:   { alpha, beta_s, beta_m, beta_r, tau, theta, delta_s, delta_m,
///               delta_r, d, d_hat, a, b, v, z, c, x1, horizon_T }
///   options:  { tolerance, oracle, strict_alpha, seed }   # optional
///
/// Every economic parameter is required. Throws ParseError for malformed
/// text or a value of the wrong type, ValidationError listing every missing
/// or unknown field and every violated invariant.
Scenario parse_scenario(const std::string& text, const ScenarioOverrides& overrides = {});

Scenario load_scenario(const std::filesystem::path& path, const ScenarioOverrides& overrides = {});

}  // namespace csrgame
