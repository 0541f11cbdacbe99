#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace csrgame {

/// Results of the independent verification path.
struct OracleSummary {
  double max_delta = 0.0;        ///< max |sweep - dense| over all trajectory entries
  double dense_residual_max = 0.0;
  double retailer_stationarity = 0.0;
  double manufacturer_stationarity = 0.0;
  double supplier_stationarity = 0.0;
};

struct SolveReport {
  std::string scenario_name;
  std::string solver_path = "sweep";
  int horizon = 0;
  double quantity = 0.0;
  double residual_max = 0.0;
  double residual_rms = 0.0;
  double tolerance = 1e-8;
  /// Largest gap between the full solve and the follower subgame re-solved
  /// for the equilibrium supplier path.
  double inner_level_delta = 0.0;
  double objective_supplier = 0.0;
  double objective_manufacturer = 0.0;
  double objective_retailer = 0.0;
  /// tau*theta > 0: every Hamiltonian is convex in its own investment, so the
  /// stationary point is not a local maximum in own control.
  bool convexity_warning = false;
  bool negative_investment_warning = false;
  std::uint64_t seed = 0;
  std::optional<OracleSummary> oracle;
  /// Wall-clock time of the solve. Not written to the report file.
  double elapsed_seconds = 0.0;

  bool within_tolerance() const { return residual_max <= tolerance; }
};

}  // namespace csrgame
