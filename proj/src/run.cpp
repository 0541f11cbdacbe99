#include "csrgame/run.hpp"

#include <algorithm>
#include <cmath>

#include "csrgame/oracle.hpp"

namespace csrgame {

namespace {

void track(double& worst, const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    worst = INFINITY;
    return;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double gap = std::abs(a[i] - b[i]);
    if (!(gap <= worst)) worst = gap;
  }
}

}  // namespace

double max_trajectory_delta(const Trajectory& a, const Trajectory& b) {
  if (a.horizon() != b.horizon()) return INFINITY;
  double worst = 0.0;
  track(worst, a.x, b.x);
  track(worst, a.q, b.q);
  track(worst, a.p_s, b.p_s);
  track(worst, a.p_m, b.p_m);
  track(worst, a.p_r, b.p_r);
  track(worst, a.u, b.u);
  track(worst, a.u_prime, b.u_prime);
  for (int t = 0; t < a.horizon(); ++t) {
    for (auto player : {Player::kSupplier, Player::kManufacturer, Player::kRetailer}) {
      const double gap = std::abs(a.controls[t].of(player) - b.controls[t].of(player));
      if (!(gap <= worst)) worst = gap;
    }
  }
  const auto& na = a.nesting;
  const auto& nb = b.nesting;
  track(worst, na.manufacturer_on_retailer_foc, nb.manufacturer_on_retailer_foc);
  track(worst, na.supplier_on_retailer_foc, nb.supplier_on_retailer_foc);
  track(worst, na.supplier_on_manufacturer_foc, nb.supplier_on_manufacturer_foc);
  track(worst, na.supplier_on_manufacturer_cross_foc, nb.supplier_on_manufacturer_cross_foc);
  track(worst, na.supplier_on_retailer_costate, nb.supplier_on_retailer_costate);
  track(worst, na.supplier_on_manufacturer_multiplier, nb.supplier_on_manufacturer_multiplier);
  return worst;
}

SolveResult run(const Scenario& scenario) {
  const auto& options = scenario.options;
  SolveResult result = solve_game(scenario.params, {.strict_alpha = options.strict_alpha});
  auto& report = result.report;
  report.scenario_name = scenario.name;
  report.tolerance = options.tolerance;
  report.seed = options.seed;

  if (options.oracle) {
    const Trajectory dense = dense_solve(scenario.params);
    const StationarityCheckOptions checks{.seed = options.seed};
    OracleSummary summary;
    summary.max_delta = max_trajectory_delta(result.trajectory, dense);
    summary.dense_residual_max = residual_norm(dense, scenario.params);
    summary.retailer_stationarity = follower_stationarity_check(
        result.trajectory, scenario.params, FollowerLevel::kRetailer, checks);
    summary.manufacturer_stationarity = follower_stationarity_check(
        result.trajectory, scenario.params, FollowerLevel::kManufacturer, checks);
    summary.supplier_stationarity =
        leader_stationarity_check(result.trajectory, scenario.params, checks);
    report.oracle = summary;
  }
  return result;
}

}  // namespace csrgame
