#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "csrgame/model.hpp"
#include "csrgame/stationarity.hpp"
#include "csrgame/trajectory.hpp"

namespace csrgame {

/// Solves the assembled stationarity system in one dense factorization.
/// Throws SolverError(kSingularSystem) with a condition estimate when the
/// system is singular.
Trajectory dense_solve(const ModelParams& params);

/// Objective of `player` along investment paths, with the stock rolled out
/// from params.x1 and the quantity fixed at optimal_quantity().
double path_objective(Player player, const Eigen::VectorXd& supplier,
                      const Eigen::VectorXd& manufacturer, const Eigen::VectorXd& retailer,
                      const ModelParams& params);

/// Stationary point of a quadratic function, located by one Newton step
/// (plus one refinement step) with a finite-difference gradient and Hessian.
/// Central differences are exact on quadratics, so `step` only trades
/// roundoff; the default picks a step proportional to the start point.
Eigen::VectorXd quadratic_stationary_point(const std::function<double(const Eigen::VectorXd&)>& f,
                                           const Eigen::VectorXd& start, double step = 0.0);

/// Retailer investment path at which J^R is stationary given the other two
/// paths. Uses only the coded objective, never the derived conditions.
Eigen::VectorXd retailer_response(const ModelParams& params, const Eigen::VectorXd& supplier,
                                  const Eigen::VectorXd& manufacturer,
                                  const Eigen::VectorXd& start = {});

struct FollowerResponse {
  Eigen::VectorXd manufacturer;
  Eigen::VectorXd retailer;
};

/// Manufacturer path at which J^M, composed with the retailer response, is
/// stationary for the given supplier path.
FollowerResponse manufacturer_response(const ModelParams& params, const Eigen::VectorXd& supplier,
                                       const FollowerResponse& start = {});

enum class FollowerLevel { kRetailer, kManufacturer };

struct StationarityCheckOptions {
  /// Random unit directions, in addition to the coordinate directions.
  int random_directions = 12;
  std::uint64_t seed = 20261018;
  /// Difference step relative to max(1, largest investment magnitude).
  double relative_step = 1e-2;
};

/// Largest central-difference directional derivative of the follower's
/// objective along perturbations of its own investment path. At level
/// kManufacturer the retailer is re-solved for every perturbation.
double follower_stationarity_check(const Trajectory& trajectory, const ModelParams& params,
                                   FollowerLevel level, const StationarityCheckOptions& options = {});

/// Largest central-difference directional derivative of J^S along
/// perturbations of the supplier path, with both followers re-solved for
/// every perturbation.
double leader_stationarity_check(const Trajectory& trajectory, const ModelParams& params,
                                 const StationarityCheckOptions& options = {});

/// Brute-force scan of the composed supplier objective over i_s for a
/// one-period game (followers re-solved per grid point). Returns the
/// stationary point located by the sign change of the grid's secant slopes.
double grid_scan_supplier_investment(const ModelParams& params);

struct GradientCheck {
  std::string name;
  double analytic = 0.0;
  double numeric = 0.0;

  /// |analytic - numeric| / max(1, |analytic|, |numeric|).
  double relative_error() const;
};

/// Compares every coded investment condition, costate recursion and
/// multiplier recursion against central differences of the coded
/// Hamiltonians at `point`. Steps are relative_step * max(1, |argument|).
std::vector<GradientCheck> hamiltonian_gradient_checks(const PeriodPoint& point, double quantity,
                                                       const ModelParams& params,
                                                       double relative_step = 1e-5);

}  // namespace csrgame
