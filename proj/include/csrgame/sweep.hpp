#pragma once

#include <vector>

#include <Eigen/Dense>

#include "csrgame/model.hpp"
#include "csrgame/report.hpp"
#include "csrgame/stationarity.hpp"
#include "csrgame/trajectory.hpp"

namespace csrgame {

/// kInner is the manufacturer-retailer subgame for a given supplier
/// investment path: augmented state [x; u], augmented costate [p_m; p_r].
/// kOuter is the full game: augmented state [x; u; supplier multiplier on
/// the retailer costate; u'], augmented costate [p_s; p_m; p_r; supplier
/// costate on u].
enum class GameLevel { kInner, kOuter };

/// One-period recursion after the per-period investment conditions have been
/// eliminated:
///
///   state(t+1)  = A state(t) + B costate(t+1) + f(t)
///   costate(t)  = C state(t) + D22 costate(t+1) + e(t)
///
/// The per-period static unknowns (investments and nesting weights) are
/// recovered as static_gain * costate(t+1) + static_offset(t).
struct AugmentedSystem {
  GameLevel level = GameLevel::kOuter;
  int horizon = 0;
  Eigen::MatrixXd block_A, block_B, block_C, block_D22;
  std::vector<Eigen::VectorXd> affine_f, affine_e;  ///< per period t = 1..T
  Eigen::MatrixXd static_gain;
  std::vector<Eigen::VectorXd> static_offset;  ///< per period t = 1..T
  Eigen::VectorXd initial_state;
  /// Inner level only: the exogenous supplier path.
  std::vector<double> supplier_investment;

  int dimension() const { return static_cast<int>(block_A.rows()); }
};

/// Outer level: the full nested game.
AugmentedSystem assemble_augmented(const ModelParams& params);

/// Either level. `supplier_investment` is required for kInner (one entry per
/// period) and ignored for kOuter.
AugmentedSystem assemble_augmented(const ModelParams& params, GameLevel level,
                                   const std::vector<double>& supplier_investment = {});

/// Affine costate-state relation costate(t) = gain(t) state(t) + offset(t),
/// stored for t = 1..T+1 at positions 0..T.
struct SweepCoefficients {
  std::vector<Eigen::MatrixXd> gain;
  std::vector<Eigen::VectorXd> offset;
};

/// Backward recursion from gain = offset = 0 at T+1. Throws
/// SolverError(kSingularSweepStep) naming the period whose step matrix
/// I - B gain(t+1) is singular.
SweepCoefficients backward_sweep(const AugmentedSystem& aug, const ModelParams& params);

/// Forward recovery of the full trajectory. For the inner level the supplier
/// fields (p_s, u', supplier weights) are left at zero and the supplier
/// investment is copied from the augmented system.
Trajectory forward_pass(const SweepCoefficients& sweep, const AugmentedSystem& aug,
                        const ModelParams& params);

/// Follower subgame solution for a given supplier path.
Trajectory solve_followers(const ModelParams& params, const std::vector<double>& supplier_investment);

struct SolveResult {
  Trajectory trajectory;
  SolveReport report;
};

/// End-to-end equilibrium: outer sweep, inner consistency re-solve, residual
/// norms, objectives and warnings.
SolveResult solve_game(const ModelParams& params, const ValidationOptions& validation = {});

}  // namespace csrgame
