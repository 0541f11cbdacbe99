#pragma once

#include "csrgame/scenario.hpp"
#include "csrgame/sweep.hpp"

namespace csrgame {

/// Largest absolute difference over every trajectory component, including
/// the nesting multipliers.
double max_trajectory_delta(const Trajectory& a, const Trajectory& b);

/// Solves the scenario with the sweep; with options.oracle also runs the
/// dense solve and the finite-difference stationarity checks.
SolveResult run(const Scenario& scenario);

}  // namespace csrgame
