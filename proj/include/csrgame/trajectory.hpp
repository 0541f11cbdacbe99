#pragma once

#include <vector>

#include "csrgame/model.hpp"

namespace csrgame {

/// Lagrange multipliers the leaders attach to their followers' necessary
/// conditions, beyond the two Stackelberg multipliers stored on Trajectory.
/// They are needed to state and check the equilibrium but are not part of
/// the CSV output.
struct NestingMultipliers {
  /// Manufacturer's weight on the retailer's investment condition, t = 1..T.
  std::vector<double> manufacturer_on_retailer_foc;
  /// Supplier's weight on the retailer's investment condition, t = 1..T.
  std::vector<double> supplier_on_retailer_foc;
  /// Supplier's weight on the manufacturer's own-investment condition, t = 1..T.
  std::vector<double> supplier_on_manufacturer_foc;
  /// Supplier's weight on the manufacturer's condition in the retailer's
  /// investment, t = 1..T.
  std::vector<double> supplier_on_manufacturer_cross_foc;
  /// Supplier's multiplier on the retailer costate recursion, t = 1..T+1.
  /// Forward in time from zero, like u_prime.
  std::vector<double> supplier_on_retailer_costate;
  /// Supplier's costate on the manufacturer multiplier u, t = 1..T+1.
  /// Backward in time with a zero terminal value.
  std::vector<double> supplier_on_manufacturer_multiplier;
};

/// Full-horizon equilibrium path. Vectors indexed by period store t = 1 at
/// position 0.
///
/// Costates have T+1 entries. The entry for period t+1 is the one entering
/// period t's Hamiltonian; the t = 1 entry is the shadow value of the
/// initial stock given by the costate recursion, and the t = T+1 entry is
/// the terminal (zero) value.
struct Trajectory {
  std::vector<double> x;              ///< CSR stock, t = 1..T+1
  std::vector<Investment> controls;   ///< t = 1..T
  std::vector<double> q;              ///< traded quantity, t = 1..T
  std::vector<double> p_s, p_m, p_r;  ///< costates, t = 1..T+1
  std::vector<double> u;              ///< manufacturer multiplier on the retailer costate, t = 1..T+1
  std::vector<double> u_prime;        ///< supplier multiplier on the manufacturer costate, t = 1..T+1
  NestingMultipliers nesting;

  int horizon() const { return static_cast<int>(controls.size()); }

  /// All-zero trajectory of the right shape for `horizon` periods.
  static Trajectory zeros(int horizon);
};

/// Largest |x[t+1] - transition(x[t], controls[t])| over the horizon.
double state_equation_violation(const Trajectory& trajectory, const ModelParams& params);

/// Sum of stage payoffs over t = 1..T. Throws SolverError when the
/// trajectory violates the state equation beyond a relative 1e-9.
double total_objective(Player player, const Trajectory& trajectory, const ModelParams& params);

/// Sum of stage payoffs over periods [first, last) (0-based), without the
/// consistency check.
double objective_window(Player player, const Trajectory& trajectory, const ModelParams& params,
                        int first, int last);

/// Rolls the state equation forward from params.x1 through `controls`,
/// returning x for t = 1..T+1.
std::vector<double> roll_out(const std::vector<Investment>& controls, const ModelParams& params);

}  // namespace csrgame
