#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "csrgame/model.hpp"
#include "csrgame/trajectory.hpp"

namespace csrgame {

/// Below this value of tau*theta the investment conditions no longer pin
/// down the investments.
inline constexpr double kMinTaxCurvature = 1e-12;

/// Every quantity entering one period's Hamiltonians.
///
/// The retailer adjoins the state equation with its costate. The
/// manufacturer additionally adjoins the retailer's investment condition and
/// the retailer's costate recursion. The supplier adjoins all of the
/// manufacturer's and retailer's conditions, including the forward dynamics
/// of u.
struct PeriodPoint {
  double x = 0.0;
  Investment investment;
  double p_s_next = 0.0;
  double p_m_next = 0.0;
  double p_r_next = 0.0;
  double u = 0.0;
  double u_prime = 0.0;
  double manufacturer_on_retailer_foc = 0.0;
  double supplier_on_retailer_foc = 0.0;
  double supplier_on_manufacturer_foc = 0.0;
  double supplier_on_manufacturer_cross_foc = 0.0;
  double supplier_on_retailer_costate = 0.0;
  double supplier_on_manufacturer_multiplier_next = 0.0;
};

/// Extracts period `t` (0-based) of a trajectory.
PeriodPoint period_point(const Trajectory& trajectory, int t);

double retailer_hamiltonian(const PeriodPoint& point, double quantity, const ModelParams& params);
double manufacturer_hamiltonian(const PeriodPoint& point, double quantity, const ModelParams& params);
double supplier_hamiltonian(const PeriodPoint& point, double quantity, const ModelParams& params);

// Investment conditions. Each is the derivative of one Hamiltonian in one
// investment (or in a follower multiplier) and vanishes at equilibrium.

/// dH^R/dI^R.
double retailer_foc_residual(const Investment& investment, double p_r_next, const ModelParams& params);
/// dH^M/dI^M.
double manufacturer_foc_residual(const Investment& investment, double p_m_next,
                                 double manufacturer_on_retailer_foc, const ModelParams& params);
/// dH^M/dI^R: the manufacturer's condition in the retailer's investment.
double manufacturer_cross_foc_residual(const Investment& investment, double p_m_next,
                                       double manufacturer_on_retailer_foc, const ModelParams& params);
/// dH^S/dI^S.
double supplier_foc_residual(const PeriodPoint& point, const ModelParams& params);
/// dH^S/dI^M.
double supplier_manufacturer_investment_residual(const PeriodPoint& point, const ModelParams& params);
/// dH^S/dI^R.
double supplier_retailer_investment_residual(const PeriodPoint& point, const ModelParams& params);
/// dH^S with respect to the manufacturer's weight on the retailer condition.
double supplier_follower_weight_residual(const PeriodPoint& point, const ModelParams& params);

/// Leader multipliers that enter a costate recursion through the follower
/// equations the leader has adjoined.
struct CostateCoupling {
  /// u_t for the manufacturer, u'_t for the supplier.
  double follower_multiplier = 0.0;
  /// Supplier only: multiplier on the retailer costate recursion.
  double retailer_costate_multiplier = 0.0;
};

/// Backward costate recursion p_t = dH/dx_t.
double costate_step(Player player, double x, double p_next, const CostateCoupling& coupling,
                    const ModelParams& params);

/// Backward recursion of the supplier's costate on u: dH^S/du_t.
double manufacturer_multiplier_costate_step(double u_prime, double next, const ModelParams& params);

enum class MultiplierLevel {
  kManufacturer,         ///< u, on the retailer costate
  kSupplier,             ///< u', on the manufacturer costate
  kSupplierOnRetailer,   ///< supplier multiplier on the retailer costate
};

/// Forward multiplier dynamics: derivative of the leader Hamiltonian in the
/// follower's next-period costate.
///
/// kManufacturer: alpha*m + beta_r*foc_weight.
/// kSupplier: alpha*m + beta_m*foc_weight + beta_r*cross_foc_weight.
/// kSupplierOnRetailer: alpha*m + beta_r*foc_weight.
double multiplier_step(MultiplierLevel level, double multiplier, double foc_weight,
                       const ModelParams& params, double cross_foc_weight = 0.0);

/// Next-period values that drive one period's investment conditions.
struct NextCostates {
  double p_s = 0.0;
  double p_m = 0.0;
  double p_r = 0.0;
  double manufacturer_multiplier = 0.0;  ///< supplier costate on u
};

/// Per-period unknowns fixed by the stacked investment conditions.
struct PeriodControls {
  Investment investment;
  double manufacturer_on_retailer_foc = 0.0;
  double supplier_on_retailer_foc = 0.0;
  double supplier_on_manufacturer_foc = 0.0;
  double supplier_on_manufacturer_cross_foc = 0.0;
};

/// Throws SolverError(kUndeterminedControls) when tau*theta is below
/// kMinTaxCurvature.
void require_determined_controls(const ModelParams& params);

/// Coefficient matrix of the seven stacked investment conditions in the
/// unknowns (I^S, I^M, I^R, and the four nesting weights). Every entry is an
/// integer multiple of tau*theta.
Eigen::Matrix<double, 7, 7> stacked_control_matrix(const ModelParams& params);

/// Solves the seven stacked investment conditions of one period.
PeriodControls eliminate_controls(const NextCostates& next, const ModelParams& params);

/// Follower-only elimination for a given supplier investment: solves the
/// retailer condition and the manufacturer's two conditions for
/// (I^M, I^R, manufacturer weight).
PeriodControls eliminate_follower_controls(double supplier_investment, double p_m_next,
                                           double p_r_next, const ModelParams& params);

// --- Full-horizon system ------------------------------------------------

/// Maps a trajectory to the stacked unknown vector and back.
///
/// Unknowns: x, p_s, p_m, p_r, u, u' at t = 1..T+1; investments and the
/// four nesting weights at t = 1..T; supplier multiplier on the retailer
/// costate at t = 2..T+1; supplier costate on u at t = 1..T. The last two
/// have their fixed boundary value (zero at t = 1, resp. t = T+1) folded
/// into the recursions rather than pinned by a row.
class UnknownLayout {
 public:
  explicit UnknownLayout(int horizon);

  int horizon() const { return horizon_; }
  int size() const { return size_; }

  int x(int t) const { return x_ + t; }
  int supplier_investment(int t) const { return is_ + t; }
  int manufacturer_investment(int t) const { return im_ + t; }
  int retailer_investment(int t) const { return ir_ + t; }
  int p_s(int t) const { return ps_ + t; }
  int p_m(int t) const { return pm_ + t; }
  int p_r(int t) const { return pr_ + t; }
  int u(int t) const { return u_ + t; }
  int u_prime(int t) const { return up_ + t; }
  int manufacturer_on_retailer_foc(int t) const { return lam_ + t; }
  int supplier_on_retailer_foc(int t) const { return nu_ + t; }
  int supplier_on_manufacturer_foc(int t) const { return kap_ + t; }
  int supplier_on_manufacturer_cross_foc(int t) const { return rho_ + t; }
  /// Valid for t = 1..T (0-based), i.e. periods 2..T+1.
  int supplier_on_retailer_costate(int t) const { return eta_ + t - 1; }
  /// Valid for t = 0..T-1 (0-based), i.e. periods 1..T.
  int supplier_on_manufacturer_multiplier(int t) const { return sig_ + t; }

  Eigen::VectorXd pack(const Trajectory& trajectory) const;
  /// Quantities are left at zero.
  Trajectory unpack(const Eigen::VectorXd& unknowns) const;

 private:
  int horizon_;
  int x_, is_, im_, ir_, ps_, pm_, pr_, u_, up_, lam_, nu_, kap_, rho_, eta_, sig_;
  int size_;
};

/// One affine equation: residual = sum(coefficient * unknown) + constant.
struct Equation {
  std::string label;
  int period = 0;  ///< 1-based; 0 for boundary rows
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  double evaluate(const Eigen::VectorXd& unknowns) const;
};

/// Number of equations per period block.
inline constexpr int kEquationsPerPeriod = 15;

/// The full-horizon necessary conditions of the nested equilibrium.
struct StationaritySystem {
  UnknownLayout layout;
  int n_unknowns = 0;
  /// One block per period t = 1..T, each with kEquationsPerPeriod rows in the
  /// order produced by stationarity_residuals().
  std::vector<std::vector<Equation>> coefficient_blocks;
  /// x(1) = x1; p_s, p_m, p_r at T+1 = 0; u(1) = u'(1) = 0.
  std::vector<Equation> boundary_rows;

  int equation_count() const;
  /// Rows in block order followed by boundary rows.
  Eigen::MatrixXd dense_matrix() const;
  Eigen::VectorXd dense_rhs() const;
};

/// Builds the square system; throws std::logic_error if it is not square.
StationaritySystem assemble_system(const ModelParams& params);

/// Residuals of every stationarity equation evaluated directly from the
/// residual functions above, in the same order as the assembled system.
std::vector<double> stationarity_residuals(const Trajectory& trajectory, const ModelParams& params);

struct ResidualNorms {
  double max = 0.0;
  double rms = 0.0;
};

ResidualNorms residual_norms(const Trajectory& trajectory, const ModelParams& params);

/// Max-norm over all stationarity equations.
double residual_norm(const Trajectory& trajectory, const ModelParams& params);

}  // namespace csrgame
