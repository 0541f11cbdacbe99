#include "csrgame/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "csrgame/errors.hpp"

namespace csrgame {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Trajectory dense_solve(const ModelParams& params) {
  const StationaritySystem sys = assemble_system(params);
  const MatrixXd matrix = sys.dense_matrix();
  const VectorXd rhs = sys.dense_rhs();

  Eigen::FullPivLU<MatrixXd> lu(matrix);
  const double rcond = lu.rcond();
  if (!lu.isInvertible() || !(rcond > 1e-15)) {
    throw SolverError(SolverError::Kind::kSingularSystem,
                      fmt::format("stationarity system singular: rank {} of {}, condition "
                                  "estimate {:.3e}",
                                  lu.rank(), matrix.rows(), rcond > 0.0 ? 1.0 / rcond : INFINITY));
  }
  VectorXd z = lu.solve(rhs);
  z += lu.solve(rhs - matrix * z);

  Trajectory tr = sys.layout.unpack(z);
  const double quantity = optimal_quantity(params);
  std::fill(tr.q.begin(), tr.q.end(), quantity);
  return tr;
}

double path_objective(Player player, const VectorXd& supplier, const VectorXd& manufacturer,
                      const VectorXd& retailer, const ModelParams& params) {
  const double quantity = optimal_quantity(params);
  double stock = params.x1;
  double sum = 0.0;
  for (Eigen::Index t = 0; t < supplier.size(); ++t) {
    const Investment investment{supplier(t), manufacturer(t), retailer(t)};
    sum += stage_payoff(player, stock, quantity, investment, params);
    stock = state_transition(stock, investment, params);
  }
  return sum;
}

VectorXd quadratic_stationary_point(const std::function<double(const VectorXd&)>& f,
                                    const VectorXd& start, double step) {
  const Eigen::Index n = start.size();
  const double h = step > 0.0 ? step : std::max(1.0, 0.05 * start.lpNorm<Eigen::Infinity>());

  auto gradient = [&](const VectorXd& y) {
    VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      VectorXd plus = y, minus = y;
      plus(i) += h;
      minus(i) -= h;
      g(i) = (f(plus) - f(minus)) / (2 * h);
    }
    return g;
  };

  MatrixXd hessian(n, n);
  const double centre = f(start);
  for (Eigen::Index i = 0; i < n; ++i) {
    VectorXd plus = start, minus = start;
    plus(i) += h;
    minus(i) -= h;
    hessian(i, i) = (f(plus) - 2 * centre + f(minus)) / (h * h);
    for (Eigen::Index j = 0; j < i; ++j) {
      VectorXd pp = start, pm = start, mp = start, mm = start;
      pp(i) += h, pp(j) += h;
      pm(i) += h, pm(j) -= h;
      mp(i) -= h, mp(j) += h;
      mm(i) -= h, mm(j) -= h;
      hessian(i, j) = hessian(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
    }
  }
  Eigen::FullPivLU<MatrixXd> lu(hessian);
  if (!lu.isInvertible()) {
    throw SolverError(SolverError::Kind::kSingularSystem,
                      "finite-difference Hessian is singular; the response is not unique");
  }
  VectorXd y = start - lu.solve(gradient(start));
  y -= lu.solve(gradient(y));
  return y;
}

VectorXd retailer_response(const ModelParams& params, const VectorXd& supplier,
                           const VectorXd& manufacturer, const VectorXd& start) {
  auto objective = [&](const VectorXd& retailer) {
    return path_objective(Player::kRetailer, supplier, manufacturer, retailer, params);
  };
  const VectorXd origin = start.size() == supplier.size() ? start : VectorXd::Zero(supplier.size());
  return quadratic_stationary_point(objective, origin);
}

FollowerResponse manufacturer_response(const ModelParams& params, const VectorXd& supplier,
                                       const FollowerResponse& start) {
  const Eigen::Index n = supplier.size();
  const VectorXd retailer_start = start.retailer.size() == n ? start.retailer : VectorXd::Zero(n);
  auto objective = [&](const VectorXd& manufacturer) {
    const VectorXd retailer = retailer_response(params, supplier, manufacturer, retailer_start);
    return path_objective(Player::kManufacturer, supplier, manufacturer, retailer, params);
  };
  const VectorXd origin = start.manufacturer.size() == n ? start.manufacturer : VectorXd::Zero(n);
  FollowerResponse out;
  out.manufacturer = quadratic_stationary_point(objective, origin);
  out.retailer = retailer_response(params, supplier, out.manufacturer, retailer_start);
  return out;
}

namespace {

struct Paths {
  VectorXd supplier, manufacturer, retailer;
};

Paths paths_of(const Trajectory& trajectory) {
  const int T = trajectory.horizon();
  Paths p{VectorXd(T), VectorXd(T), VectorXd(T)};
  for (int t = 0; t < T; ++t) {
    p.supplier(t) = trajectory.controls[t].supplier;
    p.manufacturer(t) = trajectory.controls[t].manufacturer;
    p.retailer(t) = trajectory.controls[t].retailer;
  }
  return p;
}

std::vector<VectorXd> probe_directions(int dimension, const StationarityCheckOptions& options) {
  std::vector<VectorXd> directions;
  for (int i = 0; i < dimension; ++i) directions.push_back(VectorXd::Unit(dimension, i));
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  for (int k = 0; k < options.random_directions; ++k) {
    VectorXd d(dimension);
    for (auto& value : d) value = normal(rng);
    directions.push_back(d.normalized());
  }
  return directions;
}

double max_directional_derivative(const std::function<double(const VectorXd&)>& objective,
                                  const VectorXd& base, const StationarityCheckOptions& options) {
  const double h = options.relative_step * std::max(1.0, base.lpNorm<Eigen::Infinity>());
  double worst = 0.0;
  for (const VectorXd& d : probe_directions(static_cast<int>(base.size()), options)) {
    const double derivative = (objective(base + h * d) - objective(base - h * d)) / (2 * h);
    if (!(std::abs(derivative) <= worst)) worst = std::abs(derivative);
  }
  return worst;
}

}  // namespace

double follower_stationarity_check(const Trajectory& trajectory, const ModelParams& params,
                                   FollowerLevel level, const StationarityCheckOptions& options) {
  const Paths p = paths_of(trajectory);
  if (level == FollowerLevel::kRetailer) {
    auto objective = [&](const VectorXd& retailer) {
      return path_objective(Player::kRetailer, p.supplier, p.manufacturer, retailer, params);
    };
    return max_directional_derivative(objective, p.retailer, options);
  }
  auto objective = [&](const VectorXd& manufacturer) {
    const VectorXd retailer = retailer_response(params, p.supplier, manufacturer, p.retailer);
    return path_objective(Player::kManufacturer, p.supplier, manufacturer, retailer, params);
  };
  return max_directional_derivative(objective, p.manufacturer, options);
}

double leader_stationarity_check(const Trajectory& trajectory, const ModelParams& params,
                                 const StationarityCheckOptions& options) {
  const Paths p = paths_of(trajectory);
  const FollowerResponse start{p.manufacturer, p.retailer};
  auto objective = [&](const VectorXd& supplier) {
    const FollowerResponse r = manufacturer_response(params, supplier, start);
    return path_objective(Player::kSupplier, supplier, r.manufacturer, r.retailer, params);
  };
  return max_directional_derivative(objective, p.supplier, options);
}

double grid_scan_supplier_investment(const ModelParams& params) {
  if (params.horizon != 1) {
    throw std::invalid_argument("grid scan is only defined for a one-period game");
  }
  require_determined_controls(params);
  auto composed = [&](double supplier_investment) {
    const VectorXd supplier = VectorXd::Constant(1, supplier_investment);
    const FollowerResponse r = manufacturer_response(params, supplier);
    return path_objective(Player::kSupplier, supplier, r.manufacturer, r.retailer, params);
  };

  constexpr int kPoints = 201;
  // Secant slopes on a uniform grid; returns the interpolated zero crossing
  // of the slopes, or NaN when they do not change sign.
  auto scan = [&](double centre, double half_width, double* spacing) {
    const double dx = 2 * half_width / (kPoints - 1);
    *spacing = dx;
    std::vector<double> values(kPoints);
    for (int k = 0; k < kPoints; ++k) values[k] = composed(centre - half_width + k * dx);
    std::vector<double> slopes(kPoints - 1);
    for (int k = 0; k + 1 < kPoints; ++k) slopes[k] = (values[k + 1] - values[k]) / dx;
    for (int k = 0; k + 1 < kPoints - 1; ++k) {
      if ((slopes[k] > 0) != (slopes[k + 1] > 0) || slopes[k] == 0.0) {
        const double mid = centre - half_width + (k + 0.5) * dx;
        return mid + dx * slopes[k] / (slopes[k] - slopes[k + 1]);
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  };

  double half_width =
      (1.0 + std::abs(1.0 - params.tau) + params.d + params.d_hat) / params.tax_curvature();
  double spacing = 0.0;
  double estimate = std::numeric_limits<double>::quiet_NaN();
  for (int expansion = 0; expansion < 8 && std::isnan(estimate); ++expansion) {
    estimate = scan(0.0, half_width, &spacing);
    half_width *= 4;
  }
  if (std::isnan(estimate)) {
    throw SolverError(SolverError::Kind::kSingularSystem,
                      "grid scan found no stationary point of the supplier objective");
  }
  while (spacing > 0.5) {
    const double refined = scan(estimate, 4 * spacing, &spacing);
    if (std::isnan(refined)) break;
    estimate = refined;
  }
  return estimate;
}

double GradientCheck::relative_error() const {
  return std::abs(analytic - numeric) /
         std::max({1.0, std::abs(analytic), std::abs(numeric)});
}

std::vector<GradientCheck> hamiltonian_gradient_checks(const PeriodPoint& point, double quantity,
                                                       const ModelParams& params,
                                                       double relative_step) {
  using Hamiltonian = double (*)(const PeriodPoint&, double, const ModelParams&);
  auto derivative = [&](Hamiltonian h, double PeriodPoint::*field) {
    const double base = point.*field;
    const double step = relative_step * std::max(1.0, std::abs(base));
    PeriodPoint plus = point, minus = point;
    plus.*field = base + step;
    minus.*field = base - step;
    return (h(plus, quantity, params) - h(minus, quantity, params)) / (2 * step);
  };
  auto investment = [&](Hamiltonian h, double Investment::*field) {
    const double base = point.investment.*field;
    const double step = relative_step * std::max(1.0, std::abs(base));
    PeriodPoint plus = point, minus = point;
    plus.investment.*field = base + step;
    minus.investment.*field = base - step;
    return (h(plus, quantity, params) - h(minus, quantity, params)) / (2 * step);
  };

  const auto& i = point.investment;
  const double weight = point.manufacturer_on_retailer_foc;
  std::vector<GradientCheck> checks;
  checks.push_back({"retailer_foc", retailer_foc_residual(i, point.p_r_next, params),
                    investment(retailer_hamiltonian, &Investment::retailer)});
  checks.push_back({"manufacturer_foc",
                    manufacturer_foc_residual(i, point.p_m_next, weight, params),
                    investment(manufacturer_hamiltonian, &Investment::manufacturer)});
  checks.push_back({"manufacturer_cross_foc",
                    manufacturer_cross_foc_residual(i, point.p_m_next, weight, params),
                    investment(manufacturer_hamiltonian, &Investment::retailer)});
  checks.push_back({"supplier_foc", supplier_foc_residual(point, params),
                    investment(supplier_hamiltonian, &Investment::supplier)});
  checks.push_back({"supplier_manufacturer_investment",
                    supplier_manufacturer_investment_residual(point, params),
                    investment(supplier_hamiltonian, &Investment::manufacturer)});
  checks.push_back({"supplier_retailer_investment",
                    supplier_retailer_investment_residual(point, params),
                    investment(supplier_hamiltonian, &Investment::retailer)});
  checks.push_back({"supplier_follower_weight", supplier_follower_weight_residual(point, params),
                    derivative(supplier_hamiltonian, &PeriodPoint::manufacturer_on_retailer_foc)});

  checks.push_back({"retailer_costate",
                    costate_step(Player::kRetailer, point.x, point.p_r_next, {}, params),
                    derivative(retailer_hamiltonian, &PeriodPoint::x)});
  checks.push_back({"manufacturer_costate",
                    costate_step(Player::kManufacturer, point.x, point.p_m_next,
                                 {.follower_multiplier = point.u}, params),
                    derivative(manufacturer_hamiltonian, &PeriodPoint::x)});
  checks.push_back(
      {"supplier_costate",
       costate_step(Player::kSupplier, point.x, point.p_s_next,
                    {.follower_multiplier = point.u_prime,
                     .retailer_costate_multiplier = point.supplier_on_retailer_costate},
                    params),
       derivative(supplier_hamiltonian, &PeriodPoint::x)});
  checks.push_back({"manufacturer_multiplier_costate",
                    manufacturer_multiplier_costate_step(
                        point.u_prime, point.supplier_on_manufacturer_multiplier_next, params),
                    derivative(supplier_hamiltonian, &PeriodPoint::u)});

  checks.push_back({"u_step",
                    multiplier_step(MultiplierLevel::kManufacturer, point.u, weight, params),
                    derivative(manufacturer_hamiltonian, &PeriodPoint::p_r_next)});
  checks.push_back({"u_prime_step",
                    multiplier_step(MultiplierLevel::kSupplier, point.u_prime,
                                    point.supplier_on_manufacturer_foc, params,
                                    point.supplier_on_manufacturer_cross_foc),
                    derivative(supplier_hamiltonian, &PeriodPoint::p_m_next)});
  checks.push_back({"retailer_costate_multiplier_step",
                    multiplier_step(MultiplierLevel::kSupplierOnRetailer,
                                    point.supplier_on_retailer_costate,
                                    point.supplier_on_retailer_foc, params),
                    derivative(supplier_hamiltonian, &PeriodPoint::p_r_next)});
  return checks;
}

}  // namespace csrgame
