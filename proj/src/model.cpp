#include "csrgame/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "csrgame/errors.hpp"
#include "csrgame/trajectory.hpp"

namespace csrgame {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::ostringstream out;
  out << "invalid parameters:";
  for (const auto& p : problems) out << "\n  - " << p;
  return out.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

ParseError::ParseError(const std::string& message, int line, std::string field)
    : std::runtime_error(line > 0 ? fmt::format("line {}: {}", line, message) : message),
      line_(line),
      field_(std::move(field)) {}

SolverError::SolverError(Kind kind, const std::string& message, int period)
    : std::runtime_error(message), kind_(kind), period_(period) {}

std::string to_string(Player player) {
  switch (player) {
    case Player::kSupplier:
      return "supplier";
    case Player::kManufacturer:
      return "manufacturer";
    case Player::kRetailer:
      return "retailer";
  }
  return "unknown";
}

std::vector<std::string> validation_errors(const ModelParams& params,
                                           const ValidationOptions& options) {
  std::vector<std::string> problems;
  const std::pair<const char*, double> fields[] = {
      {"alpha", params.alpha},     {"beta_s", params.beta_s},   {"beta_m", params.beta_m},
      {"beta_r", params.beta_r},   {"tau", params.tau},         {"theta", params.theta},
      {"delta_s", params.delta_s}, {"delta_m", params.delta_m}, {"delta_r", params.delta_r},
      {"d", params.d},             {"d_hat", params.d_hat},     {"a", params.a},
      {"b", params.b},             {"v", params.v},             {"z", params.z},
      {"c", params.c},             {"x1", params.x1},
  };
  for (const auto& [name, value] : fields) {
    if (!std::isfinite(value)) problems.push_back(fmt::format("{} must be finite (got {})", name, value));
  }
  auto open_unit = [&](const char* name, double value) {
    if (std::isfinite(value) && !(value > 0.0 && value < 1.0)) {
      problems.push_back(fmt::format("{} = {} violates bound (0, 1)", name, value));
    }
  };
  auto non_negative = [&](const char* name, double value) {
    if (std::isfinite(value) && value < 0.0) {
      problems.push_back(fmt::format("{} = {} violates bound >= 0", name, value));
    }
  };
  auto half_open_unit = [&](const char* name, double value) {
    if (std::isfinite(value) && !(value >= 0.0 && value < 1.0)) {
      problems.push_back(fmt::format("{} = {} violates bound [0, 1)", name, value));
    }
  };

  open_unit("beta_s", params.beta_s);
  open_unit("beta_m", params.beta_m);
  open_unit("beta_r", params.beta_r);
  if (options.strict_alpha && std::isfinite(params.alpha) &&
      !(params.alpha > 0.0 && params.alpha <= 1.0)) {
    problems.push_back(fmt::format("alpha = {} violates bound (0, 1]", params.alpha));
  }
  if (std::isfinite(params.b) && !(params.b > 0.0)) {
    problems.push_back(fmt::format("b = {} violates bound > 0", params.b));
  }
  non_negative("tau", params.tau);
  non_negative("theta", params.theta);
  non_negative("delta_s", params.delta_s);
  non_negative("delta_m", params.delta_m);
  non_negative("delta_r", params.delta_r);
  non_negative("c", params.c);
  half_open_unit("d", params.d);
  half_open_unit("d_hat", params.d_hat);
  if (params.horizon < 1) {
    problems.push_back(fmt::format("horizon_T = {} violates bound >= 1", params.horizon));
  }
  return problems;
}

void validate(const ModelParams& params, const ValidationOptions& options) {
  auto problems = validation_errors(params, options);
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

double Investment::of(Player player) const {
  switch (player) {
    case Player::kSupplier:
      return supplier;
    case Player::kManufacturer:
      return manufacturer;
    case Player::kRetailer:
      return retailer;
  }
  return 0.0;
}

double inverse_demand(double quantity, const ModelParams& params) {
  return params.a - params.b * quantity;
}

double tax_return(double own_investment, double total_investment, const ModelParams& params) {
  return params.tau * own_investment * (1.0 + params.theta * total_investment);
}

double social_benefit(double stock, double coefficient) { return coefficient * stock * stock; }

double state_transition(double stock, const Investment& investment, const ModelParams& params) {
  return params.alpha * stock + params.beta_s * investment.supplier +
         params.beta_m * investment.manufacturer + params.beta_r * investment.retailer;
}

double optimal_quantity(const ModelParams& params) {
  if (!(params.b > 0.0)) {
    throw ValidationError({fmt::format("b = {} violates bound > 0 (degenerate demand)", params.b)});
  }
  return std::max(0.0, (params.a - params.v) / (2.0 * params.b));
}

double stage_payoff(Player player, double stock, double quantity, const Investment& investment,
                    const ModelParams& params) {
  const double total = investment.total();
  switch (player) {
    case Player::kSupplier:
      return (params.v - params.c) * quantity + social_benefit(stock, params.delta_s) +
             tax_return(investment.supplier, total, params) - investment.supplier +
             params.d * investment.manufacturer;
    case Player::kManufacturer:
      return inverse_demand(quantity, params) * quantity - params.v * quantity +
             social_benefit(stock, params.delta_m) +
             tax_return(investment.manufacturer, total, params) - investment.manufacturer +
             params.d_hat * investment.retailer;
    case Player::kRetailer:
      return params.z * quantity - inverse_demand(quantity, params) * quantity +
             social_benefit(stock, params.delta_r) +
             tax_return(investment.retailer, total, params) - investment.retailer;
  }
  return 0.0;
}

// --- Trajectory helpers --------------------------------------------------

Trajectory Trajectory::zeros(int horizon) {
  const auto periods = static_cast<std::size_t>(horizon);
  Trajectory t;
  t.x.assign(periods + 1, 0.0);
  t.controls.assign(periods, Investment{});
  t.q.assign(periods, 0.0);
  t.p_s.assign(periods + 1, 0.0);
  t.p_m.assign(periods + 1, 0.0);
  t.p_r.assign(periods + 1, 0.0);
  t.u.assign(periods + 1, 0.0);
  t.u_prime.assign(periods + 1, 0.0);
  auto& n = t.nesting;
  n.manufacturer_on_retailer_foc.assign(periods, 0.0);
  n.supplier_on_retailer_foc.assign(periods, 0.0);
  n.supplier_on_manufacturer_foc.assign(periods, 0.0);
  n.supplier_on_manufacturer_cross_foc.assign(periods, 0.0);
  n.supplier_on_retailer_costate.assign(periods + 1, 0.0);
  n.supplier_on_manufacturer_multiplier.assign(periods + 1, 0.0);
  return t;
}

double state_equation_violation(const Trajectory& trajectory, const ModelParams& params) {
  double worst = 0.0;
  for (int t = 0; t < trajectory.horizon(); ++t) {
    const double next = state_transition(trajectory.x[t], trajectory.controls[t], params);
    worst = std::max(worst, std::abs(trajectory.x[t + 1] - next));
  }
  return worst;
}

double objective_window(Player player, const Trajectory& trajectory, const ModelParams& params,
                        int first, int last) {
  double sum = 0.0;
  for (int t = first; t < last; ++t) {
    sum += stage_payoff(player, trajectory.x[t], trajectory.q[t], trajectory.controls[t], params);
  }
  return sum;
}

double total_objective(Player player, const Trajectory& trajectory, const ModelParams& params) {
  const int horizon = trajectory.horizon();
  if (trajectory.x.size() != static_cast<std::size_t>(horizon) + 1 ||
      trajectory.q.size() != static_cast<std::size_t>(horizon)) {
    throw SolverError(SolverError::Kind::kInconsistentTrajectory,
                      "trajectory arrays do not match its horizon");
  }
  double scale = 1.0;
  for (double x : trajectory.x) scale = std::max(scale, std::abs(x));
  const double violation = state_equation_violation(trajectory, params);
  if (violation > 1e-9 * scale) {
    throw SolverError(SolverError::Kind::kInconsistentTrajectory,
                      fmt::format("trajectory violates the state equation by {:.3e}", violation));
  }
  return objective_window(player, trajectory, params, 0, horizon);
}

std::vector<double> roll_out(const std::vector<Investment>& controls, const ModelParams& params) {
  std::vector<double> x(controls.size() + 1);
  x[0] = params.x1;
  for (std::size_t t = 0; t < controls.size(); ++t) {
    x[t + 1] = state_transition(x[t], controls[t], params);
  }
  return x;
}

}  // namespace csrgame
