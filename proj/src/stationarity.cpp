#include "csrgame/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "csrgame/errors.hpp"

namespace csrgame {

PeriodPoint period_point(const Trajectory& trajectory, int t) {
  const auto& n = trajectory.nesting;
  PeriodPoint point;
  point.x = trajectory.x[t];
  point.investment = trajectory.controls[t];
  point.p_s_next = trajectory.p_s[t + 1];
  point.p_m_next = trajectory.p_m[t + 1];
  point.p_r_next = trajectory.p_r[t + 1];
  point.u = trajectory.u[t];
  point.u_prime = trajectory.u_prime[t];
  point.manufacturer_on_retailer_foc = n.manufacturer_on_retailer_foc[t];
  point.supplier_on_retailer_foc = n.supplier_on_retailer_foc[t];
  point.supplier_on_manufacturer_foc = n.supplier_on_manufacturer_foc[t];
  point.supplier_on_manufacturer_cross_foc = n.supplier_on_manufacturer_cross_foc[t];
  // Boundary values of the two auxiliary chains are fixed, not stored.
  point.supplier_on_retailer_costate = t == 0 ? 0.0 : n.supplier_on_retailer_costate[t];
  point.supplier_on_manufacturer_multiplier_next =
      t + 1 == trajectory.horizon() ? 0.0 : n.supplier_on_manufacturer_multiplier[t + 1];
  return point;
}

double retailer_hamiltonian(const PeriodPoint& point, double quantity, const ModelParams& params) {
  return stage_payoff(Player::kRetailer, point.x, quantity, point.investment, params) +
         point.p_r_next * state_transition(point.x, point.investment, params);
}

double manufacturer_hamiltonian(const PeriodPoint& point, double quantity,
                                const ModelParams& params) {
  return stage_payoff(Player::kManufacturer, point.x, quantity, point.investment, params) +
         point.p_m_next * state_transition(point.x, point.investment, params) +
         point.manufacturer_on_retailer_foc *
             retailer_foc_residual(point.investment, point.p_r_next, params) +
         point.u * costate_step(Player::kRetailer, point.x, point.p_r_next, {}, params);
}

double supplier_hamiltonian(const PeriodPoint& point, double quantity, const ModelParams& params) {
  const double follower_weight = point.manufacturer_on_retailer_foc;
  return stage_payoff(Player::kSupplier, point.x, quantity, point.investment, params) +
         point.p_s_next * state_transition(point.x, point.investment, params) +
         point.supplier_on_retailer_foc *
             retailer_foc_residual(point.investment, point.p_r_next, params) +
         point.supplier_on_retailer_costate *
             costate_step(Player::kRetailer, point.x, point.p_r_next, {}, params) +
         point.supplier_on_manufacturer_foc *
             manufacturer_foc_residual(point.investment, point.p_m_next, follower_weight, params) +
         point.supplier_on_manufacturer_cross_foc *
             manufacturer_cross_foc_residual(point.investment, point.p_m_next, follower_weight,
                                             params) +
         point.u_prime * costate_step(Player::kManufacturer, point.x, point.p_m_next,
                                      {.follower_multiplier = point.u}, params) +
         point.supplier_on_manufacturer_multiplier_next *
             multiplier_step(MultiplierLevel::kManufacturer, point.u, follower_weight, params);
}

double retailer_foc_residual(const Investment& investment, double p_r_next,
                             const ModelParams& params) {
  return params.tau * (1.0 + params.theta * (investment.supplier + investment.manufacturer +
                                             2.0 * investment.retailer)) -
         1.0 + params.beta_r * p_r_next;
}

double manufacturer_foc_residual(const Investment& investment, double p_m_next,
                                 double manufacturer_on_retailer_foc, const ModelParams& params) {
  const double curvature = params.tax_curvature();
  return params.tau * (1.0 + params.theta * (investment.supplier + 2.0 * investment.manufacturer +
                                             investment.retailer)) -
         1.0 + params.beta_m * p_m_next + curvature * manufacturer_on_retailer_foc;
}

double manufacturer_cross_foc_residual(const Investment& investment, double p_m_next,
                                       double manufacturer_on_retailer_foc,
                                       const ModelParams& params) {
  const double curvature = params.tax_curvature();
  return curvature * investment.manufacturer + params.d_hat + params.beta_r * p_m_next +
         2.0 * curvature * manufacturer_on_retailer_foc;
}

double supplier_foc_residual(const PeriodPoint& point, const ModelParams& params) {
  const auto& i = point.investment;
  const double curvature = params.tax_curvature();
  return params.tau * (1.0 + params.theta * (2.0 * i.supplier + i.manufacturer + i.retailer)) -
         1.0 + params.beta_s * point.p_s_next +
         curvature * (point.supplier_on_retailer_foc + point.supplier_on_manufacturer_foc);
}

double supplier_manufacturer_investment_residual(const PeriodPoint& point,
                                                 const ModelParams& params) {
  const double curvature = params.tax_curvature();
  return curvature * point.investment.supplier + params.d + params.beta_m * point.p_s_next +
         curvature * (point.supplier_on_retailer_foc + 2.0 * point.supplier_on_manufacturer_foc +
                      point.supplier_on_manufacturer_cross_foc);
}

double supplier_retailer_investment_residual(const PeriodPoint& point, const ModelParams& params) {
  const double curvature = params.tax_curvature();
  return curvature * point.investment.supplier + params.beta_r * point.p_s_next +
         curvature * (2.0 * point.supplier_on_retailer_foc + point.supplier_on_manufacturer_foc);
}

double supplier_follower_weight_residual(const PeriodPoint& point, const ModelParams& params) {
  const double curvature = params.tax_curvature();
  return curvature * (point.supplier_on_manufacturer_foc +
                      2.0 * point.supplier_on_manufacturer_cross_foc) +
         params.beta_r * point.supplier_on_manufacturer_multiplier_next;
}

double costate_step(Player player, double x, double p_next, const CostateCoupling& coupling,
                    const ModelParams& params) {
  switch (player) {
    case Player::kRetailer:
      return 2.0 * params.delta_r * x + params.alpha * p_next;
    case Player::kManufacturer:
      return 2.0 * params.delta_m * x + params.alpha * p_next +
             2.0 * params.delta_r * coupling.follower_multiplier;
    case Player::kSupplier:
      return 2.0 * params.delta_s * x + params.alpha * p_next +
             2.0 * params.delta_m * coupling.follower_multiplier +
             2.0 * params.delta_r * coupling.retailer_costate_multiplier;
  }
  return 0.0;
}

double manufacturer_multiplier_costate_step(double u_prime, double next, const ModelParams& params) {
  return params.alpha * next + 2.0 * params.delta_r * u_prime;
}

double multiplier_step(MultiplierLevel level, double multiplier, double foc_weight,
                       const ModelParams& params, double cross_foc_weight) {
  switch (level) {
    case MultiplierLevel::kManufacturer:
    case MultiplierLevel::kSupplierOnRetailer:
      return params.alpha * multiplier + params.beta_r * foc_weight;
    case MultiplierLevel::kSupplier:
      return params.alpha * multiplier + params.beta_m * foc_weight +
             params.beta_r * cross_foc_weight;
  }
  return 0.0;
}

void require_determined_controls(const ModelParams& params) {
  const double curvature = params.tax_curvature();
  if (!(std::abs(curvature) >= kMinTaxCurvature)) {
    throw SolverError(
        SolverError::Kind::kUndeterminedControls,
        fmt::format("controls undetermined by FOC: tau*theta = {} (tau = {}, theta = {}); the "
                    "investment conditions do not depend on the investments",
                    curvature, params.tau, params.theta));
  }
}

Eigen::Matrix<double, 7, 7> stacked_control_matrix(const ModelParams& params) {
  // Columns: I^S, I^M, I^R, manufacturer weight, supplier weights on the
  // retailer condition, the manufacturer condition, the manufacturer cross
  // condition.
  Eigen::Matrix<double, 7, 7> pattern;
  // clang-format off
  pattern << 1, 1, 2, 0, 0, 0, 0,   // retailer
             1, 2, 1, 1, 0, 0, 0,   // manufacturer
             0, 1, 0, 2, 0, 0, 0,   // manufacturer cross
             2, 1, 1, 0, 1, 1, 0,   // supplier
             1, 0, 0, 0, 1, 2, 1,   // supplier in I^M
             1, 0, 0, 0, 2, 1, 0,   // supplier in I^R
             0, 0, 0, 0, 0, 1, 2;   // supplier in manufacturer weight
  // clang-format on
  return params.tax_curvature() * pattern;
}

PeriodControls eliminate_controls(const NextCostates& next, const ModelParams& params) {
  require_determined_controls(params);
  Eigen::Matrix<double, 7, 1> rhs;
  rhs << 1.0 - params.tau - params.beta_r * next.p_r,
      1.0 - params.tau - params.beta_m * next.p_m,
      -params.d_hat - params.beta_r * next.p_m,
      1.0 - params.tau - params.beta_s * next.p_s,
      -params.d - params.beta_m * next.p_s,
      -params.beta_r * next.p_s,
      -params.beta_r * next.manufacturer_multiplier;
  const Eigen::Matrix<double, 7, 1> w = stacked_control_matrix(params).fullPivLu().solve(rhs);
  PeriodControls out;
  out.investment = {w(0), w(1), w(2)};
  out.manufacturer_on_retailer_foc = w(3);
  out.supplier_on_retailer_foc = w(4);
  out.supplier_on_manufacturer_foc = w(5);
  out.supplier_on_manufacturer_cross_foc = w(6);
  return out;
}

PeriodControls eliminate_follower_controls(double supplier_investment, double p_m_next,
                                           double p_r_next, const ModelParams& params) {
  require_determined_controls(params);
  const double curvature = params.tax_curvature();
  Eigen::Matrix3d matrix;
  // clang-format off
  matrix << 1, 2, 0,
            2, 1, 1,
            1, 0, 2;
  // clang-format on
  matrix *= curvature;
  const Eigen::Vector3d rhs(
      1.0 - params.tau - curvature * supplier_investment - params.beta_r * p_r_next,
      1.0 - params.tau - curvature * supplier_investment - params.beta_m * p_m_next,
      -params.d_hat - params.beta_r * p_m_next);
  const Eigen::Vector3d w = matrix.fullPivLu().solve(rhs);
  PeriodControls out;
  out.investment = {supplier_investment, w(0), w(1)};
  out.manufacturer_on_retailer_foc = w(2);
  return out;
}

// --- Full-horizon system ------------------------------------------------

UnknownLayout::UnknownLayout(int horizon) : horizon_(horizon) {
  const int T = horizon;
  int next = 0;
  auto take = [&next](int count) {
    const int start = next;
    next += count;
    return start;
  };
  x_ = take(T + 1);
  is_ = take(T);
  im_ = take(T);
  ir_ = take(T);
  ps_ = take(T + 1);
  pm_ = take(T + 1);
  pr_ = take(T + 1);
  u_ = take(T + 1);
  up_ = take(T + 1);
  lam_ = take(T);
  nu_ = take(T);
  kap_ = take(T);
  rho_ = take(T);
  eta_ = take(T);
  sig_ = take(T);
  size_ = next;
}

Eigen::VectorXd UnknownLayout::pack(const Trajectory& tr) const {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(size_);
  const auto& n = tr.nesting;
  for (int t = 0; t <= horizon_; ++t) {
    z(x(t)) = tr.x[t];
    z(p_s(t)) = tr.p_s[t];
    z(p_m(t)) = tr.p_m[t];
    z(p_r(t)) = tr.p_r[t];
    z(u(t)) = tr.u[t];
    z(u_prime(t)) = tr.u_prime[t];
  }
  for (int t = 0; t < horizon_; ++t) {
    z(supplier_investment(t)) = tr.controls[t].supplier;
    z(manufacturer_investment(t)) = tr.controls[t].manufacturer;
    z(retailer_investment(t)) = tr.controls[t].retailer;
    z(manufacturer_on_retailer_foc(t)) = n.manufacturer_on_retailer_foc[t];
    z(supplier_on_retailer_foc(t)) = n.supplier_on_retailer_foc[t];
    z(supplier_on_manufacturer_foc(t)) = n.supplier_on_manufacturer_foc[t];
    z(supplier_on_manufacturer_cross_foc(t)) = n.supplier_on_manufacturer_cross_foc[t];
    z(supplier_on_retailer_costate(t + 1)) = n.supplier_on_retailer_costate[t + 1];
    z(supplier_on_manufacturer_multiplier(t)) = n.supplier_on_manufacturer_multiplier[t];
  }
  return z;
}

Trajectory UnknownLayout::unpack(const Eigen::VectorXd& z) const {
  Trajectory tr = Trajectory::zeros(horizon_);
  auto& n = tr.nesting;
  for (int t = 0; t <= horizon_; ++t) {
    tr.x[t] = z(x(t));
    tr.p_s[t] = z(p_s(t));
    tr.p_m[t] = z(p_m(t));
    tr.p_r[t] = z(p_r(t));
    tr.u[t] = z(u(t));
    tr.u_prime[t] = z(u_prime(t));
  }
  for (int t = 0; t < horizon_; ++t) {
    tr.controls[t] = {z(supplier_investment(t)), z(manufacturer_investment(t)),
                      z(retailer_investment(t))};
    n.manufacturer_on_retailer_foc[t] = z(manufacturer_on_retailer_foc(t));
    n.supplier_on_retailer_foc[t] = z(supplier_on_retailer_foc(t));
    n.supplier_on_manufacturer_foc[t] = z(supplier_on_manufacturer_foc(t));
    n.supplier_on_manufacturer_cross_foc[t] = z(supplier_on_manufacturer_cross_foc(t));
    n.supplier_on_retailer_costate[t + 1] = z(supplier_on_retailer_costate(t + 1));
    n.supplier_on_manufacturer_multiplier[t] = z(supplier_on_manufacturer_multiplier(t));
  }
  return tr;
}

double Equation::evaluate(const Eigen::VectorXd& unknowns) const {
  double sum = constant;
  for (const auto& [index, coefficient] : terms) sum += coefficient * unknowns(index);
  return sum;
}

int StationaritySystem::equation_count() const {
  int count = static_cast<int>(boundary_rows.size());
  for (const auto& block : coefficient_blocks) count += static_cast<int>(block.size());
  return count;
}

Eigen::MatrixXd StationaritySystem::dense_matrix() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(equation_count(), n_unknowns);
  int row = 0;
  auto emit = [&](const Equation& eq) {
    for (const auto& [index, coefficient] : eq.terms) m(row, index) += coefficient;
    ++row;
  };
  for (const auto& block : coefficient_blocks) {
    for (const auto& eq : block) emit(eq);
  }
  for (const auto& eq : boundary_rows) emit(eq);
  return m;
}

Eigen::VectorXd StationaritySystem::dense_rhs() const {
  Eigen::VectorXd rhs(equation_count());
  int row = 0;
  for (const auto& block : coefficient_blocks) {
    for (const auto& eq : block) rhs(row++) = -eq.constant;
  }
  for (const auto& eq : boundary_rows) rhs(row++) = -eq.constant;
  return rhs;
}

StationaritySystem assemble_system(const ModelParams& params) {
  const int T = params.horizon;
  const UnknownLayout L(T);
  const double k = params.tax_curvature();
  const double alpha = params.alpha;
  const double bs = params.beta_s, bm = params.beta_m, br = params.beta_r;

  StationaritySystem sys{L, L.size(), {}, {}};
  sys.coefficient_blocks.reserve(T);
  for (int t = 0; t < T; ++t) {
    const int period = t + 1;
    const bool last = t + 1 == T;
    std::vector<Equation> block;
    block.reserve(kEquationsPerPeriod);
    auto add = [&](const char* label, std::vector<std::pair<int, double>> terms, double constant) {
      block.push_back({label, period, std::move(terms), constant});
    };
    const int is = L.supplier_investment(t), im = L.manufacturer_investment(t),
              ir = L.retailer_investment(t);
    const int lam = L.manufacturer_on_retailer_foc(t), nu = L.supplier_on_retailer_foc(t),
              kap = L.supplier_on_manufacturer_foc(t),
              rho = L.supplier_on_manufacturer_cross_foc(t);

    add("state", {{L.x(t + 1), 1.0}, {L.x(t), -alpha}, {is, -bs}, {im, -bm}, {ir, -br}}, 0.0);
    add("retailer_foc", {{is, k}, {im, k}, {ir, 2 * k}, {L.p_r(t + 1), br}}, params.tau - 1.0);
    add("manufacturer_foc", {{is, k}, {im, 2 * k}, {ir, k}, {lam, k}, {L.p_m(t + 1), bm}},
        params.tau - 1.0);
    add("supplier_foc",
        {{is, 2 * k}, {im, k}, {ir, k}, {nu, k}, {kap, k}, {L.p_s(t + 1), bs}}, params.tau - 1.0);
    add("retailer_costate",
        {{L.p_r(t), 1.0}, {L.x(t), -2 * params.delta_r}, {L.p_r(t + 1), -alpha}}, 0.0);
    add("manufacturer_costate",
        {{L.p_m(t), 1.0},
         {L.x(t), -2 * params.delta_m},
         {L.p_m(t + 1), -alpha},
         {L.u(t), -2 * params.delta_r}},
        0.0);
    {
      std::vector<std::pair<int, double>> terms = {{L.p_s(t), 1.0},
                                                   {L.x(t), -2 * params.delta_s},
                                                   {L.p_s(t + 1), -alpha},
                                                   {L.u_prime(t), -2 * params.delta_m}};
      if (t > 0) terms.push_back({L.supplier_on_retailer_costate(t), -2 * params.delta_r});
      add("supplier_costate", std::move(terms), 0.0);
    }
    add("u_step", {{L.u(t + 1), 1.0}, {L.u(t), -alpha}, {lam, -br}}, 0.0);
    add("u_prime_step", {{L.u_prime(t + 1), 1.0}, {L.u_prime(t), -alpha}, {kap, -bm}, {rho, -br}},
        0.0);
    add("manufacturer_cross_foc", {{im, k}, {lam, 2 * k}, {L.p_m(t + 1), br}}, params.d_hat);
    add("supplier_manufacturer_investment",
        {{is, k}, {nu, k}, {kap, 2 * k}, {rho, k}, {L.p_s(t + 1), bm}}, params.d);
    add("supplier_retailer_investment", {{is, k}, {nu, 2 * k}, {kap, k}, {L.p_s(t + 1), br}},
        0.0);
    {
      std::vector<std::pair<int, double>> terms = {{kap, k}, {rho, 2 * k}};
      if (!last) terms.push_back({L.supplier_on_manufacturer_multiplier(t + 1), br});
      add("supplier_follower_weight", std::move(terms), 0.0);
    }
    {
      std::vector<std::pair<int, double>> terms = {{L.supplier_on_retailer_costate(t + 1), 1.0},
                                                   {nu, -br}};
      if (t > 0) terms.push_back({L.supplier_on_retailer_costate(t), -alpha});
      add("retailer_costate_multiplier_step", std::move(terms), 0.0);
    }
    {
      std::vector<std::pair<int, double>> terms = {{L.supplier_on_manufacturer_multiplier(t), 1.0},
                                                   {L.u_prime(t), -2 * params.delta_r}};
      if (!last) terms.push_back({L.supplier_on_manufacturer_multiplier(t + 1), -alpha});
      add("manufacturer_multiplier_costate", std::move(terms), 0.0);
    }
    sys.coefficient_blocks.push_back(std::move(block));
  }

  sys.boundary_rows = {
      {"initial_state", 0, {{L.x(0), 1.0}}, -params.x1},
      {"terminal_p_s", 0, {{L.p_s(T), 1.0}}, 0.0},
      {"terminal_p_m", 0, {{L.p_m(T), 1.0}}, 0.0},
      {"terminal_p_r", 0, {{L.p_r(T), 1.0}}, 0.0},
      {"initial_u", 0, {{L.u(0), 1.0}}, 0.0},
      {"initial_u_prime", 0, {{L.u_prime(0), 1.0}}, 0.0},
  };

  if (sys.equation_count() != sys.n_unknowns) {
    throw std::logic_error(fmt::format("stationarity system is not square: {} equations, {} unknowns",
                                       sys.equation_count(), sys.n_unknowns));
  }
  return sys;
}

std::vector<double> stationarity_residuals(const Trajectory& tr, const ModelParams& params) {
  const int T = tr.horizon();
  std::vector<double> r;
  r.reserve(static_cast<std::size_t>(kEquationsPerPeriod * T + 6));
  const auto& n = tr.nesting;
  for (int t = 0; t < T; ++t) {
    const PeriodPoint pt = period_point(tr, t);
    const auto& inv = pt.investment;
    r.push_back(tr.x[t + 1] - state_transition(tr.x[t], inv, params));
    r.push_back(retailer_foc_residual(inv, pt.p_r_next, params));
    r.push_back(
        manufacturer_foc_residual(inv, pt.p_m_next, pt.manufacturer_on_retailer_foc, params));
    r.push_back(supplier_foc_residual(pt, params));
    r.push_back(tr.p_r[t] - costate_step(Player::kRetailer, pt.x, pt.p_r_next, {}, params));
    r.push_back(tr.p_m[t] - costate_step(Player::kManufacturer, pt.x, pt.p_m_next,
                                         {.follower_multiplier = pt.u}, params));
    r.push_back(tr.p_s[t] -
                costate_step(Player::kSupplier, pt.x, pt.p_s_next,
                             {.follower_multiplier = pt.u_prime,
                              .retailer_costate_multiplier = pt.supplier_on_retailer_costate},
                             params));
    r.push_back(tr.u[t + 1] - multiplier_step(MultiplierLevel::kManufacturer, pt.u,
                                              pt.manufacturer_on_retailer_foc, params));
    r.push_back(tr.u_prime[t + 1] -
                multiplier_step(MultiplierLevel::kSupplier, pt.u_prime,
                                pt.supplier_on_manufacturer_foc, params,
                                pt.supplier_on_manufacturer_cross_foc));
    r.push_back(manufacturer_cross_foc_residual(inv, pt.p_m_next, pt.manufacturer_on_retailer_foc,
                                                params));
    r.push_back(supplier_manufacturer_investment_residual(pt, params));
    r.push_back(supplier_retailer_investment_residual(pt, params));
    r.push_back(supplier_follower_weight_residual(pt, params));
    r.push_back(n.supplier_on_retailer_costate[t + 1] -
                multiplier_step(MultiplierLevel::kSupplierOnRetailer,
                                pt.supplier_on_retailer_costate, pt.supplier_on_retailer_foc,
                                params));
    r.push_back(n.supplier_on_manufacturer_multiplier[t] -
                manufacturer_multiplier_costate_step(
                    pt.u_prime, pt.supplier_on_manufacturer_multiplier_next, params));
  }
  r.push_back(tr.x[0] - params.x1);
  r.push_back(tr.p_s[T]);
  r.push_back(tr.p_m[T]);
  r.push_back(tr.p_r[T]);
  r.push_back(tr.u[0]);
  r.push_back(tr.u_prime[0]);
  return r;
}

ResidualNorms residual_norms(const Trajectory& trajectory, const ModelParams& params) {
  const auto r = stationarity_residuals(trajectory, params);
  ResidualNorms norms;
  double sum_sq = 0.0;
  for (double value : r) {
    if (std::isnan(value) || std::isnan(norms.max)) {
      norms.max = std::numeric_limits<double>::quiet_NaN();
    } else {
      norms.max = std::max(norms.max, std::abs(value));
    }
    sum_sq += value * value;
  }
  norms.rms = r.empty() ? 0.0 : std::sqrt(sum_sq / static_cast<double>(r.size()));
  return norms;
}

double residual_norm(const Trajectory& trajectory, const ModelParams& params) {
  return residual_norms(trajectory, params).max;
}

}  // namespace csrgame
