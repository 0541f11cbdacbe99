#include "csrgame/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "csrgame/errors.hpp"

namespace csrgame {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr int kOuterDim = 4;
constexpr int kInnerDim = 2;
constexpr int kOuterStatics = 7;
constexpr int kInnerStatics = 3;

VectorXd outer_statics(const PeriodControls& c) {
  VectorXd w(kOuterStatics);
  w << c.investment.supplier, c.investment.manufacturer, c.investment.retailer,
      c.manufacturer_on_retailer_foc, c.supplier_on_retailer_foc, c.supplier_on_manufacturer_foc,
      c.supplier_on_manufacturer_cross_foc;
  return w;
}

VectorXd inner_statics(const PeriodControls& c) {
  VectorXd w(kInnerStatics);
  w << c.investment.manufacturer, c.investment.retailer, c.manufacturer_on_retailer_foc;
  return w;
}

// The eliminated statics are affine in the next-period costates, so probing
// the elimination with unit costates recovers gain and offset exactly.
PeriodControls eliminate_outer(const VectorXd& next, const ModelParams& params) {
  return eliminate_controls({.p_s = next(0), .p_m = next(1), .p_r = next(2),
                             .manufacturer_multiplier = next(3)},
                            params);
}

AugmentedSystem assemble_outer(const ModelParams& params) {
  const int T = params.horizon;
  AugmentedSystem aug;
  aug.level = GameLevel::kOuter;
  aug.horizon = T;

  const VectorXd offset = outer_statics(eliminate_outer(VectorXd::Zero(kOuterDim), params));
  MatrixXd gain(kOuterStatics, kOuterDim);
  for (int j = 0; j < kOuterDim; ++j) {
    gain.col(j) = outer_statics(eliminate_outer(VectorXd::Unit(kOuterDim, j), params)) - offset;
  }

  // Rows: x, u, supplier multiplier on the retailer costate, u'.
  MatrixXd input = MatrixXd::Zero(kOuterDim, kOuterStatics);
  input(0, 0) = params.beta_s;
  input(0, 1) = params.beta_m;
  input(0, 2) = params.beta_r;
  input(1, 3) = params.beta_r;
  input(2, 4) = params.beta_r;
  input(3, 5) = params.beta_m;
  input(3, 6) = params.beta_r;

  // Rows: p_s, p_m, p_r, supplier costate on u.
  MatrixXd coupling = MatrixXd::Zero(kOuterDim, kOuterDim);
  coupling(0, 0) = 2 * params.delta_s;
  coupling(0, 2) = 2 * params.delta_r;
  coupling(0, 3) = 2 * params.delta_m;
  coupling(1, 0) = 2 * params.delta_m;
  coupling(1, 1) = 2 * params.delta_r;
  coupling(2, 0) = 2 * params.delta_r;
  coupling(3, 3) = 2 * params.delta_r;

  aug.block_A = params.alpha * MatrixXd::Identity(kOuterDim, kOuterDim);
  aug.block_B = input * gain;
  aug.block_C = coupling;
  aug.block_D22 = params.alpha * MatrixXd::Identity(kOuterDim, kOuterDim);
  aug.affine_f.assign(T, input * offset);
  aug.affine_e.assign(T, VectorXd::Zero(kOuterDim));
  aug.static_gain = gain;
  aug.static_offset.assign(T, offset);
  aug.initial_state = VectorXd::Zero(kOuterDim);
  aug.initial_state(0) = params.x1;
  return aug;
}

AugmentedSystem assemble_inner(const ModelParams& params, const std::vector<double>& supplier) {
  const int T = params.horizon;
  if (static_cast<int>(supplier.size()) != T) {
    throw std::invalid_argument(fmt::format(
        "inner level needs one supplier investment per period ({} given, {} periods)",
        supplier.size(), T));
  }
  AugmentedSystem aug;
  aug.level = GameLevel::kInner;
  aug.horizon = T;
  aug.supplier_investment = supplier;

  auto statics = [&](double is, double p_m, double p_r) {
    return inner_statics(eliminate_follower_controls(is, p_m, p_r, params));
  };
  const VectorXd base = statics(0.0, 0.0, 0.0);
  MatrixXd gain(kInnerStatics, kInnerDim);
  gain.col(0) = statics(0.0, 1.0, 0.0) - base;
  gain.col(1) = statics(0.0, 0.0, 1.0) - base;

  // Rows: x, u.
  MatrixXd input = MatrixXd::Zero(kInnerDim, kInnerStatics);
  input(0, 0) = params.beta_m;
  input(0, 1) = params.beta_r;
  input(1, 2) = params.beta_r;

  MatrixXd coupling(kInnerDim, kInnerDim);
  coupling << 2 * params.delta_m, 2 * params.delta_r, 2 * params.delta_r, 0.0;

  aug.block_A = params.alpha * MatrixXd::Identity(kInnerDim, kInnerDim);
  aug.block_B = input * gain;
  aug.block_C = coupling;
  aug.block_D22 = params.alpha * MatrixXd::Identity(kInnerDim, kInnerDim);
  aug.static_gain = gain;
  for (int t = 0; t < T; ++t) {
    const VectorXd offset = statics(supplier[t], 0.0, 0.0);
    VectorXd f = input * offset;
    f(0) += params.beta_s * supplier[t];
    aug.static_offset.push_back(offset);
    aug.affine_f.push_back(f);
    aug.affine_e.push_back(VectorXd::Zero(kInnerDim));
  }
  aug.initial_state = VectorXd::Zero(kInnerDim);
  aug.initial_state(0) = params.x1;
  return aug;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace

AugmentedSystem assemble_augmented(const ModelParams& params) { return assemble_outer(params); }

AugmentedSystem assemble_augmented(const ModelParams& params, GameLevel level,
                                   const std::vector<double>& supplier_investment) {
  return level == GameLevel::kOuter ? assemble_outer(params)
                                    : assemble_inner(params, supplier_investment);
}

SweepCoefficients backward_sweep(const AugmentedSystem& aug, const ModelParams& /*params*/) {
  const int T = aug.horizon;
  const int n = aug.dimension();
  const MatrixXd identity = MatrixXd::Identity(n, n);
  SweepCoefficients sweep;
  sweep.gain.assign(T + 1, MatrixXd::Zero(n, n));
  sweep.offset.assign(T + 1, VectorXd::Zero(n));

  for (int t = T - 1; t >= 0; --t) {
    const MatrixXd& next_gain = sweep.gain[t + 1];
    const VectorXd& next_offset = sweep.offset[t + 1];
    // state(t+1) = (I - B S(t+1))^-1 (A state(t) + B s(t+1) + f(t))
    Eigen::FullPivLU<MatrixXd> step(identity - aug.block_B * next_gain);
    if (!step.isInvertible() || step.rcond() < 1e-14) {
      throw SolverError(SolverError::Kind::kSingularSweepStep,
                        fmt::format("sweep step matrix singular at t = {} (rcond = {:.3e})", t + 1,
                                    step.rcond()),
                        t + 1);
    }
    const MatrixXd propagate = step.solve(aug.block_A);
    const VectorXd drift = step.solve(aug.block_B * next_offset + aug.affine_f[t]);
    sweep.gain[t] = aug.block_C + aug.block_D22 * next_gain * propagate;
    sweep.offset[t] = aug.block_D22 * (next_gain * drift + next_offset) + aug.affine_e[t];
  }
  return sweep;
}

Trajectory forward_pass(const SweepCoefficients& sweep, const AugmentedSystem& aug,
                        const ModelParams& params) {
  const int T = aug.horizon;
  const int n = aug.dimension();
  const MatrixXd identity = MatrixXd::Identity(n, n);

  std::vector<VectorXd> state(T + 1), costate(T + 1), statics(T);
  state[0] = aug.initial_state;
  for (int t = 0; t < T; ++t) {
    Eigen::FullPivLU<MatrixXd> step(identity - aug.block_B * sweep.gain[t + 1]);
    state[t + 1] = step.solve(aug.block_A * state[t] + aug.block_B * sweep.offset[t + 1] +
                              aug.affine_f[t]);
    costate[t + 1] = sweep.gain[t + 1] * state[t + 1] + sweep.offset[t + 1];
    statics[t] = aug.static_gain * costate[t + 1] + aug.static_offset[t];
  }
  costate[0] = sweep.gain[0] * state[0] + sweep.offset[0];

  Trajectory tr = Trajectory::zeros(T);
  const double quantity = optimal_quantity(params);
  auto& nest = tr.nesting;
  for (int t = 0; t <= T; ++t) {
    tr.x[t] = state[t](0);
    tr.u[t] = state[t](1);
    if (aug.level == GameLevel::kOuter) {
      nest.supplier_on_retailer_costate[t] = state[t](2);
      tr.u_prime[t] = state[t](3);
      tr.p_s[t] = costate[t](0);
      tr.p_m[t] = costate[t](1);
      tr.p_r[t] = costate[t](2);
      nest.supplier_on_manufacturer_multiplier[t] = costate[t](3);
    } else {
      tr.p_m[t] = costate[t](0);
      tr.p_r[t] = costate[t](1);
    }
  }
  for (int t = 0; t < T; ++t) {
    const VectorXd& w = statics[t];
    tr.q[t] = quantity;
    if (aug.level == GameLevel::kOuter) {
      tr.controls[t] = {w(0), w(1), w(2)};
      nest.manufacturer_on_retailer_foc[t] = w(3);
      nest.supplier_on_retailer_foc[t] = w(4);
      nest.supplier_on_manufacturer_foc[t] = w(5);
      nest.supplier_on_manufacturer_cross_foc[t] = w(6);
    } else {
      tr.controls[t] = {aug.supplier_investment[t], w(0), w(1)};
      nest.manufacturer_on_retailer_foc[t] = w(2);
    }
  }
  return tr;
}

Trajectory solve_followers(const ModelParams& params, const std::vector<double>& supplier_investment) {
  const AugmentedSystem aug = assemble_augmented(params, GameLevel::kInner, supplier_investment);
  return forward_pass(backward_sweep(aug, params), aug, params);
}

SolveResult solve_game(const ModelParams& params, const ValidationOptions& validation) {
  validate(params, validation);
  const auto start = std::chrono::steady_clock::now();

  const AugmentedSystem aug = assemble_augmented(params);
  Trajectory tr = forward_pass(backward_sweep(aug, params), aug, params);

  std::vector<double> supplier_path, manufacturer_path, retailer_path;
  for (const auto& c : tr.controls) {
    supplier_path.push_back(c.supplier);
    manufacturer_path.push_back(c.manufacturer);
    retailer_path.push_back(c.retailer);
  }
  const Trajectory inner = solve_followers(params, supplier_path);
  std::vector<double> inner_manufacturer, inner_retailer;
  for (const auto& c : inner.controls) {
    inner_manufacturer.push_back(c.manufacturer);
    inner_retailer.push_back(c.retailer);
  }

  SolveReport report;
  report.horizon = params.horizon;
  report.quantity = optimal_quantity(params);
  report.inner_level_delta = std::max(
      {max_abs_diff(tr.x, inner.x), max_abs_diff(tr.u, inner.u), max_abs_diff(tr.p_m, inner.p_m),
       max_abs_diff(tr.p_r, inner.p_r), max_abs_diff(manufacturer_path, inner_manufacturer),
       max_abs_diff(retailer_path, inner_retailer),
       max_abs_diff(tr.nesting.manufacturer_on_retailer_foc,
                    inner.nesting.manufacturer_on_retailer_foc)});
  const ResidualNorms norms = residual_norms(tr, params);
  report.residual_max = norms.max;
  report.residual_rms = norms.rms;
  report.objective_supplier = total_objective(Player::kSupplier, tr, params);
  report.objective_manufacturer = total_objective(Player::kManufacturer, tr, params);
  report.objective_retailer = total_objective(Player::kRetailer, tr, params);
  report.convexity_warning = params.tax_curvature() > 0.0;
  report.negative_investment_warning =
      std::any_of(tr.controls.begin(), tr.controls.end(), [](const Investment& i) {
        return i.supplier < 0.0 || i.manufacturer < 0.0 || i.retailer < 0.0;
      });
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(tr), std::move(report)};
}

}  // namespace csrgame
