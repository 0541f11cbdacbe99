#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "csrgame/model.hpp"
#include "csrgame/trajectory.hpp"

namespace csrgame::testing {

inline ModelParams reference_params(int horizon = 3) {
  ModelParams p;
  p.alpha = 0.9;
  p.beta_s = 0.3;
  p.beta_m = 0.3;
  p.beta_r = 0.2;
  p.tau = 0.1;
  p.theta = 0.05;
  p.delta_s = 0.01;
  p.delta_m = 0.02;
  p.delta_r = 0.03;
  p.d = 0.1;
  p.d_hat = 0.1;
  p.a = 10.0;
  p.b = 1.0;
  p.v = 2.0;
  p.z = 12.0;
  p.c = 1.0;
  p.x1 = 1.0;
  p.horizon = horizon;
  return p;
}

/// Draws parameters inside the admissible region with moderate tax
/// curvature, so equilibrium magnitudes stay O(1..100).
inline ModelParams random_params(std::mt19937_64& rng, int horizon) {
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  ModelParams p;
  p.alpha = uniform(0.3, 1.0);
  p.beta_s = uniform(0.05, 0.95);
  p.beta_m = uniform(0.05, 0.95);
  p.beta_r = uniform(0.05, 0.95);
  p.tau = uniform(0.2, 0.9);
  p.theta = uniform(0.2, 1.0);
  p.delta_s = uniform(0.0, 0.05);
  p.delta_m = uniform(0.0, 0.05);
  p.delta_r = uniform(0.0, 0.05);
  p.d = uniform(0.0, 0.5);
  p.d_hat = uniform(0.0, 0.5);
  p.a = uniform(5.0, 20.0);
  p.b = uniform(0.5, 2.0);
  p.v = uniform(0.5, 4.0);
  p.z = p.a + uniform(0.0, 5.0);
  p.c = uniform(0.0, p.v);
  p.x1 = uniform(0.0, 5.0);
  p.horizon = horizon;
  return p;
}

/// Trajectory of the right shape with every stored entry drawn from
/// [-scale, scale]. Not an equilibrium and not state-consistent.
inline Trajectory random_trajectory(std::mt19937_64& rng, int horizon, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Trajectory tr = Trajectory::zeros(horizon);
  auto fill = [&](std::vector<double>& v) {
    for (double& e : v) e = u(rng);
  };
  fill(tr.x);
  fill(tr.q);
  fill(tr.p_s);
  fill(tr.p_m);
  fill(tr.p_r);
  fill(tr.u);
  fill(tr.u_prime);
  for (auto& c : tr.controls) c = {u(rng), u(rng), u(rng)};
  auto& n = tr.nesting;
  fill(n.manufacturer_on_retailer_foc);
  fill(n.supplier_on_retailer_foc);
  fill(n.supplier_on_manufacturer_foc);
  fill(n.supplier_on_manufacturer_cross_foc);
  fill(n.supplier_on_retailer_costate);
  fill(n.supplier_on_manufacturer_multiplier);
  // Entries the layout folds into the recursions.
  n.supplier_on_retailer_costate[0] = 0.0;
  n.supplier_on_manufacturer_multiplier[static_cast<std::size_t>(horizon)] = 0.0;
  return tr;
}

inline double max_abs(const std::vector<double>& values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace csrgame::testing
