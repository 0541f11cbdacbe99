#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "csrgame/errors.hpp"
#include "csrgame/oracle.hpp"
#include "csrgame/stationarity.hpp"
#include "csrgame/sweep.hpp"
#include "test_support.hpp"

namespace csrgame {
namespace {

using testing::max_abs;
using testing::random_params;
using testing::random_trajectory;
using testing::reference_params;

TEST(RetailerFoc, Examples) {
  ModelParams p = reference_params();
  EXPECT_NEAR(retailer_foc_residual({1.0, 1.0, 1.0}, 0.0, p), -0.88, 1e-15);
  p.tau = 1.0;
  p.theta = 0.0;
  EXPECT_DOUBLE_EQ(retailer_foc_residual({3.0, -2.0, 7.0}, 0.0, p), 0.0);
  p.tau = 0.0;
  EXPECT_DOUBLE_EQ(retailer_foc_residual({3.0, -2.0, 7.0}, 2.0, p), p.beta_r * 2.0 - 1.0);
}

TEST(CostateStep, Examples) {
  ModelParams p = reference_params();
  for (Player who : {Player::kSupplier, Player::kManufacturer, Player::kRetailer}) {
    EXPECT_DOUBLE_EQ(costate_step(who, 0.0, 0.0, {}, p), 0.0);
  }
  p.delta_r = 0.5;
  EXPECT_DOUBLE_EQ(costate_step(Player::kRetailer, 1.0, 0.0, {}, p), 1.0);
}

TEST(CostateStep, VanishesWithoutSocialBenefit) {
  ModelParams p = reference_params();
  p.delta_s = p.delta_m = p.delta_r = 0.0;
  double ps = 0.0, pm = 0.0, pr = 0.0;
  for (int t = 0; t < 10; ++t) {
    ps = costate_step(Player::kSupplier, 3.0, ps, {.follower_multiplier = 2.0}, p);
    pm = costate_step(Player::kManufacturer, 3.0, pm, {.follower_multiplier = -1.0}, p);
    pr = costate_step(Player::kRetailer, 3.0, pr, {}, p);
  }
  EXPECT_EQ(ps, 0.0);
  EXPECT_EQ(pm, 0.0);
  EXPECT_EQ(pr, 0.0);
}

TEST(MultiplierStep, Examples) {
  ModelParams p = reference_params();
  EXPECT_DOUBLE_EQ(multiplier_step(MultiplierLevel::kManufacturer, 0.0, 0.0, p), 0.0);
  EXPECT_NEAR(multiplier_step(MultiplierLevel::kManufacturer, 1.0, 0.5, p), 1.0, 1e-15);
  EXPECT_NEAR(multiplier_step(MultiplierLevel::kSupplier, 1.0, 1.0, p, 1.0), 0.9 + 0.3 + 0.2,
              1e-15);
  double u = 0.0;
  for (int t = 0; t < 10; ++t) u = multiplier_step(MultiplierLevel::kManufacturer, u, 0.0, p);
  EXPECT_EQ(u, 0.0);
}

TEST(EliminateControls, SinglePeriodReferenceByHand) {
  // With zero next-period costates the seven conditions reduce to
  //   im + 2 lam = -d_hat/k, is + im + 2 ir = (1-tau)/k, is + 2 im + ir + lam = (1-tau)/k,
  // and the supplier block; worked out by hand for k = tau*theta = 0.005.
  PeriodControls c = eliminate_controls({}, reference_params());
  EXPECT_NEAR(c.investment.supplier, 100.0, 1e-9);
  EXPECT_NEAR(c.investment.manufacturer, 50.0, 1e-9);
  EXPECT_NEAR(c.investment.retailer, 15.0, 1e-9);
  EXPECT_NEAR(c.manufacturer_on_retailer_foc, -35.0, 1e-9);
  EXPECT_NEAR(c.supplier_on_retailer_foc, -15.0, 1e-9);
  EXPECT_NEAR(c.supplier_on_manufacturer_foc, -70.0, 1e-9);
  EXPECT_NEAR(c.supplier_on_manufacturer_cross_foc, 35.0, 1e-9);
}

TEST(EliminateControls, SymmetricCaseFollowsHierarchy) {
  // Identical tax treatment and no transfers: the leader invests twice what
  // the manufacturer does, which invests twice what the retailer does.
  ModelParams p = reference_params();
  p.d = p.d_hat = 0.0;
  PeriodControls c = eliminate_controls({}, p);
  const double k = (1.0 - p.tau) / p.tax_curvature();
  EXPECT_NEAR(c.investment.supplier, k / 2.0, 1e-9);
  EXPECT_NEAR(c.investment.manufacturer, k / 4.0, 1e-9);
  EXPECT_NEAR(c.investment.retailer, k / 8.0, 1e-9);
}

TEST(EliminateControls, MatchesDenseSinglePeriodSolve) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    ModelParams p = random_params(rng, 1);
    PeriodControls c = eliminate_controls({}, p);
    Trajectory dense = dense_solve(p);
    const double scale = std::max(1.0, std::abs(c.investment.supplier));
    EXPECT_NEAR(c.investment.supplier, dense.controls[0].supplier, 1e-9 * scale);
    EXPECT_NEAR(c.investment.manufacturer, dense.controls[0].manufacturer, 1e-9 * scale);
    EXPECT_NEAR(c.investment.retailer, dense.controls[0].retailer, 1e-9 * scale);
  }
}

TEST(EliminateControls, UndeterminedWithoutTaxCurvature) {
  ModelParams p = reference_params();
  p.theta = 0.0;
  try {
    eliminate_controls({}, p);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), SolverError::Kind::kUndeterminedControls);
    EXPECT_NE(std::string(e.what()).find("undetermined"), std::string::npos);
  }
  p = reference_params();
  p.tau = 0.0;
  EXPECT_THROW(eliminate_follower_controls(1.0, 0.0, 0.0, p), SolverError);
}

TEST(EliminateControls, SolutionSatisfiesResidualFunctions) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int k = 0; k < 20; ++k) {
    ModelParams p = random_params(rng, 1);
    NextCostates next{u(rng), u(rng), u(rng), u(rng)};
    PeriodControls c = eliminate_controls(next, p);
    PeriodPoint pt;
    pt.investment = c.investment;
    pt.p_s_next = next.p_s;
    pt.p_m_next = next.p_m;
    pt.p_r_next = next.p_r;
    pt.manufacturer_on_retailer_foc = c.manufacturer_on_retailer_foc;
    pt.supplier_on_retailer_foc = c.supplier_on_retailer_foc;
    pt.supplier_on_manufacturer_foc = c.supplier_on_manufacturer_foc;
    pt.supplier_on_manufacturer_cross_foc = c.supplier_on_manufacturer_cross_foc;
    pt.supplier_on_manufacturer_multiplier_next = next.manufacturer_multiplier;
    EXPECT_NEAR(retailer_foc_residual(pt.investment, pt.p_r_next, p), 0.0, 1e-10);
    EXPECT_NEAR(manufacturer_foc_residual(pt.investment, pt.p_m_next,
                                          pt.manufacturer_on_retailer_foc, p),
                0.0, 1e-10);
    EXPECT_NEAR(manufacturer_cross_foc_residual(pt.investment, pt.p_m_next,
                                                pt.manufacturer_on_retailer_foc, p),
                0.0, 1e-10);
    EXPECT_NEAR(supplier_foc_residual(pt, p), 0.0, 1e-10);
    EXPECT_NEAR(supplier_manufacturer_investment_residual(pt, p), 0.0, 1e-10);
    EXPECT_NEAR(supplier_retailer_investment_residual(pt, p), 0.0, 1e-10);
    EXPECT_NEAR(supplier_follower_weight_residual(pt, p), 0.0, 1e-10);

    PeriodControls f = eliminate_follower_controls(c.investment.supplier, next.p_m, next.p_r, p);
    EXPECT_NEAR(f.investment.manufacturer, c.investment.manufacturer, 1e-9);
    EXPECT_NEAR(f.investment.retailer, c.investment.retailer, 1e-9);
    EXPECT_NEAR(f.manufacturer_on_retailer_foc, c.manufacturer_on_retailer_foc, 1e-9);
  }
}

TEST(StackedControlMatrix, ScalesWithTaxCurvatureAndIsInvertible) {
  ModelParams p = reference_params();
  auto m = stacked_control_matrix(p);
  const double k = p.tax_curvature();
  EXPECT_NEAR(m.determinant(), -8.0 * std::pow(k, 7), 1e-6 * std::pow(k, 7));
  for (int i = 0; i < 7; ++i) {
    for (int j = 0; j < 7; ++j) {
      const double ratio = m(i, j) / k;
      EXPECT_NEAR(ratio, std::round(ratio), 1e-12);
    }
  }
}

TEST(AssembleSystem, CountsAndLabels) {
  ModelParams p = reference_params(1);
  StationaritySystem sys = assemble_system(p);
  EXPECT_EQ(sys.n_unknowns, kEquationsPerPeriod + 6);
  EXPECT_EQ(sys.equation_count(), sys.n_unknowns);
  ASSERT_EQ(sys.coefficient_blocks.size(), 1u);
  EXPECT_EQ(sys.coefficient_blocks[0].size(), static_cast<std::size_t>(kEquationsPerPeriod));
  ASSERT_EQ(sys.boundary_rows.size(), 6u);
  std::set<std::string> labels;
  for (const auto& row : sys.boundary_rows) labels.insert(row.label);
  EXPECT_EQ(labels.size(), 6u);

  for (int T : {2, 3, 7}) {
    StationaritySystem s = assemble_system(reference_params(T));
    EXPECT_EQ(s.n_unknowns, kEquationsPerPeriod * T + 6);
    EXPECT_EQ(s.equation_count(), s.n_unknowns);
    EXPECT_TRUE(s.dense_matrix().allFinite());
    EXPECT_EQ(s.dense_matrix().rows(), s.dense_matrix().cols());
  }
}

TEST(AssembleSystem, DroppingABoundaryRowBreaksSquareness) {
  StationaritySystem sys = assemble_system(reference_params(2));
  sys.boundary_rows.pop_back();
  EXPECT_NE(sys.equation_count(), sys.n_unknowns);
}

TEST(AssembleSystem, RowsAgreeWithResidualFunctions) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 20; ++k) {
    const int T = 1 + k % 4;
    ModelParams p = random_params(rng, T);
    StationaritySystem sys = assemble_system(p);
    Trajectory tr = random_trajectory(rng, T, 5.0);
    const Eigen::VectorXd z = sys.layout.pack(tr);
    const Eigen::VectorXd assembled = sys.dense_matrix() * z - sys.dense_rhs();
    const std::vector<double> direct = stationarity_residuals(tr, p);
    ASSERT_EQ(static_cast<std::size_t>(assembled.size()), direct.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
      EXPECT_NEAR(assembled[static_cast<Eigen::Index>(i)], direct[i], 1e-12) << "row " << i;
    }
  }
}

TEST(UnknownLayout, PackUnpackRoundTrip) {
  std::mt19937_64 rng(19);
  Trajectory tr = random_trajectory(rng, 4);
  UnknownLayout layout(4);
  Eigen::VectorXd z = layout.pack(tr);
  EXPECT_EQ(z.size(), layout.size());
  Eigen::VectorXd again = layout.pack(layout.unpack(z));
  EXPECT_EQ((z - again).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Residuals, AffineInTrajectory) {
  std::mt19937_64 rng(23);
  ModelParams p = reference_params(3);
  Trajectory a = random_trajectory(rng, 3), b = random_trajectory(rng, 3);
  const double w = 0.3;
  UnknownLayout layout(3);
  Trajectory mix = layout.unpack(w * layout.pack(a) + (1.0 - w) * layout.pack(b));
  auto ra = stationarity_residuals(a, p), rb = stationarity_residuals(b, p),
       rm = stationarity_residuals(mix, p);
  for (std::size_t i = 0; i < rm.size(); ++i) {
    EXPECT_NEAR(rm[i], w * ra[i] + (1.0 - w) * rb[i], 1e-12);
  }
}

TEST(ResidualNorm, VanishesAtSolutionAndDetectsPerturbation) {
  ModelParams p = reference_params();
  Trajectory tr = dense_solve(p);
  EXPECT_LE(residual_norm(tr, p), 1e-9);
  tr.controls[1].retailer += 0.1;
  EXPECT_GE(residual_norm(tr, p), p.tax_curvature() * 0.1);
}

TEST(ResidualNorm, ZeroTrajectoryIsAFixedPoint) {
  ModelParams p = reference_params();
  p.tau = 1.0;
  p.delta_s = p.delta_m = p.delta_r = 0.0;
  p.d = p.d_hat = 0.0;
  p.x1 = 0.0;
  Trajectory tr = Trajectory::zeros(3);
  EXPECT_EQ(residual_norm(tr, p), 0.0);
}

TEST(ResidualNorm, PropagatesNaN) {
  ModelParams p = reference_params();
  Trajectory tr = dense_solve(p);
  tr.x[2] = std::nan("");
  EXPECT_TRUE(std::isnan(residual_norm(tr, p)));
}

TEST(HamiltonianGradients, MatchCodedConditions) {
  std::mt19937_64 rng(29);
  for (int k = 0; k < 20; ++k) {
    ModelParams p = random_params(rng, 2);
    Trajectory tr = random_trajectory(rng, 2, 3.0);
    for (const auto& check : hamiltonian_gradient_checks(period_point(tr, 1), 4.0, p)) {
      EXPECT_LT(check.relative_error(), 1e-6) << check.name;
    }
  }
}

TEST(HamiltonianCurvature, OwnInvestmentSecondDerivativeIsTwiceTaxCurvature) {
  ModelParams p = reference_params();
  PeriodPoint pt;
  pt.investment = {1.0, 2.0, 3.0};
  const double h = 0.5;
  auto h_r = [&](double ir) {
    PeriodPoint q = pt;
    q.investment.retailer = ir;
    return retailer_hamiltonian(q, 4.0, p);
  };
  const double second = (h_r(3.0 + h) - 2.0 * h_r(3.0) + h_r(3.0 - h)) / (h * h);
  EXPECT_NEAR(second, 2.0 * p.tax_curvature(), 1e-10);
  EXPECT_TRUE(solve_game(p).report.convexity_warning);
}

}  // namespace
}  // namespace csrgame
