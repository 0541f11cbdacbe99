#pragma once

#include <string>
#include <vector>

namespace csrgame {

enum class Player { kSupplier, kManufacturer, kRetailer };

std::string to_string(Player player);

/// Scalar parameters of the three-tier chain. All values are constant over
/// the horizon.
struct ModelParams {
  double alpha = 0.0;   ///< CSR-stock carryover per period
  double beta_s = 0.0;  ///< supplier investment-to-CSR conversion
  double beta_m = 0.0;  ///< manufacturer investment-to-CSR conversion
  double beta_r = 0.0;  ///< retailer investment-to-CSR conversion
  double tau = 0.0;     ///< individual post-tax return on investment
  double theta = 0.0;   ///< chain-level post-tax return on investment
  double delta_s = 0.0;
  double delta_m = 0.0;
  double delta_r = 0.0;
  double d = 0.0;      ///< share of manufacturer investment paid to the supplier
  double d_hat = 0.0;  ///< share of retailer investment paid to the manufacturer
  double a = 0.0;      ///< inverse-demand intercept
  double b = 0.0;      ///< inverse-demand slope
  double v = 0.0;      ///< raw-material price
  double z = 0.0;      ///< consumer price
  double c = 0.0;      ///< supplier unit cost
  double x1 = 0.0;     ///< initial CSR stock
  int horizon = 1;     ///< number of decision periods T

  /// Curvature of every player's tax return in its own investment, over two.
  double tax_curvature() const { return tau * theta; }
};

struct ValidationOptions {
  /// Enforce 0 < alpha <= 1. When off, alpha only has to be finite.
  bool strict_alpha = true;
};

/// Every violated invariant, each message naming the field and its bound.
std::vector<std::string> validation_errors(const ModelParams& params,
                                           const ValidationOptions& options = {});

/// Throws ValidationError when validation_errors() is non-empty.
void validate(const ModelParams& params, const ValidationOptions& options = {});

/// One period's CSR investments.
struct Investment {
  double supplier = 0.0;
  double manufacturer = 0.0;
  double retailer = 0.0;

  double total() const { return supplier + manufacturer + retailer; }
  double of(Player player) const;
};

double inverse_demand(double quantity, const ModelParams& params);

/// tau * own * (1 + theta * total).
double tax_return(double own_investment, double total_investment, const ModelParams& params);

double social_benefit(double stock, double coefficient);

double state_transition(double stock, const Investment& investment, const ModelParams& params);

/// Quantity maximizing the manufacturer's margin (a - b q) q - v q, clamped at
/// zero. No quantity term couples to the stock or the investments, so the
/// quantity subgame is static and the result holds for every period.
double optimal_quantity(const ModelParams& params);

double stage_payoff(Player player, double stock, double quantity, const Investment& investment,
                    const ModelParams& params);

}  // namespace csrgame
