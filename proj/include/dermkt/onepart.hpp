#pragma once

#include <optional>
#include <vector>

#include "dermkt/dispatch.hpp"

namespace dermkt {

struct OnePartEquilibrium {
  double marginal_price = 0.0;  // p*, equals lambda without trade
  double sell = 0.0;            // x*(p*)
  double aggregator_profit = 0.0;
  double wholesale_price = 0.0;
  bool trade_occurs = false;
};

struct WelfareDecomposition {
  double prosumer_surplus = 0.0;
  double aggregator_surplus = 0.0;
  double generator_surplus = 0.0;
  double merchandising_surplus = 0.0;
  double total = 0.0;
};

enum class PoagNormalization { opportunity_cost, literal_negative_welfare };

struct PoagResult {
  double cost_onepart = 0.0;
  double cost_efficient = 0.0;
  double poag = 1.0;
  PoagNormalization normalization = PoagNormalization::opportunity_cost;
};

struct OnePartDispatch {
  DispatchSolution solution;  // model == Model::one_part
  double cost = 0.0;          // c(y) + integral of the induced inverse supply
  OnePartEquilibrium equilibrium;
};

/// Root of (1 - eta) p + eta C p^(1 + 1/eta) = lambda by bisection on
/// [C^-eta, lambda]. Requires C > lambda^(-1/eta).
double one_part_fixed_point(double capacity, double eta, double lambda);

/// Aggregator's optimal one-part price. Uses sqrt(lambda / C) at eta = 1.
OnePartEquilibrium one_part_price(double capacity, double eta, double lambda);

/// Wholesale price at which the one-part equilibrium sells x.
double induced_inverse_supply(double x, double capacity, double eta);

/// Integral of the induced inverse supply over [0, x].
double induced_cost(double x, double capacity, double eta);

/// Single-node dispatch with the prosumer priced by its induced supply curve.
/// The prosumer's own purchases are not part of this program.
OnePartDispatch solve_one_part(const Scenario& scenario, const SolverOptions& options = {});

/// Realized welfare of the one-part market. When the aggregator buys nothing
/// the prosumer still trades at the wholesale price, which is the no-DER outcome.
double one_part_welfare(const Scenario& scenario, const OnePartDispatch& dispatch,
                        const SolverOptions& options = {});

/// Prices at the efficient Stackelberg equilibrium for every prosumer.
std::vector<TwoPartPrice> two_part_prices(const Scenario& scenario,
                                          const DispatchSolution& solution);

WelfareDecomposition welfare_decomposition(
    const DispatchSolution& solution, const Scenario& scenario, Model model,
    const std::optional<std::vector<TwoPartPrice>>& prices = std::nullopt);

PoagResult poag(const Scenario& scenario, const SolverOptions& options = {},
                PoagNormalization normalization = PoagNormalization::opportunity_cost);

}  // namespace dermkt
