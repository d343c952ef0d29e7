#pragma once

#include "dermkt/domain.hpp"

namespace dermkt {

/// Consumption levels z1 (u'(z1) = lambda) and z2 (u'(z2) = p).
struct ConsumptionThresholds {
  double z1 = 0.0;
  double z2 = 0.0;
};

struct AggregatorOutcome {
  TwoPartPrice price;
  ProsumerResponse response;
  double profit = 0.0;
  bool trade_occurs = false;
};

ConsumptionThresholds consumption_thresholds(const Prosumer& prosumer, double marginal_price,
                                             double lambda);

/// Best response of a prosumer trading directly at the wholesale price.
ProsumerResponse prosumer_direct_response(const Prosumer& prosumer, double lambda);

/// Generator supply at price lambda, clipped to its bounds.
double generator_response(const Generator& generator, double lambda);

/// Participation bound of the prosumer: the largest fee at which selling
/// C - z2 is still weakly preferred to not selling.
double participation_bound(const Prosumer& prosumer, double marginal_price, double z2);

/// Best response of a prosumer to an aggregator's two-part offer. Ties at the
/// participation bound resolve to selling. Throws ArbitrageError if p > lambda.
ProsumerResponse prosumer_agg_response(const Prosumer& prosumer, const TwoPartPrice& price,
                                       double lambda);

/// Profit-maximizing two-part offer: p = lambda and a fee that extracts the
/// prosumer's whole gain from selling. Without trade returns (P = 0, p = lambda).
AggregatorOutcome aggregator_optimal_price(const Prosumer& prosumer, double lambda);

double aggregator_profit(const TwoPartPrice& price, double lambda,
                         const ProsumerResponse& response);

/// Prosumer payoff under a two-part offer. Throws DomainError when the
/// response leaves nothing to consume.
double prosumer_payoff(const Prosumer& prosumer, const ProsumerResponse& response,
                       const TwoPartPrice& price, double lambda);

}  // namespace dermkt
