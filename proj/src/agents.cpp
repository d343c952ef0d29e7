#include "dermkt/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dermkt {

namespace {

void require_positive_price(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("wholesale price must be positive and finite");
  }
}

}  // namespace

ConsumptionThresholds consumption_thresholds(const Prosumer& prosumer, double marginal_price,
                                             double lambda) {
  require_positive_price(lambda);
  if (marginal_price < 0.0) throw DomainError("marginal price must be ≥ 0");
  ConsumptionThresholds t;
  t.z1 = u_inverse_marginal(prosumer.utility, lambda);
  // Marginal utility never reaches zero, so p = 0 puts z2 at infinity.
  t.z2 = marginal_price > 0.0 ? u_inverse_marginal(prosumer.utility, marginal_price)
                              : std::numeric_limits<double>::infinity();
  return t;
}

ProsumerResponse prosumer_direct_response(const Prosumer& prosumer, double lambda) {
  require_positive_price(lambda);
  const double z = std::min(u_inverse_marginal(prosumer.utility, lambda), prosumer.consumption_cap);
  const double net = prosumer.capacity - z;
  return ProsumerResponse{std::max(net, 0.0), std::max(-net, 0.0)};
}

double generator_response(const Generator& generator, double lambda) {
  const CostSpec& c = generator.cost;
  return std::clamp(c_inverse_marginal(c, lambda), c.y_min, c.y_max);
}

double participation_bound(const Prosumer& prosumer, double marginal_price, double z2) {
  return marginal_price * (prosumer.capacity - z2) + u_value(prosumer.utility, z2) -
         u_value(prosumer.utility, prosumer.capacity);
}

ProsumerResponse prosumer_agg_response(const Prosumer& prosumer, const TwoPartPrice& price,
                                       double lambda) {
  require_positive_price(lambda);
  if (price.participation_fee < 0.0) throw DomainError("participation fee must be ≥ 0");
  if (price.marginal_price > lambda) {
    throw ArbitrageError("marginal price above the wholesale price: prosumer can arbitrage");
  }
  const auto [z1, z2] = consumption_thresholds(prosumer, price.marginal_price, lambda);
  const double c = prosumer.capacity;
  if (c <= z2) {
    return ProsumerResponse{0.0, std::max(std::min(z1, prosumer.consumption_cap) - c, 0.0)};
  }
  const bool participates =
      price.participation_fee <= participation_bound(prosumer, price.marginal_price, z2);
  return ProsumerResponse{participates ? c - z2 : 0.0, 0.0};
}

AggregatorOutcome aggregator_optimal_price(const Prosumer& prosumer, double lambda) {
  require_positive_price(lambda);
  AggregatorOutcome out;
  const double z1 = u_inverse_marginal(prosumer.utility, lambda);
  if (z1 >= prosumer.capacity) {
    out.price = TwoPartPrice{0.0, lambda};
    out.response = prosumer_agg_response(prosumer, out.price, lambda);
    return out;
  }
  // Same expression the prosumer tests against, so the tie resolves to selling.
  out.price = TwoPartPrice{std::max(participation_bound(prosumer, lambda, z1), 0.0), lambda};
  out.response = prosumer_agg_response(prosumer, out.price, lambda);
  out.profit = aggregator_profit(out.price, lambda, out.response);
  out.trade_occurs = out.response.sell > 0.0;
  return out;
}

double aggregator_profit(const TwoPartPrice& price, double lambda,
                         const ProsumerResponse& response) {
  const double fee = response.sell > 0.0 ? price.participation_fee : 0.0;
  return fee + (lambda - price.marginal_price) * response.sell;
}

double prosumer_payoff(const Prosumer& prosumer, const ProsumerResponse& response,
                       const TwoPartPrice& price, double lambda) {
  const double consumption = response.buy + prosumer.capacity - response.sell;
  if (!(consumption > 0.0)) throw DomainError("response leaves no consumption");
  const double base = u_value(prosumer.utility, consumption) - lambda * response.buy;
  if (response.sell > 0.0) {
    return base + price.marginal_price * response.sell - price.participation_fee;
  }
  return base;
}

}  // namespace dermkt
