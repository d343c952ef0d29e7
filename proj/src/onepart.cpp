#include "dermkt/onepart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dermkt/agents.hpp"
#include "dermkt/errors.hpp"
#include "dermkt/roots.hpp"

namespace dermkt {

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                    double fm, double fb, double whole, double tolerance, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tolerance) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tolerance, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tolerance, depth - 1);
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive");
}

double eta_of(const Prosumer& p) {
  return std::visit([](const Isoelastic<double>& u) { return u.eta; }, p.utility);
}

// Aggregator sales at wholesale price lambda under one-part pricing.
double one_part_sales(double capacity, double eta, double lambda) {
  if (capacity <= std::pow(lambda, -1.0 / eta)) return 0.0;
  const double p = one_part_fixed_point(capacity, eta, lambda);
  return std::max(capacity - std::pow(p, -1.0 / eta), 0.0);
}

void require_single_node(const Scenario& s) {
  if (s.network.node_count() != 1 || s.prosumers.size() != 1 || s.generators.size() != 1) {
    throw ConfigurationError(
        "one-part pricing needs a single node with one prosumer and one generator");
  }
  if (!(s.fixed_demand(0) > 0.0)) {
    throw ConfigurationError("one-part pricing needs a positive fixed demand");
  }
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tolerance, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tolerance, max_depth);
}

double one_part_fixed_point(double capacity, double eta, double lambda) {
  require_positive(capacity, "capacity");
  require_positive(eta, "eta");
  require_positive(lambda, "wholesale price");
  const double lo = std::pow(capacity, -eta);
  if (!(lo < lambda)) throw DomainError("no trade: capacity does not exceed lambda^(-1/eta)");
  const auto f = [&](double p) {
    return (1.0 - eta) * p + eta * capacity * std::pow(p, 1.0 + 1.0 / eta) - lambda;
  };
  return bisect_increasing(f, lo, lambda, 1e-14 * (1.0 + lambda));
}

OnePartEquilibrium one_part_price(double capacity, double eta, double lambda) {
  require_positive(capacity, "capacity");
  require_positive(eta, "eta");
  require_positive(lambda, "wholesale price");
  OnePartEquilibrium eq;
  eq.wholesale_price = lambda;
  if (capacity <= std::pow(lambda, -1.0 / eta)) {
    eq.marginal_price = lambda;
    return eq;
  }
  eq.marginal_price =
      eta == 1.0 ? std::sqrt(lambda / capacity) : one_part_fixed_point(capacity, eta, lambda);
  eq.sell = capacity - std::pow(eq.marginal_price, -1.0 / eta);
  eq.aggregator_profit = (lambda - eq.marginal_price) * eq.sell;
  eq.trade_occurs = eq.sell > 0.0;
  return eq;
}

double induced_inverse_supply(double x, double capacity, double eta) {
  require_positive(capacity, "capacity");
  require_positive(eta, "eta");
  if (x < 0.0 || x >= capacity) throw DomainError("induced supply needs 0 <= x < C");
  if (eta == 1.0) return capacity / ((capacity - x) * (capacity - x));
  // Sales are zero up to lambda = C^-eta and increase from there.
  const double lo = std::pow(capacity, -eta);
  if (x == 0.0) return lo;
  double hi = 2.0 * lo;
  while (one_part_sales(capacity, eta, hi) < x) hi *= 2.0;
  return bisect_increasing([&](double lambda) { return one_part_sales(capacity, eta, lambda) - x; },
                           lo, hi, 1e-13 * (1.0 + hi));
}

double induced_cost(double x, double capacity, double eta) {
  if (x == 0.0) return 0.0;
  if (eta == 1.0) {
    if (x < 0.0 || x >= capacity) throw DomainError("induced cost needs 0 <= x < C");
    return x / (capacity - x);
  }
  return adaptive_simpson([&](double t) { return induced_inverse_supply(t, capacity, eta); }, 0.0,
                          x, 1e-10);
}

OnePartDispatch solve_one_part(const Scenario& scenario, const SolverOptions& options) {
  require_single_node(scenario);
  const Prosumer& pro = scenario.prosumers.front();
  const Generator& gen = scenario.generators.front();
  const double demand = scenario.fixed_demand(0);
  const double c = pro.capacity;
  const double eta = eta_of(pro);

  const double lo = std::max(0.0, demand - gen.cost.y_max);
  const double hi = std::min({c, demand, demand - gen.cost.y_min});
  if (lo > hi) throw InfeasibleError("one-part dispatch infeasible: demand outside generator range");

  double x = lo;
  if (c > 0.0 && lo < hi) {
    // Marginal induced cost minus generator marginal cost, increasing in x.
    const auto slope = [&](double s) {
      return induced_inverse_supply(s, c, eta) - c_marginal(gen.cost, demand - s);
    };
    const double top = std::min(hi, std::nextafter(c, 0.0));
    if (slope(lo) >= 0.0) {
      x = lo;
    } else if (slope(top) <= 0.0) {
      x = top;
    } else {
      x = bisect_increasing(slope, lo, top, std::min(1e-10, options.tol) * (1.0 + demand));
    }
  }

  OnePartDispatch out;
  const double y = demand - x;
  out.cost = c_value(gen.cost, y) + (x > 0.0 ? induced_cost(x, c, eta) : 0.0);
  const double lambda = c_marginal(gen.cost, y);
  out.equilibrium = c > 0.0 && lambda > 0.0 ? one_part_price(c, eta, lambda) : OnePartEquilibrium{};
  out.equilibrium.wholesale_price = lambda;

  DispatchSolution& s = out.solution;
  s.model = Model::one_part;
  s.sell = Eigen::VectorXd::Constant(1, x);
  s.buy = Eigen::VectorXd::Zero(1);
  s.generation = Eigen::VectorXd::Constant(1, y);
  s.net_injection = nodal_net_injection(scenario, s.sell, s.buy, s.generation);
  s.nodal_price = Eigen::VectorXd::Constant(1, lambda);
  s.line_multiplier = Eigen::VectorXd(0);
  s.balance_residual = std::abs(s.net_injection(0));
  s.welfare = c - x > 0.0 ? social_welfare(scenario, s.sell, s.buy, s.generation)
                          : -std::numeric_limits<double>::infinity();
  return out;
}

double one_part_welfare(const Scenario& scenario, const OnePartDispatch& dispatch,
                        const SolverOptions& options) {
  if (dispatch.solution.sell(0) > 0.0) return dispatch.solution.welfare;
  return solve_no_der(scenario, options).welfare;
}

std::vector<TwoPartPrice> two_part_prices(const Scenario& scenario,
                                          const DispatchSolution& solution) {
  std::vector<TwoPartPrice> prices;
  prices.reserve(scenario.prosumers.size());
  for (const Prosumer& p : scenario.prosumers) {
    const double lambda = solution.nodal_price(p.node);
    prices.push_back(lambda > 0.0 ? aggregator_optimal_price(p, lambda).price
                                  : TwoPartPrice{0.0, 0.0});
  }
  return prices;
}

WelfareDecomposition welfare_decomposition(const DispatchSolution& solution,
                                           const Scenario& scenario, Model model,
                                           const std::optional<std::vector<TwoPartPrice>>& prices) {
  const Eigen::VectorXd& lambda = solution.nodal_price;
  WelfareDecomposition w;

  std::vector<TwoPartPrice> offer;
  if (model == Model::aggregation) {
    offer = prices ? *prices : two_part_prices(scenario, solution);
  } else if (model == Model::one_part) {
    if (prices) {
      offer = *prices;
    } else {
      for (const Prosumer& p : scenario.prosumers) {
        const double l = lambda(p.node);
        const bool priced = p.capacity > 0.0 && l > 0.0;
        offer.push_back(
            TwoPartPrice{0.0, priced ? one_part_price(p.capacity, eta_of(p), l).marginal_price : l});
      }
    }
  }
  const bool intermediated = !offer.empty();
  if (intermediated && offer.size() != scenario.prosumers.size()) {
    throw ConfigurationError("one price pair per prosumer required");
  }

  for (std::size_t j = 0; j < scenario.prosumers.size(); ++j) {
    const Prosumer& p = scenario.prosumers[j];
    const auto k = static_cast<Index>(j);
    const double x = solution.sell(k);
    const double d = solution.buy(k);
    const double l = lambda(p.node);
    const double utility = u_value(p.utility, p.capacity + d - x);
    if (intermediated) {
      const double fee = x > 0.0 ? offer[j].participation_fee : 0.0;
      w.prosumer_surplus += utility - l * d + offer[j].marginal_price * x - fee;
      w.aggregator_surplus += fee + (l - offer[j].marginal_price) * x;
    } else {
      w.prosumer_surplus += utility - l * (d - x);
    }
  }
  // Fixed demand pays the nodal price and has no utility term.
  w.prosumer_surplus -= lambda.dot(scenario.fixed_demand);
  for (std::size_t j = 0; j < scenario.generators.size(); ++j) {
    const Generator& g = scenario.generators[j];
    const double y = solution.generation(static_cast<Index>(j));
    w.generator_surplus += lambda(g.node) * y - c_value(g.cost, y);
  }
  w.merchandising_surplus = lambda.dot(solution.net_injection);
  w.total = solution.welfare;
  return w;
}

PoagResult poag(const Scenario& scenario, const SolverOptions& options,
                PoagNormalization normalization) {
  require_single_node(scenario);
  PoagResult out;
  out.normalization = normalization;
  const Prosumer& pro = scenario.prosumers.front();
  const Generator& gen = scenario.generators.front();
  const double c = pro.capacity;

  const OnePartDispatch one = solve_one_part(scenario, options);
  if (c == 0.0) {
    out.cost_onepart = one.cost;
    out.cost_efficient = one.cost;
    out.poag = 1.0;
    return out;
  }

  const DispatchSolution eff = solve_benchmark(scenario, options);
  const double y = eff.generation(0);
  const double consumption = c - eff.sell(0) + eff.buy(0);
  if (normalization == PoagNormalization::opportunity_cost) {
    out.cost_efficient =
        c_value(gen.cost, y) + u_value(pro.utility, c) - u_value(pro.utility, consumption);
    if (one.solution.sell(0) > 0.0) {
      out.cost_onepart = one.cost;
    } else {
      // No one-part trade: the prosumer only buys at the wholesale price.
      const DispatchSolution nd = solve_no_der(scenario, options);
      out.cost_onepart = c_value(gen.cost, nd.generation(0)) + u_value(pro.utility, c) -
                         u_value(pro.utility, c + nd.buy(0));
    }
  } else {
    out.cost_efficient = -eff.welfare;
    out.cost_onepart = one.cost;
  }
  if (!(out.cost_efficient > 0.0)) {
    throw DegenerateError("efficient cost is not positive under the chosen normalization");
  }
  out.poag = out.cost_onepart / out.cost_efficient;
  return out;
}

}  // namespace dermkt
