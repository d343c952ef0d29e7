#include <algorithm>
#include <cmath>
#include <limits>

#include "dermkt/dispatch.hpp"
#include "dermkt/errors.hpp"

namespace dermkt {

namespace {

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }

// Optimality of consumption z in [lo, hi] for max u(z) - lambda z.
double consumption_residual(const Prosumer& p, double z, double lo, double hi, double lambda,
                            double tol) {
  if (!(z > 0.0)) return std::numeric_limits<double>::infinity();
  const double mu = u_marginal(p.utility, z);
  double r = std::abs(mu - lambda);
  if (near(z, lo, tol)) r = std::min(r, std::max(0.0, mu - lambda));
  if (near(z, hi, tol)) r = std::min(r, std::max(0.0, lambda - mu));
  return r;
}

double generator_residual(const Generator& g, double y, double lambda, double tol) {
  const double mc = c_marginal(g.cost, y);
  double r = std::abs(mc - lambda);
  if (near(y, g.cost.y_min, tol)) r = std::min(r, std::max(0.0, lambda - mc));
  if (near(y, g.cost.y_max, tol)) r = std::min(r, std::max(0.0, mc - lambda));
  return r;
}

double box_violation(double v, double lo, double hi) {
  return std::max({0.0, lo - v, v - hi});
}

}  // namespace

KktReport verify_kkt(const DispatchSolution& solution, const Scenario& scenario, Model model,
                     double tol) {
  if (model == Model::one_part) {
    throw ConfigurationError("KKT verification covers the benchmark, aggregation and no-DER programs");
  }
  const Index n = scenario.network.node_count();
  const auto np = static_cast<Index>(scenario.prosumers.size());
  const auto ng = static_cast<Index>(scenario.generators.size());
  if (solution.sell.size() != np || solution.buy.size() != np ||
      solution.generation.size() != ng || solution.nodal_price.size() != n ||
      solution.net_injection.size() != n ||
      solution.line_multiplier.size() != scenario.network.line_count()) {
    throw ConfigurationError("solution dimensions do not match the scenario");
  }

  const Eigen::VectorXd& lambda = solution.nodal_price;
  const Eigen::VectorXd& mu = solution.line_multiplier;
  const Eigen::MatrixXd b = scenario.network.incidence_matrix();
  const Eigen::VectorXd f = scenario.network.capacities();
  const Eigen::VectorXd& h = solution.net_injection;

  KktReport rep;

  // Stationarity in h: lambda - B^T mu is one scalar across nodes.
  const Eigen::VectorXd gamma = lambda - b.transpose() * mu;
  const double gamma_mean = gamma.mean();
  rep.stationarity_residual = (gamma.array() - gamma_mean).abs().maxCoeff();

  double primal = 0.0;
  for (Index k = 0; k < np; ++k) {
    const Prosumer& p = scenario.prosumers[static_cast<std::size_t>(k)];
    const double x = solution.sell(k);
    const double d = solution.buy(k);
    const double c = p.capacity;
    const double cap = p.consumption_cap;
    switch (model) {
      case Model::benchmark:
        primal = std::max(primal, box_violation(x - d, c - cap, c));
        break;
      case Model::aggregation:
        primal = std::max({primal, box_violation(x, 0.0, c), box_violation(d, 0.0, cap - c + x),
                            std::min(x, d)});
        break;
      case Model::no_der:
        primal = std::max({primal, std::abs(x), box_violation(d, 0.0, cap - c)});
        break;
      case Model::one_part:
        break;
    }
    const double z = c + d - x;
    const double lo = model == Model::no_der ? c : 0.0;
    rep.stationarity_residual = std::max(
        rep.stationarity_residual, consumption_residual(p, z, lo, cap, lambda(p.node), tol));
  }
  for (Index k = 0; k < ng; ++k) {
    const Generator& g = scenario.generators[static_cast<std::size_t>(k)];
    const double y = solution.generation(k);
    primal = std::max(primal, box_violation(y, g.cost.y_min, g.cost.y_max));
    rep.stationarity_residual =
        std::max(rep.stationarity_residual, generator_residual(g, y, lambda(g.node), tol));
  }

  const Eigen::VectorXd balance =
      h - nodal_net_injection(scenario, solution.sell, solution.buy, solution.generation);
  if (n > 0) primal = std::max(primal, balance.cwiseAbs().maxCoeff());
  primal = std::max(primal, std::abs(h.sum()));
  double comp = 0.0;
  if (b.rows() > 0) {
    const Eigen::VectorXd slack = f - b * h;
    primal = std::max(primal, (-slack).cwiseMax(0.0).maxCoeff());
    comp = std::max((mu.cwiseProduct(slack)).cwiseAbs().maxCoeff(),
                    (-mu).cwiseMax(0.0).maxCoeff());
  }
  rep.primal_residual = primal;
  rep.complementarity_residual = comp;
  rep.is_equilibrium = rep.stationarity_residual <= tol && rep.primal_residual <= tol &&
                       rep.complementarity_residual <= tol;
  return rep;
}

}  // namespace dermkt
