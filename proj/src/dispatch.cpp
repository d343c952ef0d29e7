#include "dermkt/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "dermkt/agents.hpp"
#include "dermkt/errors.hpp"

// The dispatch programs are solved through their Lagrange dual. Nodal prices
// are parameterized as lambda = gamma 1 + B^T mu (stationarity in h), every
// agent answers lambda in closed form, and the dual function
//
//   q(gamma, mu) = sum_agents phi_a(lambda_node(a)) - lambda^T Dbar + mu^T f
//
// is minimized over gamma free, mu >= 0 with a projected Newton method. The
// dual gradient is the primal residual: total excess supply for gamma and the
// line slack f - B h for mu.

namespace dermkt {

std::string_view to_string(Model model) {
  switch (model) {
    case Model::benchmark:
      return "benchmark";
    case Model::aggregation:
      return "aggregation";
    case Model::no_der:
      return "no_der";
    case Model::one_part:
      return "one_part";
  }
  return "unknown";
}

Model parse_model(std::string_view name) {
  if (name == "benchmark") return Model::benchmark;
  if (name == "aggregation") return Model::aggregation;
  if (name == "no_der") return Model::no_der;
  if (name == "one_part") return Model::one_part;
  throw ConfigurationError("unknown model: " + std::string(name));
}

double social_welfare(const Scenario& scenario, const Eigen::VectorXd& sell,
                      const Eigen::VectorXd& buy, const Eigen::VectorXd& generation) {
  double w = 0.0;
  for (std::size_t j = 0; j < scenario.prosumers.size(); ++j) {
    const Prosumer& p = scenario.prosumers[j];
    const auto k = static_cast<Index>(j);
    w += u_value(p.utility, p.capacity + buy(k) - sell(k));
  }
  for (std::size_t j = 0; j < scenario.generators.size(); ++j) {
    w -= c_value(scenario.generators[j].cost, generation(static_cast<Index>(j)));
  }
  return w;
}

Eigen::VectorXd nodal_net_injection(const Scenario& scenario, const Eigen::VectorXd& sell,
                                    const Eigen::VectorXd& buy,
                                    const Eigen::VectorXd& generation) {
  Eigen::VectorXd h = scenario.fixed_demand;
  for (std::size_t j = 0; j < scenario.prosumers.size(); ++j) {
    const auto k = static_cast<Index>(j);
    h(scenario.prosumers[j].node) += buy(k) - sell(k);
  }
  for (std::size_t j = 0; j < scenario.generators.size(); ++j) {
    h(scenario.generators[j].node) -= generation(static_cast<Index>(j));
  }
  return h;
}

namespace {

struct Evaluation {
  double dual_value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
  Eigen::VectorXd lambda;
  Eigen::VectorXd sell, buy, generation;
};

class DualProblem {
 public:
  DualProblem(const Scenario& scenario, Model model)
      : scenario_(scenario),
        model_(model),
        b_(scenario.network.incidence_matrix()),
        f_(scenario.network.capacities()) {
    const Index n = scenario.network.node_count();
    lift_ = Eigen::MatrixXd(n, 1 + b_.rows());
    lift_.col(0).setOnes();
    lift_.rightCols(b_.rows()) = b_.transpose();
  }

  Index size() const { return lift_.cols(); }

  Eigen::VectorXd prices(const Eigen::VectorXd& v) const { return lift_ * v; }

  Evaluation evaluate(const Eigen::VectorXd& v) const {
    const Index n = scenario_.network.node_count();
    Evaluation e;
    e.lambda = prices(v);
    e.sell = Eigen::VectorXd::Zero(static_cast<Index>(scenario_.prosumers.size()));
    e.buy = e.sell;
    e.generation = Eigen::VectorXd::Zero(static_cast<Index>(scenario_.generators.size()));

    Eigen::VectorXd supply = -scenario_.fixed_demand;
    Eigen::VectorXd slope = Eigen::VectorXd::Zero(n);
    double phi = 0.0;

    for (std::size_t j = 0; j < scenario_.prosumers.size(); ++j) {
      const Prosumer& p = scenario_.prosumers[j];
      const double lambda = e.lambda(p.node);
      double dz = 0.0;
      const ProsumerResponse r = respond(p, lambda, dz);
      const auto k = static_cast<Index>(j);
      e.sell(k) = r.sell;
      e.buy(k) = r.buy;
      phi += u_value(p.utility, p.capacity - r.net()) + lambda * r.net();
      supply(p.node) += r.net();
      slope(p.node) += dz;
    }
    for (std::size_t j = 0; j < scenario_.generators.size(); ++j) {
      const Generator& g = scenario_.generators[j];
      const double lambda = e.lambda(g.node);
      const double y = generator_response(g, lambda);
      e.generation(static_cast<Index>(j)) = y;
      phi += lambda * y - c_value(g.cost, y);
      supply(g.node) += y;
      const double unclipped = c_inverse_marginal(g.cost, lambda);
      if (unclipped > g.cost.y_min && unclipped < g.cost.y_max) {
        slope(g.node) += 1.0 / c_curvature(g.cost, y);
      }
    }

    // supply here is X - D + Y - Dbar = -h.
    e.dual_value = phi - e.lambda.dot(scenario_.fixed_demand) + v.tail(b_.rows()).dot(f_);
    e.gradient = lift_.transpose() * supply;
    e.gradient.tail(b_.rows()) += f_;
    e.hessian = lift_.transpose() * slope.asDiagonal() * lift_;
    return e;
  }

  // Combined primal residual: balance, line violation, complementarity.
  double residual(const Evaluation& e, const Eigen::VectorXd& v) const {
    double r = std::abs(e.gradient(0));
    for (Index l = 0; l < b_.rows(); ++l) {
      const double slack = e.gradient(1 + l);
      r = std::max({r, -slack, std::abs(v(1 + l) * slack)});
    }
    return r;
  }

 private:
  // Closed-form response at lambda; dz receives d(net supply)/d(lambda).
  ProsumerResponse respond(const Prosumer& p, double lambda, double& dz) const {
    const double c = p.capacity;
    const double cap = p.consumption_cap;
    dz = 0.0;
    if (!(lambda > 0.0)) {
      // Marginal utility is positive everywhere: consume up to Z.
      return ProsumerResponse{0.0, cap - c};
    }
    const double z1 = u_inverse_marginal(p.utility, lambda);
    const bool interior = z1 < cap && (model_ != Model::no_der || z1 > c);
    if (interior) dz = -1.0 / u_curvature(p.utility, z1);
    switch (model_) {
      case Model::benchmark:
        return prosumer_direct_response(p, lambda);
      case Model::aggregation:
        return aggregator_optimal_price(p, lambda).response;
      case Model::no_der:
        return ProsumerResponse{0.0, std::clamp(z1, c, cap) - c};
      case Model::one_part:
        break;
    }
    throw ConfigurationError("one-part dispatch is solved by solve_one_part");
  }

  const Scenario& scenario_;
  Model model_;
  Eigen::MatrixXd b_;
  Eigen::VectorXd f_;
  Eigen::MatrixXd lift_;  // [1 | B^T]
};

int iteration_cap(const SolverOptions& options) {
  if (const char* env = std::getenv("DERMKT_MAX_ITERS")) {
    try {
      const int cap = std::stoi(env);
      if (cap > 0) return cap;
    } catch (const std::exception&) {
    }
  }
  return options.max_iterations;
}

constexpr double kDivergence = 1e14;

DispatchSolution solve_dual(const Scenario& scenario, Model model, const SolverOptions& options) {
  if (scenario.network.node_count() < 1) throw ConfigurationError("network has no nodes");
  const DualProblem dual(scenario, model);
  const Index m = dual.size();
  const double target = 0.01 * options.tol;
  const int cap = iteration_cap(options);

  Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
  v(0) = 1.0;
  Evaluation cur = dual.evaluate(v);
  double r = dual.residual(cur, v);

  int iter = 0;
  bool stalled = false;
  for (; iter < cap && r > target; ++iter) {
    // Lines with mu at zero and positive slack stay fixed at zero.
    const double eps = std::min(1e-6, r);
    std::vector<Index> free{0};
    for (Index k = 1; k < m; ++k) {
      if (!(v(k) <= eps && cur.gradient(k) > 0.0)) free.push_back(k);
    }
    const auto nf = static_cast<Index>(free.size());
    Eigen::MatrixXd h(nf, nf);
    Eigen::VectorXd g(nf);
    for (Index a = 0; a < nf; ++a) {
      g(a) = cur.gradient(free[a]);
      for (Index b = 0; b < nf; ++b) h(a, b) = cur.hessian(free[a], free[b]);
    }
    const double shift = 1e-12 * (1.0 + h.diagonal().maxCoeff());
    h.diagonal().array() += shift;
    Eigen::VectorXd newton = h.ldlt().solve(-g);

    Eigen::VectorXd direction = -v;  // fixed lines go straight to zero
    direction(0) = 0.0;
    for (Index a = 0; a < nf; ++a) direction(free[a]) = newton(a);
    const double limit = 1e6 * (1.0 + v.lpNorm<Eigen::Infinity>());
    if (direction.lpNorm<Eigen::Infinity>() > limit) {
      direction *= limit / direction.lpNorm<Eigen::Infinity>();
    }

    auto search = [&](const Eigen::VectorXd& d) {
      double t = 1.0;
      for (int halving = 0; halving < 80; ++halving, t *= 0.5) {
        Eigen::VectorXd trial = v + t * d;
        trial.tail(m - 1) = trial.tail(m - 1).cwiseMax(0.0);
        Evaluation next = dual.evaluate(trial);
        const double rn = dual.residual(next, trial);
        const double predicted = cur.gradient.dot(trial - v);
        const bool armijo = next.dual_value <= cur.dual_value + 1e-4 * predicted;
        const bool flat = next.dual_value <= cur.dual_value + 1e-12 * (1.0 + std::abs(cur.dual_value));
        if (std::isfinite(next.dual_value) && (armijo || (flat && rn <= 0.9 * r))) {
          v = std::move(trial);
          cur = std::move(next);
          r = rn;
          return true;
        }
      }
      return false;
    };

    if (!search(direction)) {
      Eigen::VectorXd steepest = -cur.gradient;
      if (!search(steepest)) {
        stalled = true;
        break;
      }
    }
    if (v.lpNorm<Eigen::Infinity>() > kDivergence) {
      throw InfeasibleError("dispatch program infeasible: multipliers diverge (residual " +
                            std::to_string(r) + ")");
    }
  }

  if (r > options.tol) {
    if (stalled || iter >= cap) {
      throw ConvergenceError("dispatch solver did not converge", iter, r);
    }
  }

  DispatchSolution s;
  s.model = model;
  s.sell = cur.sell;
  s.buy = cur.buy;
  s.generation = cur.generation;
  s.net_injection = nodal_net_injection(scenario, s.sell, s.buy, s.generation);
  s.nodal_price = cur.lambda;
  s.line_multiplier = v.tail(m - 1);
  s.balance_residual = 0.0;  // h is defined by the balance
  s.welfare = social_welfare(scenario, s.sell, s.buy, s.generation);
  s.iterations = iter;
  return s;
}

}  // namespace

DispatchSolution solve_benchmark(const Scenario& scenario, const SolverOptions& options) {
  return solve_dual(scenario, Model::benchmark, options);
}

DispatchSolution solve_aggregation(const Scenario& scenario, const SolverOptions& options) {
  return solve_dual(scenario, Model::aggregation, options);
}

DispatchSolution solve_no_der(const Scenario& scenario, const SolverOptions& options) {
  return solve_dual(scenario, Model::no_der, options);
}

DispatchSolution solve(const Scenario& scenario, Model model, const SolverOptions& options) {
  return solve_dual(scenario, model, options);
}

DispatchSolution map_benchmark_to_aggregation(const DispatchSolution& benchmark) {
  DispatchSolution out = benchmark;
  out.model = Model::aggregation;
  const Eigen::VectorXd net = benchmark.sell - benchmark.buy;
  out.sell = net.cwiseMax(0.0);
  out.buy = (-net).cwiseMax(0.0);
  return out;
}

}  // namespace dermkt
