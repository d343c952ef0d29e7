#pragma once

#include <string_view>

#include <Eigen/Core>

#include "dermkt/domain.hpp"

namespace dermkt {

/// Market design the dispatch program models.
///   benchmark   - prosumers trade x - d directly at the nodal price
///   aggregation - prosumers sell through a two-part pricing aggregator
///   no_der      - prosumers may buy but never sell
///   one_part    - single-node induced-cost dispatch (see onepart.hpp)
enum class Model { benchmark, aggregation, no_der, one_part };

std::string_view to_string(Model model);
Model parse_model(std::string_view name);

struct SolverOptions {
  double tol = 1e-8;
  int max_iterations = 100000;
};

struct DispatchSolution {
  Model model = Model::benchmark;
  Eigen::VectorXd sell;             // x, per prosumer
  Eigen::VectorXd buy;              // d, per prosumer
  Eigen::VectorXd generation;       // y, per generator
  Eigen::VectorXd net_injection;    // h, per node
  Eigen::VectorXd nodal_price;      // lambda, per node
  Eigen::VectorXd line_multiplier;  // mu >= 0, per line
  double balance_residual = 0.0;
  double welfare = 0.0;
  int iterations = 0;
};

struct KktReport {
  double stationarity_residual = 0.0;
  double primal_residual = 0.0;
  double complementarity_residual = 0.0;
  bool is_equilibrium = false;
};

DispatchSolution solve_benchmark(const Scenario& scenario, const SolverOptions& options = {});
DispatchSolution solve_aggregation(const Scenario& scenario, const SolverOptions& options = {});
DispatchSolution solve_no_der(const Scenario& scenario, const SolverOptions& options = {});
DispatchSolution solve(const Scenario& scenario, Model model, const SolverOptions& options = {});

/// Splits each benchmark net trade into (x, d) = ([x-d]^+, [d-x]^+).
DispatchSolution map_benchmark_to_aggregation(const DispatchSolution& benchmark);

KktReport verify_kkt(const DispatchSolution& solution, const Scenario& scenario, Model model,
                     double tol);

inline const Eigen::VectorXd& equilibrium_prices(const DispatchSolution& solution) {
  return solution.nodal_price;
}

/// Sum of prosumer utilities minus generation cost.
double social_welfare(const Scenario& scenario, const Eigen::VectorXd& sell,
                      const Eigen::VectorXd& buy, const Eigen::VectorXd& generation);

/// h = fixed demand + D - Y - X, per node.
Eigen::VectorXd nodal_net_injection(const Scenario& scenario, const Eigen::VectorXd& sell,
                                    const Eigen::VectorXd& buy,
                                    const Eigen::VectorXd& generation);

}  // namespace dermkt
