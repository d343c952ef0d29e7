#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dermkt/onepart.hpp"

namespace dermkt {

enum class SweepModel { efficient, no_der, one_part };

struct SweepOptions {
  double from = 0.0;
  double to = 100.0;
  int steps = 51;
  std::vector<SweepModel> models{SweepModel::efficient, SweepModel::no_der,
                                 SweepModel::one_part};
  int jobs = 1;
  PoagNormalization normalization = PoagNormalization::opportunity_cost;
  SolverOptions solver;
};

/// One capacity point. Cells of models that were not run stay empty.
struct SweepRow {
  double capacity = 0.0;
  std::optional<double> welfare_efficient;
  std::optional<double> welfare_no_der;
  std::optional<double> welfare_one_part;
  std::optional<double> poag;
  std::optional<double> lambda;
  std::optional<double> x_efficient;
  std::optional<double> P_star;
  std::optional<double> p_star;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

class SweepError : public std::runtime_error {
 public:
  SweepError(double capacity, const std::string& cause);
  double capacity() const { return capacity_; }

 private:
  double capacity_;
};

/// Evaluates the requested models at `steps` evenly spaced prosumer capacities.
/// Rows come back in ascending capacity regardless of `jobs`.
SweepResult run_sweep(const Scenario& base, const SweepOptions& options);

inline constexpr const char* kSweepHeader =
    "capacity,welfare_efficient,welfare_no_der,welfare_one_part,poag,lambda,x_efficient,"
    "P_star,p_star";

std::string to_csv(const SweepResult& result);

struct RandomScenarioShape {
  int nodes = 1;
  int prosumers = 1;
  int generators = 1;
};

/// Deterministic random scenario for property tests; always valid.
Scenario generate_random_scenario(std::uint64_t seed, const RandomScenarioShape& shape);

}  // namespace dermkt
