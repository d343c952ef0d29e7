#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "dermkt/utility.hpp"

namespace dermkt {

using Index = Eigen::Index;

/// One row of the line-to-node incidence matrix B together with its limit f.
struct Line {
  std::string id;
  Eigen::RowVectorXd incidence;
  double capacity = 0.0;
};

/// Transmission network: nodes plus one-sided line limits B h <= f.
struct Network {
  std::vector<std::string> node_ids;
  std::vector<Line> lines;

  Index node_count() const { return static_cast<Index>(node_ids.size()); }
  Index line_count() const { return static_cast<Index>(lines.size()); }

  /// Stacked incidence rows (line_count x node_count).
  Eigen::MatrixXd incidence_matrix() const;
  Eigen::VectorXd capacities() const;
};

struct Prosumer {
  std::string id;
  Index node = 0;
  double capacity = 0.0;         // C
  double consumption_cap = 0.0;  // Z
  UtilitySpec utility = isoelastic(1.0);
};

struct Generator {
  std::string id;
  Index node = 0;
  CostSpec cost;
};

struct Scenario {
  Network network;
  std::vector<Prosumer> prosumers;
  std::vector<Generator> generators;
  Eigen::VectorXd fixed_demand;  // one inelastic load per node, usually zero
};

/// Quantities a prosumer sells (x) and buys (d). At most one is positive.
struct ProsumerResponse {
  double sell = 0.0;
  double buy = 0.0;

  double net() const { return sell - buy; }
};

/// Participation fee P and per-unit price p offered by the aggregator.
struct TwoPartPrice {
  double participation_fee = 0.0;
  double marginal_price = 0.0;
};

/// Returns one message per violated invariant, network first, then agents in
/// id order. An empty list means the scenario is valid.
std::vector<std::string> validate(const Scenario& scenario);

/// Incidence row for a line from `from` to `to`: +1 at `to`, -1 at `from`, so
/// (B h)_l = h_to - h_from.
Eigen::RowVectorXd directed_incidence(Index node_count, Index from, Index to);

/// Parameters of the single-node market with one generator and fixed demand.
struct SingleNodeMarket {
  int prosumer_count = 1;
  double capacity = 50.0;
  double consumption_cap = 1000.0;
  double eta = 1.0;
  double alpha = 0.01;
  double beta = 1.0;
  double y_max = 1000.0;
  double fixed_demand = 100.0;
};

Scenario make_single_node(const SingleNodeMarket& market = {});

/// Copy of `scenario` with every prosumer's capacity set to `capacity`.
Scenario with_capacity(const Scenario& scenario, double capacity);

}  // namespace dermkt
