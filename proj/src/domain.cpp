#include "dermkt/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace dermkt {

Eigen::MatrixXd Network::incidence_matrix() const {
  Eigen::MatrixXd b(line_count(), node_count());
  for (Index l = 0; l < line_count(); ++l) b.row(l) = lines[l].incidence;
  return b;
}

Eigen::VectorXd Network::capacities() const {
  Eigen::VectorXd f(line_count());
  for (Index l = 0; l < line_count(); ++l) f(l) = lines[l].capacity;
  return f;
}

Eigen::RowVectorXd directed_incidence(Index node_count, Index from, Index to) {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(node_count);
  row(from) -= 1.0;
  row(to) += 1.0;
  return row;
}

namespace {

bool finite(double v) { return std::isfinite(v); }

std::vector<std::size_t> order_by_id(const auto& agents) {
  std::vector<std::size_t> order(agents.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return agents[a].id < agents[b].id; });
  return order;
}

}  // namespace

std::vector<std::string> validate(const Scenario& scenario) {
  std::vector<std::string> out;
  const Network& net = scenario.network;
  const Index n = net.node_count();

  if (n < 1) out.push_back("network: node_count must be >= 1");
  {
    std::set<std::string> seen;
    for (const auto& id : net.node_ids) {
      if (!seen.insert(id).second) out.push_back("network: duplicate node id " + id);
    }
  }
  for (Index l = 0; l < net.line_count(); ++l) {
    const Line& line = net.lines[l];
    const std::string tag = "line " + std::to_string(l);
    if (line.incidence.size() != n) {
      out.push_back(tag + ": incidence row must have " + std::to_string(n) + " entries");
    } else if (!line.incidence.allFinite()) {
      out.push_back(tag + ": incidence row must be finite");
    }
    if (!finite(line.capacity) || line.capacity < 0.0) {
      out.push_back(tag + ": capacity must be ≥ 0");
    }
  }

  std::set<std::string> ids;
  for (const auto& p : scenario.prosumers) {
    if (!ids.insert(p.id).second) out.push_back("prosumer " + p.id + ": duplicate id");
  }
  for (const auto& g : scenario.generators) {
    if (!ids.insert(g.id).second) out.push_back("generator " + g.id + ": duplicate id");
  }

  for (std::size_t k : order_by_id(scenario.prosumers)) {
    const Prosumer& p = scenario.prosumers[k];
    const std::string tag = "prosumer " + p.id;
    if (p.node < 0 || p.node >= n) out.push_back(tag + ": node index out of range");
    if (!finite(p.capacity) || p.capacity < 0.0) out.push_back(tag + ": C must be finite and ≥ 0");
    if (!finite(p.consumption_cap)) {
      out.push_back(tag + ": Z must be finite");
    } else if (!(p.consumption_cap > p.capacity)) {
      out.push_back(tag + ": Z must exceed C");
    }
    std::visit(
        [&](const Isoelastic<double>& u) {
          if (!finite(u.eta) || !(u.eta > 0.0)) {
            out.push_back(tag + ": eta must be > 0 (strict concavity)");
          }
        },
        p.utility);
  }

  for (std::size_t k : order_by_id(scenario.generators)) {
    const Generator& g = scenario.generators[k];
    const std::string tag = "generator " + g.id;
    if (g.node < 0 || g.node >= n) out.push_back(tag + ": node index out of range");
    std::visit(
        [&](const Quadratic<double>& c) {
          if (!finite(c.alpha) || !(c.alpha > 0.0)) {
            out.push_back(tag + ": alpha must be > 0 (strict convexity)");
          }
          if (!finite(c.beta) || c.beta < 0.0) out.push_back(tag + ": beta must be ≥ 0");
        },
        g.cost.curve);
    if (!finite(g.cost.y_min) || !finite(g.cost.y_max) || g.cost.y_min < 0.0 ||
        g.cost.y_min > g.cost.y_max) {
      out.push_back(tag + ": bounds must satisfy 0 ≤ y_min ≤ y_max");
    }
  }

  const Eigen::VectorXd& dbar = scenario.fixed_demand;
  if (dbar.size() != n) {
    out.push_back("fixed_demand: must have one entry per node");
  } else {
    for (Index i = 0; i < n; ++i) {
      if (!finite(dbar(i)) || dbar(i) < 0.0) {
        out.push_back("fixed_demand " + net.node_ids[i] + ": must be finite and ≥ 0");
      }
    }
    if (scenario.generators.empty() && dbar.sum() > 0.0) {
      out.push_back("fixed_demand: positive demand requires at least one generator");
    }
  }
  return out;
}

Scenario make_single_node(const SingleNodeMarket& market) {
  Scenario s;
  s.network.node_ids = {"n0"};
  for (int k = 0; k < market.prosumer_count; ++k) {
    s.prosumers.push_back(Prosumer{"p" + std::to_string(k + 1), 0, market.capacity,
                                   market.consumption_cap, isoelastic(market.eta)});
  }
  s.generators.push_back(
      Generator{"g1", 0, quadratic_cost(market.alpha, market.beta, 0.0, market.y_max)});
  s.fixed_demand = Eigen::VectorXd::Constant(1, market.fixed_demand);
  return s;
}

Scenario with_capacity(const Scenario& scenario, double capacity) {
  Scenario out = scenario;
  for (auto& p : out.prosumers) p.capacity = capacity;
  return out;
}

}  // namespace dermkt
