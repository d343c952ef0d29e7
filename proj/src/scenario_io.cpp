#include "dermkt/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>

#include "dermkt/errors.hpp"

namespace dermkt {

using nlohmann::json;

namespace {

void check_fields(const json& object, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  if (!object.is_object()) throw ScenarioError(where + ": expected an object");
  for (const auto& [key, _] : object.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ScenarioError(where + ": unknown field '" + key + "'");
  }
}

const json& field(const json& object, const char* name, const std::string& where) {
  const auto it = object.find(name);
  if (it == object.end()) throw ScenarioError(where + ": missing field '" + name + "'");
  return *it;
}

double number(const json& object, const char* name, const std::string& where) {
  const json& v = field(object, name, where);
  if (!v.is_number()) throw ScenarioError(where + "." + name + ": expected a number");
  return v.get<double>();
}

std::string text(const json& object, const char* name, const std::string& where) {
  const json& v = field(object, name, where);
  if (!v.is_string()) throw ScenarioError(where + "." + name + ": expected a string");
  return v.get<std::string>();
}

Index node_ref(const std::map<std::string, Index>& nodes, const std::string& id,
               const std::string& where) {
  const auto it = nodes.find(id);
  if (it == nodes.end()) throw ScenarioError(where + ": unknown node '" + id + "'");
  return it->second;
}

UtilitySpec parse_utility(const json& u, const std::string& where) {
  check_fields(u, {"type", "eta"}, where);
  const std::string type = text(u, "type", where);
  if (type != "isoelastic") throw ScenarioError(where + ".type: unsupported utility '" + type + "'");
  return isoelastic(number(u, "eta", where));
}

CostSpec parse_cost(const json& c, const std::string& where) {
  check_fields(c, {"type", "alpha", "beta", "y_min", "y_max"}, where);
  const std::string type = text(c, "type", where);
  if (type != "quadratic") throw ScenarioError(where + ".type: unsupported cost '" + type + "'");
  return quadratic_cost(number(c, "alpha", where), number(c, "beta", where),
                        number(c, "y_min", where), number(c, "y_max", where));
}

// Returns (from, to) if the row is a plain directed incidence row.
std::optional<std::pair<Index, Index>> as_directed(const Eigen::RowVectorXd& row) {
  Index from = -1;
  Index to = -1;
  for (Index i = 0; i < row.size(); ++i) {
    if (row(i) == -1.0 && from < 0) {
      from = i;
    } else if (row(i) == 1.0 && to < 0) {
      to = i;
    } else if (row(i) != 0.0) {
      return std::nullopt;
    }
  }
  if (from < 0 || to < 0) return std::nullopt;
  return std::make_pair(from, to);
}

std::string format12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

json rounded(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(round_sig12(v(i)));
  return out;
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
  check_fields(doc, {"network", "prosumers", "generators", "fixed_demand"}, "scenario");
  Scenario s;

  const json& net = field(doc, "network", "scenario");
  check_fields(net, {"nodes", "lines"}, "network");
  const json& nodes = field(net, "nodes", "network");
  if (!nodes.is_array()) throw ScenarioError("network.nodes: expected an array of node ids");
  std::map<std::string, Index> node_index;
  for (const json& n : nodes) {
    if (!n.is_string()) throw ScenarioError("network.nodes: node ids must be strings");
    node_index.emplace(n.get<std::string>(), s.network.node_count());
    s.network.node_ids.push_back(n.get<std::string>());
  }
  const Index n = s.network.node_count();

  if (const auto it = net.find("lines"); it != net.end()) {
    if (!it->is_array()) throw ScenarioError("network.lines: expected an array");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const json& l = (*it)[k];
      const std::string where = "network.lines[" + std::to_string(k) + "]";
      check_fields(l, {"id", "from", "to", "capacity", "direction", "incidence"}, where);
      const std::string id = l.contains("id") ? text(l, "id", where) : "l" + std::to_string(k);
      const double capacity = number(l, "capacity", where);
      if (l.contains("incidence")) {
        if (l.contains("from") || l.contains("to") || l.contains("direction")) {
          throw ScenarioError(where + ": give either incidence or from/to, not both");
        }
        const json& row = l["incidence"];
        if (!row.is_array()) throw ScenarioError(where + ".incidence: expected an array");
        Eigen::RowVectorXd r(static_cast<Index>(row.size()));
        for (std::size_t i = 0; i < row.size(); ++i) {
          if (!row[i].is_number()) throw ScenarioError(where + ".incidence: expected numbers");
          r(static_cast<Index>(i)) = row[i].get<double>();
        }
        s.network.lines.push_back(Line{id, r, capacity});
        continue;
      }
      const Index from = node_ref(node_index, text(l, "from", where), where + ".from");
      const Index to = node_ref(node_index, text(l, "to", where), where + ".to");
      const std::string direction = l.contains("direction") ? text(l, "direction", where) : "forward";
      if (direction == "forward") {
        s.network.lines.push_back(Line{id, directed_incidence(n, from, to), capacity});
      } else if (direction == "reverse") {
        s.network.lines.push_back(Line{id, directed_incidence(n, to, from), capacity});
      } else if (direction == "both") {
        s.network.lines.push_back(Line{id, directed_incidence(n, from, to), capacity});
        s.network.lines.push_back(Line{id + "/rev", directed_incidence(n, to, from), capacity});
      } else {
        throw ScenarioError(where + ".direction: expected forward, reverse or both");
      }
    }
  }

  const json& pros = field(doc, "prosumers", "scenario");
  if (!pros.is_array()) throw ScenarioError("prosumers: expected an array");
  for (std::size_t k = 0; k < pros.size(); ++k) {
    const json& p = pros[k];
    const std::string where = "prosumers[" + std::to_string(k) + "]";
    check_fields(p, {"id", "node", "capacity", "z", "utility"}, where);
    s.prosumers.push_back(Prosumer{text(p, "id", where),
                                   node_ref(node_index, text(p, "node", where), where + ".node"),
                                   number(p, "capacity", where), number(p, "z", where),
                                   parse_utility(field(p, "utility", where), where + ".utility")});
  }

  const json& gens = field(doc, "generators", "scenario");
  if (!gens.is_array()) throw ScenarioError("generators: expected an array");
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const json& g = gens[k];
    const std::string where = "generators[" + std::to_string(k) + "]";
    check_fields(g, {"id", "node", "cost"}, where);
    s.generators.push_back(Generator{text(g, "id", where),
                                     node_ref(node_index, text(g, "node", where), where + ".node"),
                                     parse_cost(field(g, "cost", where), where + ".cost")});
  }

  s.fixed_demand = Eigen::VectorXd::Zero(n);
  if (const auto it = doc.find("fixed_demand"); it != doc.end()) {
    if (!it->is_array()) throw ScenarioError("fixed_demand: expected an array");
    s.fixed_demand.resize(static_cast<Index>(it->size()));
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_number()) throw ScenarioError("fixed_demand: expected numbers");
      s.fixed_demand(static_cast<Index>(i)) = (*it)[i].get<double>();
    }
  }
  return s;
}

Scenario parse_scenario(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario parse error: ") + e.what());
  }
  Scenario s = scenario_from_json(doc);
  auto violations = validate(s);
  if (!violations.empty()) {
    std::string msg = "invalid scenario:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw ScenarioError(msg, std::move(violations));
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

json scenario_to_json(const Scenario& s) {
  json doc;
  doc["network"]["nodes"] = s.network.node_ids;
  json lines = json::array();
  for (const Line& line : s.network.lines) {
    json l;
    l["id"] = line.id;
    if (const auto d = as_directed(line.incidence)) {
      l["from"] = s.network.node_ids[static_cast<std::size_t>(d->first)];
      l["to"] = s.network.node_ids[static_cast<std::size_t>(d->second)];
    } else {
      l["incidence"] = std::vector<double>(line.incidence.data(),
                                           line.incidence.data() + line.incidence.size());
    }
    l["capacity"] = line.capacity;
    lines.push_back(std::move(l));
  }
  doc["network"]["lines"] = std::move(lines);

  json pros = json::array();
  for (const Prosumer& p : s.prosumers) {
    const double eta = std::get<Isoelastic<double>>(p.utility).eta;
    pros.push_back({{"id", p.id},
                    {"node", s.network.node_ids[static_cast<std::size_t>(p.node)]},
                    {"capacity", p.capacity},
                    {"z", p.consumption_cap},
                    {"utility", {{"type", "isoelastic"}, {"eta", eta}}}});
  }
  doc["prosumers"] = std::move(pros);

  json gens = json::array();
  for (const Generator& g : s.generators) {
    const auto& q = std::get<Quadratic<double>>(g.cost.curve);
    gens.push_back({{"id", g.id},
                    {"node", s.network.node_ids[static_cast<std::size_t>(g.node)]},
                    {"cost",
                     {{"type", "quadratic"},
                      {"alpha", q.alpha},
                      {"beta", q.beta},
                      {"y_min", g.cost.y_min},
                      {"y_max", g.cost.y_max}}}});
  }
  doc["generators"] = std::move(gens);
  doc["fixed_demand"] = std::vector<double>(s.fixed_demand.data(),
                                            s.fixed_demand.data() + s.fixed_demand.size());
  return doc;
}

std::string dump_scenario(const Scenario& scenario) {
  return scenario_to_json(scenario).dump(2) + "\n";
}

double round_sig12(double value) {
  if (!std::isfinite(value)) return value;
  return std::stod(format12(value));
}

json solution_report(const Scenario& scenario, const DispatchSolution& solution,
                     const WelfareDecomposition& decomposition, const KktReport& kkt) {
  json doc;
  doc["model"] = std::string(to_string(solution.model));
  doc["status"] = kkt.is_equilibrium ? "optimal" : "not_converged";
  doc["iterations"] = solution.iterations;
  doc["welfare"] = round_sig12(solution.welfare);
  doc["nodal_price"] = rounded(solution.nodal_price);
  doc["net_injection"] = rounded(solution.net_injection);
  doc["line_multiplier"] = rounded(solution.line_multiplier);
  doc["balance_residual"] = round_sig12(solution.balance_residual);

  const bool priced = solution.model == Model::aggregation;
  const std::vector<TwoPartPrice> prices =
      priced ? two_part_prices(scenario, solution) : std::vector<TwoPartPrice>{};
  json pros = json::array();
  for (std::size_t j = 0; j < scenario.prosumers.size(); ++j) {
    const auto k = static_cast<Index>(j);
    json p = {{"id", scenario.prosumers[j].id},
              {"sell", round_sig12(solution.sell(k))},
              {"buy", round_sig12(solution.buy(k))}};
    if (priced) {
      p["participation_fee"] = round_sig12(prices[j].participation_fee);
      p["marginal_price"] = round_sig12(prices[j].marginal_price);
    }
    pros.push_back(std::move(p));
  }
  doc["prosumers"] = std::move(pros);
  json gens = json::array();
  for (std::size_t j = 0; j < scenario.generators.size(); ++j) {
    gens.push_back({{"id", scenario.generators[j].id},
                    {"generation", round_sig12(solution.generation(static_cast<Index>(j)))}});
  }
  doc["generators"] = std::move(gens);
  doc["decomposition"] = {
      {"prosumer_surplus", round_sig12(decomposition.prosumer_surplus)},
      {"aggregator_surplus", round_sig12(decomposition.aggregator_surplus)},
      {"generator_surplus", round_sig12(decomposition.generator_surplus)},
      {"merchandising_surplus", round_sig12(decomposition.merchandising_surplus)},
      {"total", round_sig12(decomposition.total)}};
  doc["kkt"] = {{"stationarity_residual", round_sig12(kkt.stationarity_residual)},
                {"primal_residual", round_sig12(kkt.primal_residual)},
                {"complementarity_residual", round_sig12(kkt.complementarity_residual)},
                {"is_equilibrium", kkt.is_equilibrium}};
  return doc;
}

}  // namespace dermkt
