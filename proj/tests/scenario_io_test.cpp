#include <cmath>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "dermkt/onepart.hpp"
#include "dermkt/scenario_io.hpp"
#include "dermkt/sweep.hpp"

using namespace dermkt;
using nlohmann::json;

namespace {

json single_node_doc() {
  return json::parse(R"({
    "network": {"nodes": ["n0"], "lines": []},
    "prosumers": [{"id": "p1", "node": "n0", "capacity": 50, "z": 1000,
                   "utility": {"type": "isoelastic", "eta": 1}}],
    "generators": [{"id": "g1", "node": "n0",
                    "cost": {"type": "quadratic", "alpha": 0.01, "beta": 1, "y_min": 0, "y_max": 1000}}],
    "fixed_demand": [100]
  })");
}

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return {};
}

void expect_same(const Scenario& a, const Scenario& b) {
  EXPECT_EQ(a.network.node_ids, b.network.node_ids);
  ASSERT_EQ(a.network.line_count(), b.network.line_count());
  EXPECT_EQ(a.network.incidence_matrix(), b.network.incidence_matrix());
  EXPECT_EQ(a.network.capacities(), b.network.capacities());
  ASSERT_EQ(a.prosumers.size(), b.prosumers.size());
  for (std::size_t j = 0; j < a.prosumers.size(); ++j) {
    EXPECT_EQ(a.prosumers[j].id, b.prosumers[j].id);
    EXPECT_EQ(a.prosumers[j].node, b.prosumers[j].node);
    EXPECT_EQ(a.prosumers[j].capacity, b.prosumers[j].capacity);
    EXPECT_EQ(a.prosumers[j].consumption_cap, b.prosumers[j].consumption_cap);
    EXPECT_EQ(std::get<Isoelastic<double>>(a.prosumers[j].utility).eta,
              std::get<Isoelastic<double>>(b.prosumers[j].utility).eta);
  }
  ASSERT_EQ(a.generators.size(), b.generators.size());
  for (std::size_t j = 0; j < a.generators.size(); ++j) {
    const auto& qa = std::get<Quadratic<double>>(a.generators[j].cost.curve);
    const auto& qb = std::get<Quadratic<double>>(b.generators[j].cost.curve);
    EXPECT_EQ(a.generators[j].id, b.generators[j].id);
    EXPECT_EQ(qa.alpha, qb.alpha);
    EXPECT_EQ(qa.beta, qb.beta);
    EXPECT_EQ(a.generators[j].cost.y_min, b.generators[j].cost.y_min);
    EXPECT_EQ(a.generators[j].cost.y_max, b.generators[j].cost.y_max);
  }
  EXPECT_EQ(a.fixed_demand, b.fixed_demand);
}

}  // namespace

TEST(LoadScenario, ShippedSingleNode) {
  const Scenario s = load_scenario(DERMKT_SCENARIO_DIR "/single_node.json");
  EXPECT_EQ(s.network.node_count(), 1);
  EXPECT_EQ(s.network.line_count(), 0);
  ASSERT_EQ(s.prosumers.size(), 1u);
  EXPECT_EQ(s.prosumers[0].capacity, 50.0);
  EXPECT_EQ(s.prosumers[0].consumption_cap, 1000.0);
  EXPECT_EQ(s.fixed_demand(0), 100.0);
  expect_same(s, make_single_node());
}

TEST(LoadScenario, AllShippedFilesValidate) {
  for (const char* name : {"single_node.json", "two_prosumers.json", "congested_pair.json"}) {
    EXPECT_NO_THROW(load_scenario(std::string(DERMKT_SCENARIO_DIR "/") + name)) << name;
  }
}

TEST(LoadScenario, UnknownFieldIsNamed) {
  json doc = single_node_doc();
  doc["prosumers"][0]["colour"] = "red";
  const std::string err = error_of(doc.dump());
  EXPECT_NE(err.find("colour"), std::string::npos) << err;
  EXPECT_NE(err.find("prosumers[0]"), std::string::npos) << err;
}

TEST(LoadScenario, ZeroEtaCitesStrictConcavity) {
  json doc = single_node_doc();
  doc["prosumers"][0]["utility"]["eta"] = 0;
  try {
    parse_scenario(doc.dump());
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    ASSERT_EQ(e.violations().size(), 1u);
    EXPECT_NE(e.violations()[0].find("strict concavity"), std::string::npos);
  }
}

TEST(LoadScenario, ReportsEveryViolation) {
  json doc = single_node_doc();
  doc["prosumers"][0]["z"] = 10;
  doc["generators"][0]["cost"]["alpha"] = 0;
  try {
    parse_scenario(doc.dump());
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    EXPECT_EQ(e.violations().size(), 2u);
  }
}

TEST(LoadScenario, SyntaxErrorCarriesPosition) {
  const std::string err = error_of("{\n  \"network\": {\n    \"nodes\": [\"n0\",]\n  }\n}");
  EXPECT_NE(err.find("line 3"), std::string::npos) << err;
}

TEST(LoadScenario, MissingAndDanglingReferences) {
  json doc = single_node_doc();
  doc["generators"][0]["node"] = "n9";
  EXPECT_NE(error_of(doc.dump()).find("n9"), std::string::npos);
  json missing = single_node_doc();
  missing["prosumers"][0].erase("capacity");
  EXPECT_NE(error_of(missing.dump()).find("capacity"), std::string::npos);
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ScenarioError);
}

TEST(LoadScenario, LineDirections) {
  json doc = single_node_doc();
  doc["network"]["nodes"] = {"a", "b"};
  doc["fixed_demand"] = {100, 0};
  doc["prosumers"][0]["node"] = "a";
  doc["generators"][0]["node"] = "b";
  doc["network"]["lines"] = json::parse(R"([
    {"id": "f", "from": "a", "to": "b", "capacity": 5},
    {"id": "r", "from": "a", "to": "b", "capacity": 6, "direction": "reverse"},
    {"id": "t", "from": "a", "to": "b", "capacity": 7, "direction": "both"},
    {"id": "raw", "incidence": [0.5, -0.5], "capacity": 8}
  ])");
  const Scenario s = parse_scenario(doc.dump());
  ASSERT_EQ(s.network.line_count(), 5);
  const Eigen::MatrixXd b = s.network.incidence_matrix();
  EXPECT_EQ(b.row(0), Eigen::RowVector2d(-1, 1));
  EXPECT_EQ(b.row(1), Eigen::RowVector2d(1, -1));
  EXPECT_EQ(b.row(2), Eigen::RowVector2d(-1, 1));
  EXPECT_EQ(b.row(3), Eigen::RowVector2d(1, -1));
  EXPECT_EQ(b.row(4), Eigen::RowVector2d(0.5, -0.5));
  EXPECT_EQ(s.network.lines[3].id, "t/rev");
  EXPECT_EQ(s.network.capacities(), (Eigen::VectorXd(5) << 5, 6, 7, 7, 8).finished());
}

TEST(RoundTrip, ValueIdentical) {
  for (std::uint64_t seed : {1, 2, 3, 42}) {
    const Scenario s = generate_random_scenario(seed, {3, 4, 2});
    const Scenario back = parse_scenario(dump_scenario(s));
    expect_same(s, back);
    EXPECT_EQ(dump_scenario(back), dump_scenario(s));
  }
  const Scenario pair = load_scenario(DERMKT_SCENARIO_DIR "/congested_pair.json");
  expect_same(pair, parse_scenario(dump_scenario(pair)));
}

TEST(Report, TwelveSignificantDigits) {
  EXPECT_EQ(round_sig12(2.009950493836207), 2.00995049384);
  EXPECT_EQ(round_sig12(0.0), 0.0);
  EXPECT_EQ(round_sig12(-76.69563478364612), -76.6956347836);

  const Scenario s = make_single_node();
  const auto sol = solve_aggregation(s);
  const auto kkt = verify_kkt(sol, s, Model::aggregation, 1e-8);
  const json r = solution_report(s, sol, welfare_decomposition(sol, s, Model::aggregation), kkt);
  EXPECT_EQ(r["model"], "aggregation");
  EXPECT_EQ(r["nodal_price"][0].get<double>(), 2.00995049384);
  EXPECT_EQ(r["kkt"]["is_equilibrium"], true);
  EXPECT_EQ(r["prosumers"][0]["id"], "p1");
  EXPECT_NEAR(r["prosumers"][0]["participation_fee"].get<double>(), 94.8873915945, 1e-9);
}
