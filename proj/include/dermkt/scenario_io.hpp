#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "dermkt/dispatch.hpp"
#include "dermkt/onepart.hpp"

namespace dermkt {

/// Strict parse: unknown fields, missing fields and dangling node references
/// raise ScenarioError. The result is validated.
Scenario scenario_from_json(const nlohmann::json& document);
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json scenario_to_json(const Scenario& scenario);
std::string dump_scenario(const Scenario& scenario);

/// Rounds to 12 significant digits, the precision of every numeric result.
double round_sig12(double value);

/// Solver output document written by `dermkt solve`.
nlohmann::json solution_report(const Scenario& scenario, const DispatchSolution& solution,
                               const WelfareDecomposition& decomposition,
                               const KktReport& kkt);

}  // namespace dermkt
