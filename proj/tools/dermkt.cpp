// dermkt: wholesale market outcomes under direct DER participation, two-part
// aggregation and one-part aggregation.
//
//   dermkt validate <scenario.json>
//   dermkt solve <scenario.json> --model benchmark|aggregation|no_der [--tol 1e-8] [--output out.json]
//   dermkt sweep <scenario.json> --from 0 --to 100 --steps 51 [--models efficient,no_der,one_part]
//                [--jobs 4] [--normalization opportunity|literal] [--output sweep.csv]
//   dermkt gen-random --seed 7 --nodes 3 --prosumers 4 --generators 2 [--output s.json]
//
// Exit codes: 0 success, 1 input error, 2 solver failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dermkt/errors.hpp"
#include "dermkt/scenario_io.hpp"
#include "dermkt/sweep.hpp"

namespace {

constexpr int kInputError = 1;
constexpr int kSolverError = 2;

void emit(const std::string& body, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
}

dermkt::SweepModel parse_sweep_model(const std::string& name) {
  if (name == "efficient") return dermkt::SweepModel::efficient;
  if (name == "no_der") return dermkt::SweepModel::no_der;
  if (name == "one_part") return dermkt::SweepModel::one_part;
  throw dermkt::ConfigurationError("unknown sweep model: " + name);
}

dermkt::PoagNormalization parse_normalization(const std::string& name) {
  if (name == "opportunity") return dermkt::PoagNormalization::opportunity_cost;
  if (name == "literal") return dermkt::PoagNormalization::literal_negative_welfare;
  throw dermkt::ConfigurationError("unknown normalization: " + name);
}

int cmd_validate(const std::string& path) {
  try {
    dermkt::load_scenario(path);
  } catch (const dermkt::ScenarioError& e) {
    if (e.violations().empty()) {
      std::cerr << e.what() << '\n';
    } else {
      for (const auto& v : e.violations()) std::cout << v << '\n';
    }
    return kInputError;
  }
  std::cout << "ok\n";
  return 0;
}

int cmd_solve(const std::string& path, const std::string& model_name, double tol,
              const std::string& output) {
  dermkt::Scenario scenario;
  dermkt::Model model{};
  try {
    scenario = dermkt::load_scenario(path);
    model = dermkt::parse_model(model_name);
    if (model == dermkt::Model::one_part) {
      throw dermkt::ConfigurationError("solve supports benchmark, aggregation and no_der");
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kInputError;
  }
  try {
    dermkt::SolverOptions options;
    options.tol = tol;
    const dermkt::DispatchSolution sol = dermkt::solve(scenario, model, options);
    const dermkt::KktReport kkt = dermkt::verify_kkt(sol, scenario, model, tol);
    const auto decomposition = dermkt::welfare_decomposition(sol, scenario, model);
    emit(dermkt::solution_report(scenario, sol, decomposition, kkt).dump(2) + "\n", output);
    return kkt.is_equilibrium ? 0 : kSolverError;
  } catch (const dermkt::ConvergenceError& e) {
    std::cerr << e.what() << " after " << e.iterations() << " iterations, best residual "
              << e.best_residual() << '\n';
  } catch (const dermkt::InfeasibleError& e) {
    std::cerr << e.what() << '\n';
  }
  return kSolverError;
}

int cmd_sweep(const std::string& path, dermkt::SweepOptions options,
              const std::vector<std::string>& models, const std::string& normalization,
              const std::string& output) {
  dermkt::Scenario scenario;
  try {
    scenario = dermkt::load_scenario(path);
    options.models.clear();
    for (const auto& m : models) options.models.push_back(parse_sweep_model(m));
    options.normalization = parse_normalization(normalization);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kInputError;
  }
  try {
    emit(dermkt::to_csv(dermkt::run_sweep(scenario, options)), output);
  } catch (const dermkt::SweepError& e) {
    std::cerr << e.what() << '\n';
    return kSolverError;
  } catch (const dermkt::ConfigurationError& e) {
    std::cerr << e.what() << '\n';
    return kInputError;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wholesale electricity market outcomes with aggregated DERs"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string output;
  double tol = 1e-8;

  auto* validate = app.add_subcommand("validate", "Check a scenario file");
  validate->add_option("scenario", scenario_path, "Scenario JSON")->required();

  std::string model = "benchmark";
  auto* solve = app.add_subcommand("solve", "Solve one dispatch program");
  solve->add_option("scenario", scenario_path, "Scenario JSON")->required();
  solve->add_option("--model", model, "benchmark | aggregation | no_der")->capture_default_str();
  solve->add_option("--tol", tol, "KKT residual tolerance")->capture_default_str();
  solve->add_option("--output", output, "Result JSON path (default stdout)");

  dermkt::SweepOptions sweep_options;
  std::vector<std::string> sweep_models{"efficient", "no_der", "one_part"};
  std::string normalization = "opportunity";
  auto* sweep = app.add_subcommand("sweep", "Sweep prosumer capacity");
  sweep->add_option("scenario", scenario_path, "Scenario JSON")->required();
  sweep->add_option("--param", "Swept parameter")->default_val("capacity")->check(
      CLI::IsMember({"capacity"}));
  sweep->add_option("--from", sweep_options.from)->capture_default_str();
  sweep->add_option("--to", sweep_options.to)->capture_default_str();
  sweep->add_option("--steps", sweep_options.steps)->capture_default_str();
  sweep->add_option("--models", sweep_models, "efficient,no_der,one_part")->delimiter(',');
  sweep->add_option("--jobs", sweep_options.jobs, "Worker threads")->capture_default_str();
  sweep->add_option("--normalization", normalization, "opportunity | literal")
      ->capture_default_str();
  sweep->add_option("--tol", tol)->capture_default_str();
  sweep->add_option("--output", output, "CSV path (default stdout)");

  std::uint64_t seed = 1;
  dermkt::RandomScenarioShape shape;
  auto* gen = app.add_subcommand("gen-random", "Write a random valid scenario");
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--nodes", shape.nodes)->capture_default_str();
  gen->add_option("--prosumers", shape.prosumers)->capture_default_str();
  gen->add_option("--generators", shape.generators)->capture_default_str();
  gen->add_option("--output", output, "Scenario path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*validate) return cmd_validate(scenario_path);
    if (*solve) return cmd_solve(scenario_path, model, tol, output);
    if (*sweep) {
      sweep_options.solver.tol = tol;
      return cmd_sweep(scenario_path, sweep_options, sweep_models, normalization, output);
    }
    if (*gen) {
      emit(dermkt::dump_scenario(dermkt::generate_random_scenario(seed, shape)), output);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
