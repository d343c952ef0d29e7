#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dermkt {

// Argument outside the mathematical domain of a function (z <= 0, lambda <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A marginal price above the wholesale price lets the prosumer buy at lambda
// and resell at p without bound.
class ArbitrageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input shape the requested computation does not support.
class ConfigurationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}

  int iterations() const { return iterations_; }
  double best_residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario file could not be parsed, or parsed into an invalid scenario.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what, std::vector<std::string> violations = {})
      : std::runtime_error(what), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

}  // namespace dermkt
