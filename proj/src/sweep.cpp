#include "dermkt/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "dermkt/errors.hpp"

namespace dermkt {

SweepError::SweepError(double capacity, const std::string& cause)
    : std::runtime_error("sweep failed at capacity " + std::to_string(capacity) + ": " + cause),
      capacity_(capacity) {}

namespace {

bool wants(const SweepOptions& o, SweepModel m) {
  return std::find(o.models.begin(), o.models.end(), m) != o.models.end();
}

SweepRow evaluate_point(const Scenario& base, double capacity, const SweepOptions& o) {
  const Scenario s = with_capacity(base, capacity);
  SweepRow row;
  row.capacity = capacity;
  const bool one_part_ok = s.network.node_count() == 1 && s.prosumers.size() == 1 &&
                           s.generators.size() == 1;

  if (wants(o, SweepModel::efficient)) {
    const DispatchSolution eff = solve_aggregation(s, o.solver);
    row.welfare_efficient = eff.welfare;
    row.lambda = eff.nodal_price(0);
    row.x_efficient = eff.sell.sum();
    double fees = 0.0;
    for (const TwoPartPrice& p : two_part_prices(s, eff)) fees += p.participation_fee;
    row.P_star = fees;
  }
  if (wants(o, SweepModel::no_der)) row.welfare_no_der = solve_no_der(s, o.solver).welfare;
  if (wants(o, SweepModel::one_part) && one_part_ok) {
    const OnePartDispatch one = solve_one_part(s, o.solver);
    row.welfare_one_part = one_part_welfare(s, one, o.solver);
    if (one.equilibrium.trade_occurs) row.p_star = one.equilibrium.marginal_price;
    if (wants(o, SweepModel::efficient)) row.poag = poag(s, o.solver, o.normalization).poag;
  }
  return row;
}

std::string cell(const std::optional<double>& v) {
  if (!v) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", *v);
  return buf;
}

}  // namespace

SweepResult run_sweep(const Scenario& base, const SweepOptions& o) {
  if (o.steps < 1) throw ConfigurationError("sweep needs at least one step");
  if (o.to < o.from) throw ConfigurationError("sweep range must be ascending");
  std::vector<double> grid(static_cast<std::size_t>(o.steps));
  for (int k = 0; k < o.steps; ++k) {
    grid[static_cast<std::size_t>(k)] =
        o.steps == 1 ? o.from : o.from + (o.to - o.from) * k / (o.steps - 1);
  }

  SweepResult result;
  result.rows.resize(grid.size());
  std::vector<std::exception_ptr> errors(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) {
      try {
        result.rows[k] = evaluate_point(base, grid[k], o);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int jobs = std::clamp(o.jobs, 1, static_cast<int>(grid.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  // Report the lowest failing capacity so the error does not depend on scheduling.
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!errors[k]) continue;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const std::exception& e) {
      throw SweepError(grid[k], e.what());
    }
  }
  return result;
}

std::string to_csv(const SweepResult& result) {
  std::ostringstream out;
  out << kSweepHeader << '\n';
  for (const SweepRow& r : result.rows) {
    out << cell(r.capacity) << ',' << cell(r.welfare_efficient) << ',' << cell(r.welfare_no_der)
        << ',' << cell(r.welfare_one_part) << ',' << cell(r.poag) << ',' << cell(r.lambda) << ','
        << cell(r.x_efficient) << ',' << cell(r.P_star) << ',' << cell(r.p_star) << '\n';
  }
  return out.str();
}

namespace {

// Uniform draw rounded to 6 significant digits; the mapping from raw 64-bit
// output is fixed so files are identical across standard libraries.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double v = lo + (hi - lo) * unit;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::clamp(std::stod(buf), lo, hi);
  }

  int index(int n) { return static_cast<int>(engine_() % static_cast<std::uint64_t>(n)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

Scenario generate_random_scenario(std::uint64_t seed, const RandomScenarioShape& shape) {
  if (shape.nodes < 1 || shape.prosumers < 0 || shape.generators < 0) {
    throw ConfigurationError("random scenario needs nodes >= 1 and non-negative agent counts");
  }
  Draw draw(seed);
  Scenario s;
  const Index n = shape.nodes;
  for (Index i = 0; i < n; ++i) s.network.node_ids.push_back("n" + std::to_string(i));
  // Chain of symmetric lines: n-1 connections, two incidence rows each.
  for (Index i = 0; i + 1 < n; ++i) {
    const double cap = draw.uniform(0.0, 50.0);
    const std::string id = "l" + std::to_string(i);
    s.network.lines.push_back(Line{id, directed_incidence(n, i, i + 1), cap});
    s.network.lines.push_back(Line{id + "/rev", directed_incidence(n, i + 1, i), cap});
  }
  s.fixed_demand = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < shape.generators; ++k) {
    const Index node = k < n ? k : draw.index(static_cast<int>(n));
    const double alpha = draw.uniform(0.005, 0.05);
    const double beta = draw.uniform(0.5, 2.0);
    const double y_max = draw.uniform(200.0, 1000.0);
    s.generators.push_back(
        Generator{"g" + std::to_string(k + 1), node, quadratic_cost(alpha, beta, 0.0, y_max)});
    s.fixed_demand(node) += draw.uniform(0.0, 50.0);
  }
  for (int k = 0; k < shape.prosumers; ++k) {
    const Index node = draw.index(static_cast<int>(n));
    const double eta = draw.uniform(0.5, 3.0);
    const double c = draw.uniform(0.0, 100.0);
    s.prosumers.push_back(
        Prosumer{"p" + std::to_string(k + 1), node, c, c + 1000.0, isoelastic(eta)});
  }
  return s;
}

}  // namespace dermkt
