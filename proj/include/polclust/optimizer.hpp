#pragma once

// Random restarts, each a Metropolis Monte-Carlo exploration followed by
// finite-difference steepest descent with backtracking.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "polclust/circuit.hpp"
#include "polclust/clustering.hpp"

namespace polclust {

using Rng = std::mt19937_64;

struct OptimizerConfig {
  std::size_t n_restarts = 10;
  std::size_t mc_samples = 50;
  double mc_step = 0.15;
  // Unset: a tenth of the (scaled) cost at the start of each MC phase.
  std::optional<double> mc_temperature;
  double lr = 0.05;
  double fd_eps = 1e-4;
  std::size_t max_iters = 30;
  double rel_tol = 1e-4;
  std::size_t patience = 3;
  std::uint64_t seed = 1;

  // Throws InvalidArgument.
  void validate() const;
};

enum class Phase { mc, descent };
const char* to_string(Phase p);

struct TraceRecord {
  std::size_t iteration = 0;
  double cost = 0.0;
  std::vector<double> theta;
  Phase phase = Phase::descent;
};

struct Trace {
  std::vector<TraceRecord> records;

  bool empty() const { return records.empty(); }
  // Running minimum of the cost column.
  std::vector<double> best_so_far() const;
};

// Cost of a flat parameter vector. `scale` divides the cost for step-size and
// temperature purposes only; traces record unscaled values.
struct Objective {
  std::function<double(std::span<const double>)> fn;
  double scale = 1.0;

  double scaled(std::span<const double> theta) const { return fn(theta) / scale; }
};

CircuitParams random_init(std::size_t layers, Rng& rng);

// Central differences, one pair of evaluations per coordinate.
std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                std::span<const double> theta, double eps);

struct PhaseResult {
  std::vector<double> theta;
  double cost = 0.0;  // unscaled
  Trace trace;
  std::size_t iterations = 0;
};

PhaseResult monte_carlo_phase(const Objective& obj, std::span<const double> start,
                              const OptimizerConfig& cfg, Rng& rng);

PhaseResult steepest_descent(const Objective& obj, std::span<const double> start,
                             const OptimizerConfig& cfg);

struct RestartResult {
  std::vector<double> init;
  double init_cost = 0.0;
  std::vector<double> best;
  double best_cost = 0.0;
  std::size_t descent_iterations = 0;
  // MC records followed by descent records.
  Trace trace;
};

// One restart of `dim` angles; the RNG derives from (cfg.seed, index).
RestartResult run_restart(const Objective& obj, std::size_t dim, const OptimizerConfig& cfg,
                          std::size_t index);

Rng restart_rng(std::uint64_t seed, std::size_t index);

// Where the output states come from. In-process simulators that keep state
// (noise RNG, stage positions) are not thread safe.
struct Backend {
  StateSource source;
  bool thread_safe = true;
  // Smallest meaningful angle change, radians; widens fd_eps if larger.
  double min_step = 0.0;
};

struct RunResult {
  CircuitParams best_params;
  double best_cost = 0.0;
  std::size_t best_restart = 0;
  CostReport report;
  std::optional<double> success;
  std::vector<RestartResult> restarts;
};

RunResult optimize(const ClusterProblem& problem, const OptimizerConfig& cfg);
RunResult optimize(const ClusterProblem& problem, const OptimizerConfig& cfg, const Backend& backend);

// CSV: restart,iter,phase,cost,theta_0,...
std::string trace_csv(const RunResult& result);

}  // namespace polclust
