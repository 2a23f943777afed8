#include "polclust/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "polclust/errors.hpp"

namespace polclust {

void OptimizerConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (n_restarts == 0) throw InvalidArgument("n_restarts must be positive");
  if (!positive(mc_step)) throw InvalidArgument("mc_step must be positive");
  if (mc_temperature && !positive(*mc_temperature))
    throw InvalidArgument("mc_temperature must be positive");
  if (!positive(lr)) throw InvalidArgument("lr must be positive");
  if (!positive(fd_eps) || fd_eps > 0.1) throw InvalidArgument("fd_eps must lie in (0, 0.1]");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InvalidArgument("rel_tol must lie in (0, 1)");
  if (patience < 1) throw InvalidArgument("patience must be at least 1");
}

const char* to_string(Phase p) { return p == Phase::mc ? "mc" : "descent"; }

std::vector<double> Trace::best_so_far() const {
  std::vector<double> out;
  out.reserve(records.size());
  double best = INFINITY;
  for (const auto& r : records) {
    best = std::min(best, r.cost);
    out.push_back(best);
  }
  return out;
}

CircuitParams random_init(std::size_t layers, Rng& rng) {
  if (layers == 0) throw InvalidArgument("random_init needs at least one layer");
  std::uniform_real_distribution<double> angle(0.0, kPi);
  std::vector<double> theta(2 * layers);
  for (auto& t : theta) t = angle(rng);
  return CircuitParams::from_vector(theta);
}

std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                std::span<const double> theta, double eps) {
  if (!(eps > 0.0 && eps <= 0.1)) throw InvalidArgument("fd_eps must lie in (0, 0.1]");
  std::vector<double> probe(theta.begin(), theta.end());
  std::vector<double> grad(theta.size());
  for (std::size_t j = 0; j < theta.size(); ++j) {
    probe[j] = theta[j] + eps;
    const double up = f(probe);
    probe[j] = theta[j] - eps;
    const double down = f(probe);
    probe[j] = theta[j];
    grad[j] = (up - down) / (2.0 * eps);
  }
  return grad;
}

namespace {

void wrap_all(std::vector<double>& theta) {
  for (auto& t : theta) t = wrap_angle(t);
}

}  // namespace

PhaseResult monte_carlo_phase(const Objective& obj, std::span<const double> start,
                              const OptimizerConfig& cfg, Rng& rng) {
  PhaseResult out;
  std::vector<double> current(start.begin(), start.end());
  wrap_all(current);
  double current_raw = obj.fn(current);
  double current_scaled = current_raw / obj.scale;
  out.theta = current;
  out.cost = current_raw;
  out.trace.records.push_back({0, current_raw, current, Phase::mc});

  const double temperature =
      cfg.mc_temperature ? *cfg.mc_temperature : std::max(std::abs(current_scaled) / 10.0, 1e-300);
  std::normal_distribution<double> step(0.0, cfg.mc_step);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> proposal(current.size());
  for (std::size_t s = 1; s <= cfg.mc_samples; ++s) {
    for (std::size_t j = 0; j < current.size(); ++j) proposal[j] = wrap_angle(current[j] + step(rng));
    const double raw = obj.fn(proposal);
    const double delta = raw / obj.scale - current_scaled;
    // Draw unconditionally so the stream does not depend on cost values.
    const double u = unit(rng);
    if (delta <= 0.0 || u < std::exp(-delta / temperature)) {
      current = proposal;
      current_raw = raw;
      current_scaled = raw / obj.scale;
    }
    if (raw < out.cost) {
      out.cost = raw;
      out.theta = proposal;
    }
    out.trace.records.push_back({s, current_raw, current, Phase::mc});
  }
  out.iterations = cfg.mc_samples;
  return out;
}

PhaseResult steepest_descent(const Objective& obj, std::span<const double> start,
                             const OptimizerConfig& cfg) {
  constexpr int kMaxHalvings = 8;
  PhaseResult out;
  std::vector<double> theta(start.begin(), start.end());
  wrap_all(theta);
  double raw = obj.fn(theta);
  out.trace.records.push_back({0, raw, theta, Phase::descent});

  auto scaled = [&obj](std::span<const double> t) { return obj.scaled(t); };
  std::size_t calm = 0;
  std::vector<double> trial(theta.size());
  std::size_t it = 1;
  for (; it <= cfg.max_iters; ++it) {
    const auto grad = fd_gradient(scaled, theta, cfg.fd_eps);
    double step = cfg.lr;
    double rel = 0.0;
    for (int h = 0; h <= kMaxHalvings; ++h, step *= 0.5) {
      for (std::size_t j = 0; j < theta.size(); ++j) trial[j] = wrap_angle(theta[j] - step * grad[j]);
      const double trial_raw = obj.fn(trial);
      if (trial_raw <= raw) {
        rel = (raw - trial_raw) / std::max(std::abs(raw), 1e-300);
        theta = trial;
        raw = trial_raw;
        break;
      }
    }
    out.trace.records.push_back({it, raw, theta, Phase::descent});
    calm = rel < cfg.rel_tol ? calm + 1 : 0;
    if (calm >= cfg.patience) break;
  }
  out.iterations = std::min(it, cfg.max_iters);
  out.theta = theta;
  out.cost = raw;
  return out;
}

Rng restart_rng(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

RestartResult run_restart(const Objective& obj, std::size_t dim, const OptimizerConfig& cfg,
                          std::size_t index) {
  if (dim == 0 || dim % 2 != 0) throw InvalidArgument("parameter count must be even and positive");
  Rng rng = restart_rng(cfg.seed, index);
  RestartResult r;
  r.init = random_init(dim / 2, rng).to_vector();

  auto mc = monte_carlo_phase(obj, r.init, cfg, rng);
  r.init_cost = mc.trace.records.front().cost;
  auto descent = steepest_descent(obj, mc.theta, cfg);
  r.descent_iterations = descent.iterations;

  r.trace = std::move(mc.trace);
  r.trace.records.insert(r.trace.records.end(), descent.trace.records.begin(),
                         descent.trace.records.end());
  const auto best = std::min_element(r.trace.records.begin(), r.trace.records.end(),
                                     [](const TraceRecord& a, const TraceRecord& b) {
                                       return a.cost < b.cost;
                                     });
  r.best = best->theta;
  r.best_cost = best->cost;
  return r;
}

RunResult optimize(const ClusterProblem& problem, const OptimizerConfig& cfg) {
  return optimize(problem, cfg, Backend{ideal_source(problem), true, 0.0});
}

RunResult optimize(const ClusterProblem& problem, const OptimizerConfig& cfg, const Backend& backend) {
  cfg.validate();
  if (problem.layers() == 0) throw InvalidArgument("optimize needs at least one layer");
  OptimizerConfig run_cfg = cfg;
  run_cfg.fd_eps = std::min(0.1, std::max(cfg.fd_eps, backend.min_step));

  Objective obj;
  obj.fn = [&problem, &backend](std::span<const double> theta) {
    const auto states = backend.source(CircuitParams::from_vector(theta));
    return cost_from_states(problem, states).value;
  };
  obj.scale = problem.cost_scale();

  const std::size_t dim = 2 * problem.layers();
  RunResult result;
  result.restarts.resize(cfg.n_restarts);
  const auto n = static_cast<std::ptrdiff_t>(cfg.n_restarts);
  if (backend.thread_safe) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t r = 0; r < n; ++r) result.restarts[r] = run_restart(obj, dim, run_cfg, r);
  } else {
    for (std::ptrdiff_t r = 0; r < n; ++r) result.restarts[r] = run_restart(obj, dim, run_cfg, r);
  }

  for (std::size_t r = 0; r < result.restarts.size(); ++r) {
    if (r == 0 || result.restarts[r].best_cost < result.best_cost) {
      result.best_cost = result.restarts[r].best_cost;
      result.best_restart = r;
    }
  }
  result.best_params = CircuitParams::from_vector(result.restarts[result.best_restart].best);
  result.report = cost_from_states(problem, backend.source(result.best_params));
  if (problem.dataset().has_labels())
    result.success = success_ratio(result.report.assignment, problem.dataset().labels());
  return result;
}

std::string trace_csv(const RunResult& result) {
  std::ostringstream out;
  out << std::setprecision(12);
  const std::size_t dim = result.best_params.size();
  out << "restart,iter,phase,cost";
  for (std::size_t j = 0; j < dim; ++j) out << ",theta_" << j;
  out << '\n';
  for (std::size_t r = 0; r < result.restarts.size(); ++r) {
    for (const auto& rec : result.restarts[r].trace.records) {
      out << r << ',' << rec.iteration << ',' << to_string(rec.phase) << ',' << rec.cost;
      for (double t : rec.theta) out << ',' << t;
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace polclust
