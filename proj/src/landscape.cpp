#include "polclust/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "polclust/errors.hpp"

namespace polclust {

void ScanSpec::validate() const {
  if (axes[0] == axes[1]) throw InvalidArgument("scan axes must be distinct");
  if (axes[0] >= base.size() || axes[1] >= base.size())
    throw InvalidArgument("scan axis index exceeds parameter count");
  if (resolution < 2) throw InvalidArgument("scan resolution must be at least 2");
  for (const auto& r : ranges)
    if (!std::isfinite(r[0]) || !std::isfinite(r[1]) || !(r[1] > r[0]))
      throw InvalidArgument("scan range must satisfy lo < hi");
}

bool ScanSpec::periodic() const {
  auto full = [](const std::array<double, 2>& r) { return std::abs((r[1] - r[0]) - kPi) < 1e-12; };
  return full(ranges[0]) && full(ranges[1]);
}

std::vector<double> ScanSpec::grid(std::size_t axis) const {
  std::vector<double> g(resolution);
  const double step = (ranges[axis][1] - ranges[axis][0]) / static_cast<double>(resolution);
  for (std::size_t i = 0; i < resolution; ++i) g[i] = ranges[axis][0] + step * static_cast<double>(i);
  return g;
}

namespace {

ScanResult prepare(const ScanSpec& spec) {
  spec.validate();
  ScanResult r;
  r.grid_u = spec.grid(0);
  r.grid_v = spec.grid(1);
  r.periodic = spec.periodic();
  r.cost.assign(spec.resolution * spec.resolution, 0.0);
  return r;
}

double node_cost(const ScanSpec& spec, const ScanResult& r, std::span<const double> base,
                 std::size_t idx, const ParamCost& f) {
  std::vector<double> theta(base.begin(), base.end());
  theta[spec.axes[0]] = r.grid_u[idx / spec.resolution];
  theta[spec.axes[1]] = r.grid_v[idx % spec.resolution];
  return f(CircuitParams::from_vector(theta));
}

}  // namespace

ScanResult scan(const ScanSpec& spec, const ParamCost& f) {
  ScanResult r = prepare(spec);
  const auto base = spec.base.to_vector();
  const auto total = static_cast<std::ptrdiff_t>(r.cost.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t idx = 0; idx < total; ++idx)
    r.cost[idx] = node_cost(spec, r, base, static_cast<std::size_t>(idx), f);
  return r;
}

ScanResult scan_serial(const ScanSpec& spec, const ParamCost& f) {
  ScanResult r = prepare(spec);
  const auto base = spec.base.to_vector();
  for (std::size_t idx = 0; idx < r.cost.size(); ++idx) r.cost[idx] = node_cost(spec, r, base, idx, f);
  return r;
}

ScanResult scan(const ScanSpec& spec, const ClusterProblem& problem) {
  if (spec.base.layer_count() != problem.layers())
    throw InvalidArgument("scan base parameters do not match the problem's layer count");
  return scan(spec, [&problem](const CircuitParams& p) { return cost_value(problem, p); });
}

ScanResult overlay_trajectory(ScanResult result, const Trace& trace, std::array<std::size_t, 2> axes) {
  if (trace.empty()) return result;
  std::vector<OverlayPoint> path;
  path.reserve(trace.records.size());
  for (const auto& rec : trace.records) {
    if (axes[0] >= rec.theta.size() || axes[1] >= rec.theta.size())
      throw InvalidArgument("trace does not cover the overlay axes");
    path.push_back({rec.theta[axes[0]], rec.theta[axes[1]], rec.cost});
  }
  result.trajectories.push_back(std::move(path));
  return result;
}

std::vector<GridNode> find_local_minima(const ScanResult& result) {
  const std::size_t rows = result.rows();
  const std::size_t cols = result.cols();
  if (rows < 3 || cols < 3) throw InvalidArgument("local minima need at least a 3x3 grid");
  std::vector<GridNode> out;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double c = result.at(i, j);
      bool strict = true;
      for (int di = -1; di <= 1 && strict; ++di) {
        for (int dj = -1; dj <= 1 && strict; ++dj) {
          if (di == 0 && dj == 0) continue;
          auto ni = static_cast<std::ptrdiff_t>(i) + di;
          auto nj = static_cast<std::ptrdiff_t>(j) + dj;
          if (result.periodic) {
            ni = (ni + static_cast<std::ptrdiff_t>(rows)) % static_cast<std::ptrdiff_t>(rows);
            nj = (nj + static_cast<std::ptrdiff_t>(cols)) % static_cast<std::ptrdiff_t>(cols);
          } else if (ni < 0 || nj < 0 || ni >= static_cast<std::ptrdiff_t>(rows) ||
                     nj >= static_cast<std::ptrdiff_t>(cols)) {
            continue;
          }
          if (!(c < result.at(ni, nj))) strict = false;
        }
      }
      if (strict) out.push_back({i, j, c});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const GridNode& a, const GridNode& b) { return a.cost < b.cost; });
  return out;
}

std::string scan_csv(const ScanResult& result) {
  std::ostringstream out;
  out << std::setprecision(12);
  for (std::size_t i = 0; i < result.rows(); ++i) {
    for (std::size_t j = 0; j < result.cols(); ++j) {
      if (j) out << ',';
      out << result.at(i, j);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace polclust
