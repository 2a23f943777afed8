#pragma once

// Cost over a 2-D slice of parameter space, with optional trajectory overlays.

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "polclust/circuit.hpp"
#include "polclust/optimizer.hpp"

namespace polclust {

struct ScanSpec {
  CircuitParams base;
  std::array<std::size_t, 2> axes{0, 1};
  // Half-open [lo, hi); node i sits at lo + i * (hi - lo) / resolution.
  std::array<std::array<double, 2>, 2> ranges{{{0.0, kPi}, {0.0, kPi}}};
  std::size_t resolution = 100;

  // Throws InvalidArgument.
  void validate() const;
  bool periodic() const;
  std::vector<double> grid(std::size_t axis) const;
};

struct OverlayPoint {
  double u = 0.0;
  double v = 0.0;
  double cost = 0.0;
};

struct ScanResult {
  std::vector<double> grid_u;  // rows
  std::vector<double> grid_v;  // columns
  std::vector<double> cost;    // row-major, grid_u.size() x grid_v.size()
  bool periodic = false;
  std::vector<std::vector<OverlayPoint>> trajectories;

  std::size_t rows() const { return grid_u.size(); }
  std::size_t cols() const { return grid_v.size(); }
  double at(std::size_t i, std::size_t j) const { return cost[i * grid_v.size() + j]; }
};

using ParamCost = std::function<double(const CircuitParams&)>;

// Nodes are evaluated concurrently; `f` must be safe for concurrent calls.
ScanResult scan(const ScanSpec& spec, const ParamCost& f);
ScanResult scan_serial(const ScanSpec& spec, const ParamCost& f);
ScanResult scan(const ScanSpec& spec, const ClusterProblem& problem);

ScanResult overlay_trajectory(ScanResult result, const Trace& trace, std::array<std::size_t, 2> axes);

struct GridNode {
  std::size_t i = 0;
  std::size_t j = 0;
  double cost = 0.0;
};

// Nodes strictly below every neighbor (8-neighborhood, wrapping when the scan
// is periodic), ascending by cost. Throws InvalidArgument below 3x3.
std::vector<GridNode> find_local_minima(const ScanResult& result);

std::string scan_csv(const ScanResult& result);

}  // namespace polclust
