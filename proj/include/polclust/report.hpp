#pragma once

// File outputs: JSON diagnostics and hand-written SVG figures.

#include <string>
#include <vector>

#include "polclust/clustering.hpp"
#include "polclust/landscape.hpp"
#include "polclust/optimizer.hpp"

namespace polclust {

// labels, centroids, per-point max fidelity, cost, best params, success ratio.
std::string diagnostics_json(const ClusterProblem& problem, const RunResult& result);

// Feature-space scatter coloured by label, centroids as crosses.
std::string clusters_svg(const Dataset& ds, const Assignment& asg, const Centroids& c);

// One polyline per series. With `normalize`, every series is min-max scaled
// onto [0, 1] using the extremes over all series.
std::string cost_evolution_svg(const std::vector<std::vector<double>>& series, bool normalize);

// Per-restart cost sequence (MC records then descent records).
std::vector<std::vector<double>> restart_cost_series(const RunResult& result);

std::string heatmap_svg(const ScanResult& result);

std::string scan_sidecar_json(const ScanSpec& spec, const ScanResult& result);

void write_text(const std::string& path, const std::string& text);

}  // namespace polclust
