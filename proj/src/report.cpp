#include "polclust/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace polclust {

using nlohmann::json;

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

const char* colour(int label) { return kPalette[static_cast<std::size_t>(label) % 8]; }

std::string svg_open(double w, double h) {
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
    << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  return s.str();
}

// Linear map of [lo, hi] onto [a, b]; the midpoint for an empty range.
double lerp(double v, double lo, double hi, double a, double b) {
  if (!(hi > lo)) return 0.5 * (a + b);
  return a + (v - lo) / (hi - lo) * (b - a);
}

// Blue -> yellow ramp.
std::string ramp(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(68 + t * (253 - 68)));
  const int g = static_cast<int>(std::lround(1 + t * (231 - 1)));
  const int b = static_cast<int>(std::lround(84 + t * (37 - 84)));
  std::ostringstream s;
  s << '#' << std::hex << std::setfill('0') << std::setw(2) << r << std::setw(2) << g << std::setw(2) << b;
  return s.str();
}

}  // namespace

std::string diagnostics_json(const ClusterProblem& problem, const RunResult& result) {
  const auto& rep = result.report;
  json j;
  j["cost"] = rep.value;
  j["best_cost"] = result.best_cost;
  j["best_restart"] = result.best_restart;
  j["k"] = problem.k();
  j["lambda"] = problem.lambda();
  j["layers"] = problem.layers();
  j["labels"] = rep.assignment.labels;
  json cents = json::array();
  for (const auto& c : rep.centroids.points) cents.push_back({c.x, c.y});
  j["centroids"] = cents;
  j["centroid_counts"] = rep.centroids.counts;
  j["reseeded_clusters"] = rep.centroids.reseeded;
  std::vector<double> max_fid(rep.fidelities.rows());
  for (std::size_t i = 0; i < rep.fidelities.rows(); ++i) {
    const auto row = rep.fidelities.row(i);
    max_fid[i] = *std::max_element(row.begin(), row.end());
  }
  j["max_fidelity"] = max_fid;
  json params = json::array();
  for (const auto& l : result.best_params.layers()) params.push_back({l.alpha, l.beta});
  j["params"] = params;
  j["success_ratio"] = result.success ? json(*result.success) : json(nullptr);
  j["embedding_flagged"] = rep.embedding_flagged;
  j["clamped_points"] = problem.clamped_count();
  return j.dump(2);
}

std::string clusters_svg(const Dataset& ds, const Assignment& asg, const Centroids& c) {
  constexpr double W = 480, H = 480, pad = 30;
  const auto& b = ds.bounds();
  const double span = std::max(b.x_hi - b.x_lo, b.y_hi - b.y_lo);
  const double cx = 0.5 * (b.x_lo + b.x_hi);
  const double cy = 0.5 * (b.y_lo + b.y_hi);
  auto px = [&](double x) { return lerp(x, cx - span / 2, cx + span / 2, pad, W - pad); };
  auto py = [&](double y) { return lerp(y, cy - span / 2, cy + span / 2, H - pad, pad); };

  std::ostringstream s;
  s << svg_open(W, H) << std::setprecision(6);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    s << "<circle cx=\"" << px(ds[i].x) << "\" cy=\"" << py(ds[i].y) << "\" r=\"3\" fill=\""
      << colour(asg.labels[i]) << "\" fill-opacity=\"0.8\"/>\n";
  }
  for (std::size_t a = 0; a < c.points.size(); ++a) {
    const double x = px(c.points[a].x);
    const double y = py(c.points[a].y);
    s << "<path d=\"M" << x - 6 << ' ' << y - 6 << " L" << x + 6 << ' ' << y + 6 << " M" << x - 6 << ' '
      << y + 6 << " L" << x + 6 << ' ' << y - 6 << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::vector<std::vector<double>> restart_cost_series(const RunResult& result) {
  std::vector<std::vector<double>> out;
  for (const auto& r : result.restarts) {
    std::vector<double> costs;
    for (const auto& rec : r.trace.records) costs.push_back(rec.cost);
    out.push_back(std::move(costs));
  }
  return out;
}

std::string cost_evolution_svg(const std::vector<std::vector<double>>& series, bool normalize) {
  constexpr double W = 560, H = 360, pad = 40;
  double lo = INFINITY, hi = -INFINITY;
  std::size_t longest = 1;
  for (const auto& s : series) {
    for (double v : s) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    longest = std::max(longest, s.size());
  }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  const double y_lo = normalize ? 0.0 : lo;
  const double y_hi = normalize ? 1.0 : hi;

  std::ostringstream s;
  s << svg_open(W, H) << std::setprecision(6);
  s << "<path d=\"M" << pad << ' ' << pad << " L" << pad << ' ' << H - pad << " L" << W - pad << ' '
    << H - pad << "\" stroke=\"black\" fill=\"none\"/>\n";
  s << "<text x=\"" << pad << "\" y=\"" << pad - 8 << "\" font-size=\"12\">"
    << (normalize ? "cost (normalized)" : "cost") << "</text>\n";
  s << "<text x=\"" << W - pad << "\" y=\"" << H - pad + 24 << "\" font-size=\"12\" text-anchor=\"end\">"
    << "iteration</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (series[k].empty()) continue;
    s << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << colour(static_cast<int>(k))
      << "\" points=\"";
    for (std::size_t i = 0; i < series[k].size(); ++i) {
      double v = series[k][i];
      if (normalize) v = lerp(v, lo, hi, 0.0, 1.0);
      s << (i ? " " : "") << lerp(static_cast<double>(i), 0.0, static_cast<double>(longest - 1), pad, W - pad)
        << ',' << lerp(v, y_lo, y_hi, H - pad, pad);
    }
    s << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string heatmap_svg(const ScanResult& result) {
  constexpr double W = 520, H = 520, pad = 40;
  const std::size_t rows = result.rows();
  const std::size_t cols = result.cols();
  const auto [mn, mx] = std::minmax_element(result.cost.begin(), result.cost.end());
  const double lo = result.cost.empty() ? 0.0 : *mn;
  const double hi = result.cost.empty() ? 1.0 : *mx;
  const double cell_w = (W - 2 * pad) / static_cast<double>(std::max<std::size_t>(rows, 1));
  const double cell_h = (H - 2 * pad) / static_cast<double>(std::max<std::size_t>(cols, 1));

  std::ostringstream s;
  s << svg_open(W, H) << std::setprecision(6);
  // Rows (first axis) run left to right, columns (second axis) bottom to top.
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      s << "<rect x=\"" << pad + static_cast<double>(i) * cell_w << "\" y=\""
        << H - pad - static_cast<double>(j + 1) * cell_h << "\" width=\"" << cell_w + 0.05
        << "\" height=\"" << cell_h + 0.05 << "\" fill=\"" << ramp(lerp(result.at(i, j), lo, hi, 0.0, 1.0)) << "\"/>\n";
    }
  }
  if (!result.grid_u.empty() && !result.grid_v.empty()) {
    const double u0 = result.grid_u.front();
    const double u1 = result.grid_u.back() + (rows > 1 ? result.grid_u[1] - result.grid_u[0] : 1.0);
    const double v0 = result.grid_v.front();
    const double v1 = result.grid_v.back() + (cols > 1 ? result.grid_v[1] - result.grid_v[0] : 1.0);
    for (std::size_t t = 0; t < result.trajectories.size(); ++t) {
      const auto& path = result.trajectories[t];
      if (path.empty()) continue;
      s << "<polyline fill=\"none\" stroke=\"white\" stroke-width=\"1.5\" points=\"";
      for (std::size_t p = 0; p < path.size(); ++p)
        s << (p ? " " : "") << lerp(path[p].u, u0, u1, pad, W - pad) << ','
          << lerp(path[p].v, v0, v1, H - pad, pad);
      s << "\"/>\n";
      s << "<circle cx=\"" << lerp(path.back().u, u0, u1, pad, W - pad) << "\" cy=\""
        << lerp(path.back().v, v0, v1, H - pad, pad) << "\" r=\"4\" fill=\"" << colour(static_cast<int>(t))
        << "\" stroke=\"white\"/>\n";
    }
  }
  s << "</svg>\n";
  return s.str();
}

std::string scan_sidecar_json(const ScanSpec& spec, const ScanResult& result) {
  json j;
  j["axes"] = {spec.axes[0], spec.axes[1]};
  j["ranges"] = {{spec.ranges[0][0], spec.ranges[0][1]}, {spec.ranges[1][0], spec.ranges[1][1]}};
  j["resolution"] = spec.resolution;
  j["periodic"] = result.periodic;
  json base = json::array();
  for (const auto& l : spec.base.layers()) base.push_back({l.alpha, l.beta});
  j["base_params"] = base;
  json trajectories = json::array();
  for (const auto& path : result.trajectories) {
    json p = json::array();
    for (const auto& pt : path) p.push_back({pt.u, pt.v, pt.cost});
    trajectories.push_back(p);
  }
  j["trajectories"] = trajectories;
  return j.dump(2);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace polclust
