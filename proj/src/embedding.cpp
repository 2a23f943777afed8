#include "polclust/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "polclust/errors.hpp"

namespace polclust {

Dataset::Dataset(std::vector<DataPoint> points) : points_(std::move(points)) {
  if (points_.empty()) throw InvalidArgument("dataset must not be empty");
  bounds_ = {points_[0].x, points_[0].x, points_[0].y, points_[0].y};
  for (const auto& p : points_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      throw InvalidArgument("dataset features must be finite");
    bounds_.x_lo = std::min(bounds_.x_lo, p.x);
    bounds_.x_hi = std::max(bounds_.x_hi, p.x);
    bounds_.y_lo = std::min(bounds_.y_lo, p.y);
    bounds_.y_hi = std::max(bounds_.y_hi, p.y);
  }
}

bool Dataset::has_labels() const {
  return std::all_of(points_.begin(), points_.end(),
                     [](const DataPoint& p) { return p.true_label.has_value(); });
}

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(points_.size());
  for (const auto& p : points_) {
    if (!p.true_label) throw EvaluationUnavailable("dataset has no ground-truth labels");
    out.push_back(*p.true_label);
  }
  return out;
}

namespace {

// Fraction of the way through [lo, hi], clamped; 0.5 on a degenerate axis.
double unit_coordinate(double v, double lo, double hi, bool degenerate, bool& clamped) {
  if (degenerate) {
    if (v != lo) clamped = true;
    return 0.5;
  }
  double f = (v - lo) / (hi - lo);
  if (f < 0.0 || f > 1.0) {
    clamped = true;
    f = std::clamp(f, 0.0, 1.0);
  }
  return f;
}

}  // namespace

SphereAngles EmbeddingMap::to_sphere(double x, double y, bool* clamped) const {
  bool c = false;
  const double fx = unit_coordinate(x, bounds.x_lo, bounds.x_hi, x_degenerate, c);
  const double fy = unit_coordinate(y, bounds.y_lo, bounds.y_hi, y_degenerate, c);
  const double tx = margin + fx * (1.0 - 2.0 * margin);
  const double ty = margin + fy * (1.0 - 2.0 * margin);
  if (clamped) *clamped = c;
  return {window.psi_lo + tx * (window.psi_hi - window.psi_lo),
          window.chi_lo + ty * (window.chi_hi - window.chi_lo)};
}

EmbeddingMap fit_embedding(const Dataset& dataset, double margin, const SphereWindow& window) {
  if (!(margin >= 0.0 && margin < 0.5)) throw InvalidArgument("margin must lie in [0, 0.5)");
  if (!(window.psi_lo > 0.0 && window.psi_lo < window.psi_hi && window.psi_hi < kPi))
    throw InvalidArgument("psi window must lie strictly inside (0, pi)");
  if (!(window.chi_lo > -kPi / 4 && window.chi_lo < window.chi_hi && window.chi_hi < kPi / 4))
    throw InvalidArgument("chi window must lie strictly inside (-pi/4, pi/4)");
  EmbeddingMap map;
  map.bounds = dataset.bounds();
  map.window = window;
  map.margin = margin;
  map.x_degenerate = !(map.bounds.x_hi > map.bounds.x_lo);
  map.y_degenerate = !(map.bounds.y_hi > map.bounds.y_lo);
  return map;
}

PlateAngles sphere_to_plates(const SphereAngles& target) {
  // Q(alpha)|h> has orientation alpha and ellipticity alpha; the HWP then
  // mirrors orientation about beta and flips handedness.
  const double alpha = target.chi;
  const double beta = 0.5 * (target.psi + target.chi);
  return {wrap_angle(alpha), wrap_angle(beta)};
}

JonesVector prepare_state(const PlateAngles& plates) {
  return apply(hwp(plates.beta), apply(qwp(plates.alpha), horizontal()));
}

LookUpTable::LookUpTable(double resolution, std::size_t n_psi, std::size_t n_chi,
                         std::vector<Entry> entries)
    : resolution_(resolution), n_psi_(n_psi), n_chi_(n_chi), entries_(std::move(entries)) {
  if (!(resolution > 0.0)) throw InvalidArgument("LUT resolution must be positive");
  if (entries_.size() != n_psi_ * n_chi_ || entries_.empty())
    throw InvalidArgument("LUT entry count does not match its grid");
}

namespace {

std::pair<std::size_t, std::size_t> lut_dims(double resolution) {
  if (!(resolution > 0.0) || !(resolution <= 0.1))
    throw InvalidArgument("LUT resolution must lie in (0, 0.1]");
  return {static_cast<std::size_t>(std::ceil(kPi / resolution)),
          static_cast<std::size_t>(std::ceil((kPi / 2) / resolution))};
}

LookUpTable::Entry lut_node(double resolution, std::size_t i, std::size_t j) {
  const SphereAngles key{static_cast<double>(i) * resolution,
                         -kPi / 4 + static_cast<double>(j) * resolution};
  return {key, sphere_to_plates(key)};
}

}  // namespace

LookUpTable build_lut(double resolution) {
  const auto [n_psi, n_chi] = lut_dims(resolution);
  std::vector<LookUpTable::Entry> entries(n_psi * n_chi);
  const auto total = static_cast<std::ptrdiff_t>(entries.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t idx = 0; idx < total; ++idx) {
    const auto u = static_cast<std::size_t>(idx);
    entries[u] = lut_node(resolution, u / n_chi, u % n_chi);
  }
  return LookUpTable(resolution, n_psi, n_chi, std::move(entries));
}

LookUpTable build_lut_serial(double resolution) {
  const auto [n_psi, n_chi] = lut_dims(resolution);
  std::vector<LookUpTable::Entry> entries;
  entries.reserve(n_psi * n_chi);
  for (std::size_t i = 0; i < n_psi; ++i)
    for (std::size_t j = 0; j < n_chi; ++j) entries.push_back(lut_node(resolution, i, j));
  return LookUpTable(resolution, n_psi, n_chi, std::move(entries));
}

PlateAngles lut_lookup(const LookUpTable& lut, const SphereAngles& target) {
  const double res = lut.resolution();
  const std::size_t n_psi = lut.n_psi();
  const std::size_t n_chi = lut.n_chi();

  const double psi = wrap_angle(target.psi);
  auto lo_psi = static_cast<std::size_t>(std::floor(psi / res));
  if (lo_psi >= n_psi) lo_psi = n_psi - 1;
  const std::size_t hi_psi = (lo_psi + 1) % n_psi;
  auto psi_dist = [&](std::size_t i) {
    const double d = std::abs(psi - static_cast<double>(i) * res);
    return std::min(d, kPi - d);
  };
  const double d_lo = psi_dist(lo_psi);
  const double d_hi = psi_dist(hi_psi);
  std::size_t i_psi = lo_psi;
  if (d_hi < d_lo || (d_hi == d_lo && hi_psi < lo_psi)) i_psi = hi_psi;

  const double u = (target.chi + kPi / 4) / res;
  std::size_t i_chi;
  if (u <= 0.0) {
    i_chi = 0;
  } else {
    auto lo = static_cast<std::size_t>(std::floor(u));
    if (lo >= n_chi - 1) {
      i_chi = n_chi - 1;
    } else {
      const double frac = u - static_cast<double>(lo);
      i_chi = frac > 0.5 ? lo + 1 : lo;
    }
  }
  return lut.at(i_psi, i_chi).plates;
}

void LookUpTable::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "psi,chi,alpha,beta\n" << std::setprecision(12);
  for (const auto& e : entries_)
    out << e.key.psi << ',' << e.key.chi << ',' << e.plates.alpha << ',' << e.plates.beta << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

LookUpTable LookUpTable::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(1, "empty LUT file");
  if (line != "psi,chi,alpha,beta") throw ParseError(1, "expected header psi,chi,alpha,beta");
  std::vector<Entry> entries;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    double v[4];
    char sep;
    if (!(row >> v[0] >> sep >> v[1] >> sep >> v[2] >> sep >> v[3]))
      throw ParseError(line_no, "expected four numeric columns");
    entries.push_back({{v[0], v[1]}, {v[2], v[3]}});
  }
  if (entries.size() < 2) throw ParseError(line_no, "LUT needs at least two rows");
  std::size_t n_chi = 1;
  while (n_chi < entries.size() && entries[n_chi].key.psi == entries[0].key.psi) ++n_chi;
  if (entries.size() % n_chi != 0) throw ParseError(line_no, "LUT rows do not form a grid");
  const double resolution = entries[1].key.chi - entries[0].key.chi;
  const std::size_t n_psi = entries.size() / n_chi;
  return LookUpTable(resolution, n_psi, n_chi, std::move(entries));
}

Embedded embed(const EmbeddingMap& map, const DataPoint& p, EmbedMode mode,
               const LookUpTable* lut) {
  Embedded out;
  out.target = map.to_sphere(p.x, p.y, &out.clamped);
  if (mode == EmbedMode::lut) {
    if (!lut) throw InvalidArgument("lut embedding requested without a look-up table");
    out.plates = lut_lookup(*lut, out.target);
  } else {
    out.plates = sphere_to_plates(out.target);
  }
  out.state = prepare_state(out.plates);
  return out;
}

}  // namespace polclust
