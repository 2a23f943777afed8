#include "polclust/datasets.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <json.hpp>

#include "polclust/errors.hpp"

namespace polclust {

void BlobSpec::validate() const {
  if (k < 1) throw InvalidArgument("blob count must be at least 1");
  if (n_per_blob < 1) throw InvalidArgument("points per blob must be at least 1");
  if (!(d_over_sigma > 0.0) || !std::isfinite(d_over_sigma))
    throw InvalidArgument("d/sigma must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("sigma must be positive");
}

std::vector<Point2> blob_centers(const BlobSpec& spec) {
  spec.validate();
  const double d = spec.d_over_sigma * spec.sigma;
  std::vector<Point2> centers;
  if (spec.k == 1) return {Point2{0.0, 0.0}};
  if (spec.layout == BlobLayout::ring) {
    const double radius = d / (2.0 * std::sin(kPi / spec.k));
    for (int a = 0; a < spec.k; ++a) {
      const double t = 2.0 * kPi * a / spec.k;
      centers.push_back({radius * std::cos(t), radius * std::sin(t)});
    }
  } else {
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(spec.k))));
    for (int a = 0; a < spec.k; ++a) centers.push_back({d * (a % cols), d * (a / cols)});
  }
  return centers;
}

Dataset gaussian_blobs(const BlobSpec& spec) {
  const auto centers = blob_centers(spec);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.sigma);
  std::vector<DataPoint> points;
  points.reserve(centers.size() * spec.n_per_blob);
  for (int a = 0; a < spec.k; ++a) {
    for (std::size_t i = 0; i < spec.n_per_blob; ++i) {
      const double dx = noise(rng);
      const double dy = noise(rng);
      points.push_back({centers[a].x + dx, centers[a].y + dy, a});
    }
  }
  return Dataset(std::move(points));
}

std::string dataset_csv(const Dataset& ds) {
  std::ostringstream out;
  const bool labeled = ds.has_labels();
  out << (labeled ? "x,y,label\n" : "x,y\n") << std::setprecision(12);
  for (const auto& p : ds.points()) {
    out << p.x << ',' << p.y;
    if (labeled) out << ',' << *p.true_label;
    out << '\n';
  }
  return out.str();
}

void save_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << dataset_csv(ds);
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, std::size_t line_no) {
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end || cell.empty())
    throw ParseError(line_no, "not a number: '" + cell + "'");
  return v;
}

}  // namespace

Dataset parse_dataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    header = split(line);
    break;
  }
  if (header.empty()) throw ParseError(std::max<std::size_t>(line_no, 1), "empty dataset file");

  const bool labeled = header.back() == "label";
  const std::size_t features = header.size() - (labeled ? 1 : 0);
  if (features > 2) throw UnsupportedDimension(features);
  if (features < 2 || header[0] != "x" || header[1] != "y")
    throw ParseError(line_no, "expected header x,y[,label]");

  std::vector<DataPoint> points;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto cells = split(line);
    if (cells.size() != header.size())
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " columns, got " +
                                    std::to_string(cells.size()));
    DataPoint p{parse_number(cells[0], line_no), parse_number(cells[1], line_no), std::nullopt};
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ParseError(line_no, "non-finite feature");
    if (labeled) {
      const double l = parse_number(cells[2], line_no);
      if (l < 0 || l != std::floor(l)) throw ParseError(line_no, "label must be a non-negative integer");
      p.true_label = static_cast<int>(l);
    }
    points.push_back(p);
  }
  if (points.empty()) throw ParseError(line_no, "dataset has no rows");
  return Dataset(std::move(points));
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str());
}

std::string blob_metadata_json(const BlobSpec& spec) {
  nlohmann::json j;
  j["k"] = spec.k;
  j["n_per_blob"] = spec.n_per_blob;
  j["d_over_sigma"] = spec.d_over_sigma;
  j["sigma"] = spec.sigma;
  j["layout"] = spec.layout == BlobLayout::ring ? "ring" : "grid";
  j["seed"] = spec.seed;
  return j.dump(2);
}

}  // namespace polclust
