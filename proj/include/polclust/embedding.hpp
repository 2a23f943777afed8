#pragma once

// Feature space -> Poincare sphere -> preparation plate angles (Q_in, H_in).

#include <optional>
#include <string>
#include <vector>

#include "polclust/polarization.hpp"

namespace polclust {

struct DataPoint {
  double x = 0.0;
  double y = 0.0;
  std::optional<int> true_label;
};

struct Bounds {
  double x_lo = 0.0, x_hi = 0.0;
  double y_lo = 0.0, y_hi = 0.0;
};

class Dataset {
 public:
  // Throws InvalidArgument on an empty list or non-finite features.
  explicit Dataset(std::vector<DataPoint> points);

  const std::vector<DataPoint>& points() const { return points_; }
  const DataPoint& operator[](std::size_t i) const { return points_[i]; }
  std::size_t size() const { return points_.size(); }
  const Bounds& bounds() const { return bounds_; }
  bool has_labels() const;
  // Throws EvaluationUnavailable if any point lacks a label.
  std::vector<int> labels() const;

 private:
  std::vector<DataPoint> points_;
  Bounds bounds_;
};

struct PlateAngles {
  double alpha = 0.0;  // QWP fast axis, [0, pi)
  double beta = 0.0;   // HWP fast axis, [0, pi)
};

struct SphereWindow {
  double psi_lo = 0.05 * kPi;
  double psi_hi = 0.95 * kPi;
  double chi_lo = -0.2;
  double chi_hi = 0.2;
};

struct EmbeddingMap {
  Bounds bounds;
  SphereWindow window;
  double margin = 0.05;
  bool x_degenerate = false;
  bool y_degenerate = false;

  // Affine map of the feature box onto the window shrunk by `margin` on each
  // side. Points outside the box are clamped; `clamped` reports that.
  SphereAngles to_sphere(double x, double y, bool* clamped = nullptr) const;
  bool degenerate() const { return x_degenerate || y_degenerate; }
};

EmbeddingMap fit_embedding(const Dataset& dataset, double margin = 0.05,
                           const SphereWindow& window = {});

// Closed-form preparation angles: H(beta) Q(alpha) |h> lands on `target`.
PlateAngles sphere_to_plates(const SphereAngles& target);

// H(beta) Q(alpha) |h>.
JonesVector prepare_state(const PlateAngles& plates);

class LookUpTable {
 public:
  struct Entry {
    SphereAngles key;
    PlateAngles plates;
  };

  LookUpTable(double resolution, std::size_t n_psi, std::size_t n_chi, std::vector<Entry> entries);

  double resolution() const { return resolution_; }
  std::size_t n_psi() const { return n_psi_; }
  std::size_t n_chi() const { return n_chi_; }
  const std::vector<Entry>& entries() const { return entries_; }
  // Row-major: psi index outer, chi index inner.
  const Entry& at(std::size_t i_psi, std::size_t i_chi) const {
    return entries_[i_psi * n_chi_ + i_chi];
  }

  void save_csv(const std::string& path) const;
  static LookUpTable load_csv(const std::string& path);

 private:
  double resolution_;
  std::size_t n_psi_;
  std::size_t n_chi_;
  std::vector<Entry> entries_;
};

// Nodes at psi = i * res (i < ceil(pi / res)) and chi = -pi/4 + j * res
// (j < ceil((pi/2) / res)). Built in parallel; output is schedule-independent.
LookUpTable build_lut(double resolution = 0.005);
LookUpTable build_lut_serial(double resolution = 0.005);

// Nearest node (psi wraps with period pi); ties go to the smaller index.
PlateAngles lut_lookup(const LookUpTable& lut, const SphereAngles& target);

enum class EmbedMode { analytic, lut };

struct Embedded {
  JonesVector state;
  PlateAngles plates;
  SphereAngles target;
  bool clamped = false;
};

// Throws InvalidArgument for lut mode without a table.
Embedded embed(const EmbeddingMap& map, const DataPoint& p, EmbedMode mode = EmbedMode::analytic,
               const LookUpTable* lut = nullptr);

}  // namespace polclust
