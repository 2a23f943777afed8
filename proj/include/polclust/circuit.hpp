#pragma once

// Variational waveplate stack: m layers, each a QWP followed by an HWP.

#include <span>
#include <string>
#include <vector>

#include "polclust/polarization.hpp"

namespace polclust {

struct Layer {
  double alpha = 0.0;  // QWP
  double beta = 0.0;   // HWP
};

class CircuitParams {
 public:
  CircuitParams() = default;
  // Angles are wrapped into [0, pi).
  explicit CircuitParams(std::vector<Layer> layers);
  // Flat layout: alpha_1, beta_1, alpha_2, beta_2, ...
  static CircuitParams from_vector(std::span<const double> theta);

  std::size_t layer_count() const { return layers_.size(); }
  std::size_t size() const { return 2 * layers_.size(); }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<double> to_vector() const;

  // Plates in application order: Q_1, H_1, Q_2, H_2, ...
  std::vector<JonesMatrix> plates() const;

  // JSON array of [alpha, beta] pairs, radians.
  std::string to_json() const;
  static CircuitParams from_json(const std::string& text);

 private:
  std::vector<Layer> layers_;
};

JonesVector run_circuit(const CircuitParams& params, const JonesVector& input);

std::vector<JonesVector> batch_states(const CircuitParams& params,
                                      std::span<const JonesVector> embedded);

// Dense row-major N x k matrix.
class FidelityMatrix {
 public:
  FidelityMatrix() = default;
  FidelityMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t a) { return data_[i * cols_ + a]; }
  double operator()(std::size_t i, std::size_t a) const { return data_[i * cols_ + a]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

FidelityMatrix fidelity_matrix(std::span<const JonesVector> states, std::span<const JonesVector> refs);

}  // namespace polclust
