#pragma once

// Hot loops of the clustering cost. Each parallel kernel has a serial
// reference with the same contract; tests hold them to each other and the
// benchmark target compares their speed.

#include <span>
#include <vector>

#include "polclust/circuit.hpp"

namespace polclust {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Dense symmetric l2 distance matrix.
class PairwiseDistances {
 public:
  static constexpr std::size_t kMaxPoints = 10000;

  // Throws InvalidArgument beyond kMaxPoints.
  explicit PairwiseDistances(std::span<const Point2> points);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
  std::span<const double> data() const { return data_; }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

namespace kernels {

// H = 1/2 sum_ij (D_ij + lambda * dc_i) sum_a (1 - F_ia)(1 - F_ja).
// `centroid_dist[i]` is the distance from point i to its own centroid.
// With `exclude_diagonal` the i == j terms are dropped.
double hamiltonian_serial(const PairwiseDistances& dist, const FidelityMatrix& fids,
                          std::span<const double> centroid_dist, double lambda,
                          bool exclude_diagonal);

// Row sums are computed in parallel and reduced serially, so the result does
// not depend on the thread count.
double hamiltonian_parallel(const PairwiseDistances& dist, const FidelityMatrix& fids,
                            std::span<const double> centroid_dist, double lambda,
                            bool exclude_diagonal);

FidelityMatrix fidelity_matrix_parallel(std::span<const JonesVector> states,
                                        std::span<const JonesVector> refs);

}  // namespace kernels
}  // namespace polclust
