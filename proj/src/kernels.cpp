#include "polclust/kernels.hpp"

#include <cmath>

#include "polclust/errors.hpp"

namespace polclust {

PairwiseDistances::PairwiseDistances(std::span<const Point2> points) : n_(points.size()) {
  if (n_ > kMaxPoints)
    throw InvalidArgument("pairwise distance matrix limited to " + std::to_string(kMaxPoints) +
                          " points");
  data_.assign(n_ * n_, 0.0);
  const auto n = static_cast<std::ptrdiff_t>(n_);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      data_[i * n + j] = std::hypot(points[i].x - points[j].x, points[i].y - points[j].y);
    }
  }
}

namespace kernels {

double hamiltonian_serial(const PairwiseDistances& dist, const FidelityMatrix& fids,
                          std::span<const double> centroid_dist, double lambda,
                          bool exclude_diagonal) {
  const std::size_t n = fids.rows();
  const std::size_t k = fids.cols();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (exclude_diagonal && i == j) continue;
      double overlap = 0.0;
      for (std::size_t a = 0; a < k; ++a) overlap += (1.0 - fids(i, a)) * (1.0 - fids(j, a));
      total += (dist(i, j) + lambda * centroid_dist[i]) * overlap;
    }
  }
  return 0.5 * total;
}

double hamiltonian_parallel(const PairwiseDistances& dist, const FidelityMatrix& fids,
                            std::span<const double> centroid_dist, double lambda,
                            bool exclude_diagonal) {
  const std::size_t n = fids.rows();
  const std::size_t k = fids.cols();

  // miss(i, a) = 1 - F_ia; column sums feed the centroid term in O(N k).
  std::vector<double> miss(n * k);
  for (std::size_t i = 0; i < n * k; ++i) miss[i] = 1.0 - fids.data()[i];
  std::vector<double> miss_sum(k, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < k; ++a) miss_sum[a] += miss[i * k + a];

  std::vector<double> rows(n);
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t si = 0; si < sn; ++si) {
    const auto i = static_cast<std::size_t>(si);
    const double* mi = miss.data() + i * k;
    const auto drow = dist.row(i);
    double pair = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double* mj = miss.data() + j * k;
      double overlap = 0.0;
      for (std::size_t a = 0; a < k; ++a) overlap += mi[a] * mj[a];
      pair += drow[j] * overlap;
    }
    double self = 0.0;
    double diag = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      self += mi[a] * miss_sum[a];
      diag += mi[a] * mi[a];
    }
    if (exclude_diagonal) self -= diag;
    rows[i] = pair + lambda * centroid_dist[i] * self;
  }
  double total = 0.0;
  for (double r : rows) total += r;
  return 0.5 * total;
}

FidelityMatrix fidelity_matrix_parallel(std::span<const JonesVector> states,
                                        std::span<const JonesVector> refs) {
  FidelityMatrix f(states.size(), refs.size());
  const auto n = static_cast<std::ptrdiff_t>(states.size());
#pragma omp parallel for schedule(static) if (n > 2048)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < refs.size(); ++a) f(i, a) = fidelity(states[i], refs[a]);
  return f;
}

}  // namespace kernels
}  // namespace polclust
