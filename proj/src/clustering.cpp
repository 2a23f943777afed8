#include "polclust/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polclust/errors.hpp"

namespace polclust {

namespace {

JonesVector from_direction(double n1, double n2, double n3) {
  return stokes_to_jones({1.0, n1, n2, n3});
}

std::vector<Point2> to_points(const Dataset& ds) {
  std::vector<Point2> out;
  out.reserve(ds.size());
  for (const auto& p : ds.points()) out.push_back({p.x, p.y});
  return out;
}

}  // namespace

std::vector<JonesVector> reference_states(int k) {
  if (k < 1 || k > kMaxClusters) throw UnsupportedK(k);
  const double c120 = -0.5;
  const double s120 = std::sqrt(3.0) / 2.0;
  switch (k) {
    case 1:
      return {horizontal()};
    case 2:
      return {horizontal(), vertical()};
    case 3:
      return {horizontal(), from_direction(c120, s120, 0.0), from_direction(c120, -s120, 0.0)};
    case 4: {
      const double third = -1.0 / 3.0;
      return {horizontal(), from_direction(third, std::sqrt(8.0) / 3.0, 0.0),
              from_direction(third, -std::sqrt(2.0) / 3.0, std::sqrt(2.0 / 3.0)),
              from_direction(third, -std::sqrt(2.0) / 3.0, -std::sqrt(2.0 / 3.0))};
    }
    case 5:
      return {horizontal(), from_direction(c120, s120, 0.0), from_direction(c120, -s120, 0.0),
              from_direction(0.0, 0.0, 1.0), from_direction(0.0, 0.0, -1.0)};
    default:
      return {horizontal(),
              vertical(),
              from_direction(0.0, 1.0, 0.0),
              from_direction(0.0, -1.0, 0.0),
              from_direction(0.0, 0.0, 1.0),
              from_direction(0.0, 0.0, -1.0)};
  }
}

Assignment assign(const FidelityMatrix& fids) {
  Assignment asg;
  asg.labels.resize(fids.rows());
  for (std::size_t i = 0; i < fids.rows(); ++i) {
    const auto row = fids.row(i);
    // max_element keeps the first of equal maxima.
    asg.labels[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return asg;
}

Centroids centroids(const Dataset& dataset, const Assignment& asg, int k) {
  if (asg.labels.size() != dataset.size())
    throw InvalidArgument("assignment length does not match dataset");
  Centroids c;
  c.points.assign(k, Point2{});
  c.counts.assign(k, 0);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int a = asg.labels[i];
    if (a < 0 || a >= k) throw InvalidArgument("assignment label out of range");
    c.points[a].x += dataset[i].x;
    c.points[a].y += dataset[i].y;
    ++c.counts[a];
  }
  for (int a = 0; a < k; ++a) {
    if (c.counts[a] == 0) continue;
    c.points[a].x /= static_cast<double>(c.counts[a]);
    c.points[a].y /= static_cast<double>(c.counts[a]);
  }

  std::vector<bool> taken(dataset.size(), false);
  for (int a = 0; a < k; ++a) {
    if (c.counts[a] != 0) continue;
    c.reseeded.push_back(a);
    double best = -1.0;
    std::size_t pick = dataset.size();
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      const int own = asg.labels[i];
      if (taken[i] || c.counts[own] < 2) continue;
      const double d = std::hypot(dataset[i].x - c.points[own].x, dataset[i].y - c.points[own].y);
      if (d > best) {
        best = d;
        pick = i;
      }
    }
    if (pick < dataset.size()) {
      taken[pick] = true;
      c.points[a] = {dataset[pick].x, dataset[pick].y};
    } else {
      c.points[a] = {0.5 * (dataset.bounds().x_lo + dataset.bounds().x_hi),
                     0.5 * (dataset.bounds().y_lo + dataset.bounds().y_hi)};
    }
  }
  return c;
}

ClusterProblem::ClusterProblem(Dataset dataset, const ProblemOptions& options, const LookUpTable* lut)
    : dataset_(std::move(dataset)),
      options_(options),
      refs_(reference_states(options.k)),
      map_(fit_embedding(dataset_, options.margin, options.window)),
      features_(to_points(dataset_)),
      dist_(features_) {
  if (!(options_.lambda >= 0.0) || !std::isfinite(options_.lambda))
    throw InvalidArgument("lambda must be finite and non-negative");
  embedded_.reserve(dataset_.size());
  states_.reserve(dataset_.size());
  for (const auto& p : dataset_.points()) {
    embedded_.push_back(embed(map_, p, options_.mode, lut));
    states_.push_back(embedded_.back().state);
    if (embedded_.back().clamped) ++clamped_;
  }
  double total = 0.0;
  for (double d : dist_.data()) total += d;
  scale_ = total > 0.0 ? 0.5 * total : 1.0;
}

CostReport cost_from_states(const ClusterProblem& problem, std::span<const JonesVector> states) {
  if (states.size() != problem.dataset().size())
    throw InvalidArgument("state count does not match dataset");
  CostReport r;
  r.fidelities = kernels::fidelity_matrix_parallel(states, problem.refs());
  r.assignment = assign(r.fidelities);
  r.centroids = centroids(problem.dataset(), r.assignment, problem.k());
  const auto& ds = problem.dataset();
  std::vector<double> centroid_dist(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Point2& c = r.centroids.points[r.assignment.labels[i]];
    centroid_dist[i] = std::hypot(ds[i].x - c.x, ds[i].y - c.y);
  }
  r.value = kernels::hamiltonian_parallel(problem.distances(), r.fidelities, centroid_dist,
                                          problem.lambda(), problem.options().exclude_diagonal);
  r.embedding_flagged = problem.clamped_count() > 0 || problem.embedding().degenerate();
  return r;
}

CostReport cost(const ClusterProblem& problem, const CircuitParams& params) {
  const auto states = batch_states(params, problem.embedded_states());
  return cost_from_states(problem, states);
}

double cost_value(const ClusterProblem& problem, const CircuitParams& params) {
  return cost(problem, params).value;
}

StateSource ideal_source(const ClusterProblem& problem) {
  return [&problem](const CircuitParams& params) {
    return batch_states(params, problem.embedded_states());
  };
}

double success_ratio(const Assignment& asg, std::span<const int> truth) {
  if (truth.empty() || truth.size() != asg.labels.size())
    throw EvaluationUnavailable("ground-truth labels unavailable for every point");
  int classes = 0;
  for (int t : truth) {
    if (t < 0) throw EvaluationUnavailable("negative ground-truth label");
    classes = std::max(classes, t + 1);
  }
  for (int l : asg.labels) classes = std::max(classes, l + 1);
  if (classes > kMaxClusters + 2) throw InvalidArgument("too many labels for permutation search");

  std::vector<std::size_t> confusion(classes * classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) ++confusion[asg.labels[i] * classes + truth[i]];

  std::vector<int> perm(classes);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hits = 0;
    for (int p = 0; p < classes; ++p) hits += confusion[p * classes + perm[p]];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(truth.size());
}

}  // namespace polclust
