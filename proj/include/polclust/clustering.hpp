#pragma once

// Clustering cost over fidelities with fixed per-cluster reference states.
// Assignments and centroids are recomputed from the candidate parameters on
// every evaluation.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "polclust/circuit.hpp"
#include "polclust/embedding.hpp"
#include "polclust/kernels.hpp"

namespace polclust {

inline constexpr int kMaxClusters = 6;

// k = 1..6: |h>, antipodes, equatorial triangle, tetrahedron, triangular
// bipyramid, octahedron. The first state is always |h>.
std::vector<JonesVector> reference_states(int k);

struct Assignment {
  std::vector<int> labels;
};

struct Centroids {
  std::vector<Point2> points;
  std::vector<std::size_t> counts;
  // Clusters that were empty and got a farthest-point centroid.
  std::vector<int> reseeded;
};

// Row-wise argmax, ties to the lowest index.
Assignment assign(const FidelityMatrix& fids);

Centroids centroids(const Dataset& dataset, const Assignment& asg, int k);

struct ProblemOptions {
  int k = 2;
  double lambda = 1.0;
  std::size_t layers = 2;
  EmbedMode mode = EmbedMode::analytic;
  bool exclude_diagonal = false;
  double margin = 0.05;
  SphereWindow window{};
};

class ClusterProblem {
 public:
  // `lut` is required for EmbedMode::lut and must outlive the problem.
  ClusterProblem(Dataset dataset, const ProblemOptions& options, const LookUpTable* lut = nullptr);

  const Dataset& dataset() const { return dataset_; }
  const ProblemOptions& options() const { return options_; }
  int k() const { return options_.k; }
  double lambda() const { return options_.lambda; }
  std::size_t layers() const { return options_.layers; }
  const std::vector<JonesVector>& refs() const { return refs_; }
  const EmbeddingMap& embedding() const { return map_; }
  const std::vector<Embedded>& embedded() const { return embedded_; }
  const std::vector<JonesVector>& embedded_states() const { return states_; }
  const PairwiseDistances& distances() const { return dist_; }
  std::span<const Point2> features() const { return features_; }
  std::size_t clamped_count() const { return clamped_; }

  // Half the sum of all pairwise distances; a dataset constant the optimizer
  // divides by so step sizes do not scale with N.
  double cost_scale() const { return scale_; }

 private:
  Dataset dataset_;
  ProblemOptions options_;
  std::vector<JonesVector> refs_;
  EmbeddingMap map_;
  std::vector<Embedded> embedded_;
  std::vector<JonesVector> states_;
  std::vector<Point2> features_;
  PairwiseDistances dist_;
  std::size_t clamped_ = 0;
  double scale_ = 1.0;
};

struct CostReport {
  double value = 0.0;
  Assignment assignment;
  Centroids centroids;
  FidelityMatrix fidelities;
  bool embedding_flagged = false;
};

// Cost for states already produced by the circuit (ideal or measured).
CostReport cost_from_states(const ClusterProblem& problem, std::span<const JonesVector> states);
CostReport cost(const ClusterProblem& problem, const CircuitParams& params);
double cost_value(const ClusterProblem& problem, const CircuitParams& params);

// Produces the output states for every data point under given parameters.
using StateSource = std::function<std::vector<JonesVector>(const CircuitParams&)>;
StateSource ideal_source(const ClusterProblem& problem);

// Best agreement over all relabelings of the predicted clusters.
// Throws EvaluationUnavailable when truth is missing or sizes differ.
double success_ratio(const Assignment& asg, std::span<const int> truth);

}  // namespace polclust
