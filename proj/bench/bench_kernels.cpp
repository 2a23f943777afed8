// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to taste.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "polclust/clustering.hpp"
#include "polclust/datasets.hpp"
#include "polclust/embedding.hpp"
#include "polclust/kernels.hpp"
#include "polclust/landscape.hpp"

using namespace polclust;

namespace {

struct Inputs {
  PairwiseDistances dist;
  FidelityMatrix fids;
  std::vector<double> dc;
};

Inputs make_inputs(std::size_t n, int k) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10.0, 10.0), a(0.0, kPi);
  std::vector<Point2> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  std::vector<JonesVector> states(n);
  for (auto& s : states) s = prepare_state({a(rng), a(rng)});
  std::vector<double> dc(n);
  for (auto& d : dc) d = std::abs(u(rng));
  const auto refs = reference_states(k);
  return {PairwiseDistances(pts), fidelity_matrix(states, refs), dc};
}

void hamiltonian_serial(benchmark::State& st) {
  const auto in = make_inputs(static_cast<std::size_t>(st.range(0)), 4);
  for (auto _ : st)
    benchmark::DoNotOptimize(kernels::hamiltonian_serial(in.dist, in.fids, in.dc, 1.0, false));
}

void hamiltonian_parallel(benchmark::State& st) {
  const auto in = make_inputs(static_cast<std::size_t>(st.range(0)), 4);
  for (auto _ : st)
    benchmark::DoNotOptimize(kernels::hamiltonian_parallel(in.dist, in.fids, in.dc, 1.0, false));
}

void lut_serial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(build_lut_serial(0.005));
}

void lut_parallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(build_lut(0.005));
}

ClusterProblem scan_problem() {
  BlobSpec b;
  b.k = 4;
  b.n_per_blob = 50;
  ProblemOptions o;
  o.k = 4;
  return ClusterProblem(gaussian_blobs(b), o);
}

void scan_serial_20(benchmark::State& st) {
  const auto prob = scan_problem();
  ScanSpec s;
  s.base = CircuitParams({{0.3, 0.6}, {1.2, 2.0}});
  s.resolution = 20;
  auto f = [&prob](const CircuitParams& p) { return cost_value(prob, p); };
  for (auto _ : st) benchmark::DoNotOptimize(scan_serial(s, f));
}

void scan_parallel_20(benchmark::State& st) {
  const auto prob = scan_problem();
  ScanSpec s;
  s.base = CircuitParams({{0.3, 0.6}, {1.2, 2.0}});
  s.resolution = 20;
  for (auto _ : st) benchmark::DoNotOptimize(scan(s, prob));
}

}  // namespace

BENCHMARK(hamiltonian_serial)->Arg(200)->Arg(1000)->Arg(4000)->Unit(benchmark::kMicrosecond);
BENCHMARK(hamiltonian_parallel)->Arg(200)->Arg(1000)->Arg(4000)->Unit(benchmark::kMicrosecond);
BENCHMARK(lut_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(lut_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(scan_serial_20)->Unit(benchmark::kMillisecond);
BENCHMARK(scan_parallel_20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
