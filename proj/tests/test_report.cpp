#include <doctest.h>

#include <json.hpp>

#include "polclust/datasets.hpp"
#include "polclust/report.hpp"

using namespace polclust;
using nlohmann::json;

namespace {

struct Fixture {
  ClusterProblem problem;
  RunResult result;
  Fixture() : problem(make()), result(run(problem)) {}
  static ClusterProblem make() {
    BlobSpec b;
    b.n_per_blob = 8;
    return ClusterProblem(gaussian_blobs(b), ProblemOptions{});
  }
  static RunResult run(const ClusterProblem& p) {
    OptimizerConfig c;
    c.n_restarts = 2;
    c.mc_samples = 5;
    c.max_iters = 3;
    return optimize(p, c);
  }
};

}  // namespace

TEST_CASE("diagnostics json carries the run summary") {
  Fixture f;
  const auto j = json::parse(diagnostics_json(f.problem, f.result));
  CHECK(j["labels"].size() == 16);
  CHECK(j["centroids"].size() == 2);
  CHECK(j["max_fidelity"].size() == 16);
  CHECK(j["params"].size() == 2);
  CHECK(j["cost"].get<double>() == doctest::Approx(f.result.report.value));
  CHECK(j["success_ratio"].is_number());
  for (const auto& v : j["max_fidelity"]) {
    CHECK(v.get<double>() >= 0.5 - 1e-12);
    CHECK(v.get<double>() <= 1.0);
  }
}

TEST_CASE("svg outputs are well-formed enough") {
  Fixture f;
  const auto s = clusters_svg(f.problem.dataset(), f.result.report.assignment, f.result.report.centroids);
  CHECK(s.find("<svg") != std::string::npos);
  CHECK(s.rfind("</svg>") != std::string::npos);

  const auto series = restart_cost_series(f.result);
  CHECK(series.size() == 2);
  for (const auto& r : series) CHECK(r.size() == f.result.restarts[&r - series.data()].trace.records.size());
  for (bool norm : {false, true}) {
    const auto c = cost_evolution_svg(series, norm);
    CHECK(c.find("<polyline") != std::string::npos);
  }
  CHECK(cost_evolution_svg({}, true).find("</svg>") != std::string::npos);
}

TEST_CASE("heatmap and sidecar") {
  Fixture f;
  ScanSpec spec;
  spec.base = f.result.best_params;
  spec.resolution = 6;
  auto r = scan(spec, f.problem);
  r = overlay_trajectory(r, f.result.restarts[0].trace, spec.axes);
  const auto svg = heatmap_svg(r);
  CHECK(svg.find("<rect") != std::string::npos);
  const auto side = json::parse(scan_sidecar_json(spec, r));
  CHECK(side["resolution"] == 6);
  CHECK(side["periodic"] == true);
  CHECK(side["trajectories"].size() == 1);
}
