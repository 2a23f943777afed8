#include <doctest.h>

#include "polclust/datasets.hpp"
#include "polclust/errors.hpp"
#include "polclust/landscape.hpp"

using namespace polclust;

namespace {

ClusterProblem four_blobs(std::size_t n = 10) {
  BlobSpec b;
  b.k = 4;
  b.n_per_blob = n;
  b.seed = 2;
  ProblemOptions o;
  o.k = 4;
  return ClusterProblem(gaussian_blobs(b), o);
}

ScanResult synthetic(std::size_t n, const std::function<double(std::size_t, std::size_t)>& f, bool periodic) {
  ScanResult r;
  for (std::size_t i = 0; i < n; ++i) {
    r.grid_u.push_back(static_cast<double>(i));
    r.grid_v.push_back(static_cast<double>(i));
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r.cost.push_back(f(i, j));
  r.periodic = periodic;
  return r;
}

}  // namespace

TEST_CASE("scan spec validation") {
  ScanSpec s;
  s.base = CircuitParams({{0, 0}, {0, 0}});
  CHECK_NOTHROW(s.validate());
  s.axes = {1, 1};
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s.axes = {0, 4};
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s.axes = {0, 1};
  s.resolution = 1;
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s.resolution = 4;
  s.ranges[0] = {1.0, 1.0};
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
}

TEST_CASE("2x2 scan matches direct cost calls") {
  const auto prob = four_blobs();
  ScanSpec s;
  s.base = CircuitParams({{0.3, 0.9}, {1.7, 2.2}});
  s.axes = {1, 2};
  s.resolution = 2;
  const auto r = scan(s, prob);
  REQUIRE(r.rows() == 2);
  REQUIRE(r.cols() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      auto theta = s.base.to_vector();
      theta[1] = r.grid_u[i];
      theta[2] = r.grid_v[j];
      CHECK(r.at(i, j) == cost_value(prob, CircuitParams::from_vector(theta)));
    }
  }
}

TEST_CASE("scan is pure, periodic and equal to its serial reference") {
  const auto prob = four_blobs();
  ScanSpec s;
  s.base = CircuitParams({{0.5, 0.1}, {2.0, 1.0}});
  s.resolution = 12;
  auto f = [&prob](const CircuitParams& p) { return cost_value(prob, p); };
  const auto a = scan(s, f);
  const auto b = scan(s, f);
  const auto c = scan_serial(s, f);
  CHECK(a.cost == b.cost);
  CHECK(a.cost == c.cost);
  CHECK(a.periodic);
  for (double v : a.cost) CHECK(v >= 0.0);

  // Row at u = pi (the wrapped continuation of row 0).
  for (std::size_t j = 0; j < a.cols(); ++j) {
    auto theta = s.base.to_vector();
    theta[0] = kPi;
    theta[1] = a.grid_v[j];
    CHECK(std::abs(cost_value(prob, CircuitParams::from_vector(theta)) - a.at(0, j)) <= 1e-10 * a.at(0, j));
  }
}

TEST_CASE("scan rejects an axis beyond the parameter count") {
  const auto prob = four_blobs();
  ScanSpec s;
  s.base = CircuitParams({{0, 0}, {0, 0}});
  s.axes = {0, 7};
  CHECK_THROWS_AS(scan(s, prob), InvalidArgument);
}

TEST_CASE("overlay_trajectory") {
  ScanResult r = synthetic(4, [](std::size_t i, std::size_t j) { return double(i + j); }, false);
  const auto before = r.cost;
  CHECK(overlay_trajectory(r, Trace{}, {0, 1}).trajectories.empty());

  Trace t;
  t.records.push_back({0, 5.0, {0.1, 0.2, 0.3, 0.4}, Phase::descent});
  const auto one = overlay_trajectory(r, t, {2, 0});
  REQUIRE(one.trajectories.size() == 1);
  REQUIRE(one.trajectories[0].size() == 1);
  CHECK(one.trajectories[0][0].u == 0.3);
  CHECK(one.trajectories[0][0].v == 0.1);
  CHECK(one.trajectories[0][0].cost == 5.0);
  CHECK(one.cost == before);
  CHECK_THROWS_AS(overlay_trajectory(r, t, {0, 9}), InvalidArgument);
}

TEST_CASE("find_local_minima on synthetic surfaces") {
  CHECK(find_local_minima(synthetic(5, [](auto, auto) { return 1.0; }, true)).empty());

  const auto bowl = synthetic(7, [](std::size_t i, std::size_t j) {
    return (double(i) - 3) * (double(i) - 3) + (double(j) - 2) * (double(j) - 2);
  }, false);
  const auto m = find_local_minima(bowl);
  REQUIRE(m.size() == 1);
  CHECK(m[0].i == 3);
  CHECK(m[0].j == 2);

  // Corner minimum survives the wrap.
  const auto corner = synthetic(5, [](std::size_t i, std::size_t j) { return double(i + j); }, false);
  CHECK(find_local_minima(corner).size() == 1);
  const auto wrapped = synthetic(5, [](std::size_t i, std::size_t j) { return double(i + j); }, true);
  CHECK(find_local_minima(wrapped).size() == 1);

  CHECK_THROWS_AS(find_local_minima(synthetic(2, [](auto, auto) { return 0.0; }, false)), InvalidArgument);
}

TEST_CASE("reported minima beat every neighbour") {
  const auto prob = four_blobs();
  ScanSpec s;
  s.base = CircuitParams({{0.0, 0.0}, {0.0, 0.0}});
  s.resolution = 24;
  const auto r = scan(s, prob);
  const auto minima = find_local_minima(r);
  const std::size_t n = r.rows();
  for (std::size_t q = 0; q < minima.size(); ++q) {
    if (q) CHECK(minima[q - 1].cost <= minima[q].cost);
    for (std::size_t di = 0; di < 3; ++di)
      for (std::size_t dj = 0; dj < 3; ++dj) {
        if (di == 1 && dj == 1) continue;
        const std::size_t i = (minima[q].i + n + di - 1) % n;
        const std::size_t j = (minima[q].j + n + dj - 1) % n;
        CHECK(minima[q].cost < r.at(i, j));
      }
  }
}

TEST_CASE("scan csv has one line per row") {
  const auto r = synthetic(3, [](std::size_t i, std::size_t j) { return double(3 * i + j); }, false);
  CHECK(scan_csv(r) == "0,1,2\n3,4,5\n6,7,8\n");
}
