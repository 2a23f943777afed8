#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "polclust/embedding.hpp"
#include "polclust/errors.hpp"

using namespace polclust;

namespace {

Dataset square() {
  return Dataset({{-2.0, 1.0, 0}, {4.0, 1.0, 0}, {-2.0, 5.0, 1}, {4.0, 5.0, 1}, {1.0, 3.0, 0}});
}

// Sphere-angle error with psi compared modulo pi.
double angle_error(const SphereAngles& a, const SphereAngles& b) {
  double dpsi = std::abs(a.psi - b.psi);
  dpsi = std::min(dpsi, kPi - dpsi);
  return std::hypot(dpsi, a.chi - b.chi);
}

SphereAngles forward(const PlateAngles& p) {
  return stokes_to_sphere(jones_to_stokes(prepare_state(p)));
}

}  // namespace

TEST_CASE("dataset validation") {
  CHECK_THROWS_AS(Dataset({}), InvalidArgument);
  CHECK_THROWS_AS(Dataset({{NAN, 0.0, {}}}), InvalidArgument);
  const auto ds = square();
  CHECK(ds.bounds().x_lo == -2.0);
  CHECK(ds.bounds().y_hi == 5.0);
  Dataset unlabeled({{0, 0, {}}, {1, 1, 0}});
  CHECK_FALSE(unlabeled.has_labels());
  CHECK_THROWS_AS(unlabeled.labels(), EvaluationUnavailable);
}

TEST_CASE("fit_embedding maps the box onto the window") {
  const auto ds = square();
  const SphereWindow w;
  const double m = 0.05;
  const auto map = fit_embedding(ds, m);
  const double psi_lo = w.psi_lo + m * (w.psi_hi - w.psi_lo);
  const double psi_hi = w.psi_hi - m * (w.psi_hi - w.psi_lo);
  const double chi_lo = w.chi_lo + m * (w.chi_hi - w.chi_lo);
  const double chi_hi = w.chi_hi - m * (w.chi_hi - w.chi_lo);

  auto lo = map.to_sphere(-2.0, 1.0);
  auto hi = map.to_sphere(4.0, 5.0);
  CHECK(lo.psi == doctest::Approx(psi_lo).epsilon(1e-14));
  CHECK(lo.chi == doctest::Approx(chi_lo).epsilon(1e-14));
  CHECK(hi.psi == doctest::Approx(psi_hi).epsilon(1e-14));
  CHECK(hi.chi == doctest::Approx(chi_hi).epsilon(1e-14));

  const auto mid = map.to_sphere(1.0, 3.0);
  CHECK(mid.psi == doctest::Approx(0.5 * (w.psi_lo + w.psi_hi)).epsilon(1e-14));
  CHECK(mid.chi == doctest::Approx(0.0).epsilon(1e-14));

  double prev = -1.0;
  for (double x = -2.0; x <= 4.0; x += 0.5) {
    const double psi = map.to_sphere(x, 2.0).psi;
    CHECK(psi > prev);
    prev = psi;
  }
}

TEST_CASE("fit_embedding rejects bad windows and margins") {
  const auto ds = square();
  CHECK_THROWS_AS(fit_embedding(ds, 0.5), InvalidArgument);
  CHECK_THROWS_AS(fit_embedding(ds, -0.1), InvalidArgument);
  CHECK_THROWS_AS(fit_embedding(ds, 0.05, SphereWindow{0.0, 1.0, -0.1, 0.1}), InvalidArgument);
  CHECK_THROWS_AS(fit_embedding(ds, 0.05, SphereWindow{0.1, 1.0, -kPi / 4, 0.1}), InvalidArgument);
}

TEST_CASE("degenerate axis maps to the window midpoint") {
  Dataset flat({{0.0, 2.0, {}}, {1.0, 2.0, {}}, {3.0, 2.0, {}}});
  const auto map = fit_embedding(flat);
  CHECK(map.y_degenerate);
  CHECK_FALSE(map.x_degenerate);
  CHECK(map.degenerate());
  CHECK(map.to_sphere(1.0, 2.0).chi == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("out-of-bounds points are clamped and flagged") {
  const auto map = fit_embedding(square());
  bool clamped = false;
  const auto a = map.to_sphere(100.0, 3.0, &clamped);
  CHECK(clamped);
  CHECK(a.psi == doctest::Approx(map.to_sphere(4.0, 3.0).psi));
  const auto e = embed(map, {-50.0, 3.0, {}});
  CHECK(e.clamped);
  CHECK_FALSE(embed(map, {0.0, 3.0, {}}).clamped);
}

TEST_CASE("sphere_to_plates special targets") {
  const auto h = sphere_to_plates({0.0, 0.0});
  CHECK(h.alpha == 0.0);
  CHECK(h.beta == 0.0);
  CHECK(fidelity(prepare_state(h), horizontal()) == doctest::Approx(1.0).epsilon(1e-15));

  const auto v = sphere_to_plates({kPi / 2, 0.0});
  CHECK(fidelity(prepare_state(v), vertical()) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sphere_to_plates agrees with a dense grid search") {
  // Brute force over (alpha, beta) at 0.001 rad on the oracle's own plates,
  // looking for vertical light.
  const SphereAngles target{kPi / 2, 0.0};
  double best_err = INFINITY;
  double best_alpha = 0, best_beta = 0;
  const oracle::Vec h{1.0, 0.0};
  for (int ia = 0; ia < 3142; ++ia) {
    const double a = 0.001 * ia;
    const auto after_q = oracle::matvec(oracle::quarter_wave(a), h);
    for (int ib = 0; ib < 3142; ++ib) {
      const double b = 0.001 * ib;
      const auto ang = oracle::angles(oracle::matvec(oracle::half_wave(b), after_q));
      double dpsi = std::abs(ang[0] - target.psi);
      dpsi = std::min(dpsi, kPi - dpsi);
      const double err = std::hypot(dpsi, ang[1] - target.chi);
      if (err < best_err) {
        best_err = err;
        best_alpha = a;
        best_beta = b;
      }
    }
  }
  CHECK(best_err < 5e-3);
  const auto closed = sphere_to_plates(target);
  CHECK(angle_error(forward(closed), target) < 1e-9);
  // The grid optimum's output agrees with the closed form's output.
  CHECK(angle_error(forward({best_alpha, best_beta}), forward(closed)) < 5e-3);
}

TEST_CASE("sphere_to_plates round trip over random targets") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> psi(0.0, kPi), chi(-kPi / 4 + 1e-6, kPi / 4 - 1e-6);
  for (int t = 0; t < 1000; ++t) {
    const SphereAngles s{psi(rng), chi(rng)};
    const auto p = sphere_to_plates(s);
    CHECK(p.alpha >= 0.0);
    CHECK(p.alpha < kPi);
    CHECK(p.beta >= 0.0);
    CHECK(p.beta < kPi);
    CHECK(angle_error(forward(p), s) < 1e-9);
  }
}

TEST_CASE("build_lut grid dimensions and node round trip") {
  CHECK_THROWS_AS(build_lut(0.0), InvalidArgument);
  CHECK_THROWS_AS(build_lut(-0.01), InvalidArgument);
  CHECK_THROWS_AS(build_lut(0.2), InvalidArgument);

  const auto lut = build_lut(0.01);
  CHECK(lut.n_psi() == static_cast<std::size_t>(std::ceil(kPi / 0.01)));
  CHECK(lut.n_chi() == static_cast<std::size_t>(std::ceil((kPi / 2) / 0.01)));
  CHECK(lut.n_psi() == 315);
  CHECK(lut.n_chi() == 158);

  for (const auto& e : lut.entries()) {
    const auto s = jones_to_stokes(prepare_state(e.plates));
    const auto key = sphere_to_stokes(e.key);
    const double d = std::sqrt(std::pow(s.s1 - key.s1, 2) + std::pow(s.s2 - key.s2, 2) +
                               std::pow(s.s3 - key.s3, 2));
    // One cell on the sphere spans at most 2 * resolution of arc.
    REQUIRE(d < 2 * lut.resolution());
  }
}

TEST_CASE("parallel and serial LUT builds are identical") {
  const auto a = build_lut(0.02);
  const auto b = build_lut_serial(0.02);
  REQUIRE(a.entries().size() == b.entries().size());
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    CHECK(a.entries()[i].plates.alpha == b.entries()[i].plates.alpha);
    CHECK(a.entries()[i].plates.beta == b.entries()[i].plates.beta);
  }
}

TEST_CASE("lut_lookup") {
  const auto lut = build_lut(0.01);
  const auto& node = lut.at(40, 70);
  const auto hit = lut_lookup(lut, node.key);
  CHECK(hit.alpha == node.plates.alpha);
  CHECK(hit.beta == node.plates.beta);

  // Strictly inside the cell (40..41, 70..71): result is one of its corners.
  const SphereAngles inside{lut.at(40, 70).key.psi + 0.0037, lut.at(40, 70).key.chi + 0.0061};
  const auto got = lut_lookup(lut, inside);
  bool corner = false;
  for (std::size_t i : {40u, 41u})
    for (std::size_t j : {70u, 71u})
      corner |= lut.at(i, j).plates.alpha == got.alpha && lut.at(i, j).plates.beta == got.beta;
  CHECK(corner);
  CHECK(got.alpha == lut.at(40, 71).plates.alpha);
  CHECK(got.beta == lut.at(40, 71).plates.beta);

  // Exact psi midpoint (binary-exact resolution) goes to the smaller index.
  const auto coarse = build_lut(0.0625);
  const SphereAngles tie{40 * 0.0625 + 0.03125, coarse.at(0, 5).key.chi};
  const auto t = lut_lookup(coarse, tie);
  CHECK(t.beta == coarse.at(40, 5).plates.beta);
  CHECK(t.beta != coarse.at(41, 5).plates.beta);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> psi(0.0, kPi), chi(-kPi / 4 + 0.02, kPi / 4 - 0.02);
  const double half_diag = lut.resolution() * std::sqrt(2.0) / 2.0;
  for (int n = 0; n < 2000; ++n) {
    const SphereAngles s{psi(rng), chi(rng)};
    const auto p = lut_lookup(lut, s);
    CHECK(angle_error(forward(p), s) <= half_diag + 1e-9);
  }
}

TEST_CASE("LUT CSV round trip") {
  const auto lut = build_lut(0.05);
  const auto path = (std::filesystem::temp_directory_path() / "polclust_lut_test.csv").string();
  lut.save_csv(path);
  const auto back = LookUpTable::load_csv(path);
  CHECK(back.n_psi() == lut.n_psi());
  CHECK(back.n_chi() == lut.n_chi());
  CHECK(back.resolution() == doctest::Approx(lut.resolution()).epsilon(1e-10));
  for (std::size_t i = 0; i < lut.entries().size(); ++i) {
    CHECK(back.entries()[i].plates.alpha == doctest::Approx(lut.entries()[i].plates.alpha).epsilon(1e-11));
    CHECK(back.entries()[i].key.chi == doctest::Approx(lut.entries()[i].key.chi).epsilon(1e-11));
  }
  std::FILE* f = std::fopen(path.c_str(), "r");
  char header[64] = {};
  REQUIRE(std::fgets(header, sizeof header, f));
  std::fclose(f);
  CHECK(std::string(header) == "psi,chi,alpha,beta\n");
  std::filesystem::remove(path);
}

TEST_CASE("embed") {
  const auto ds = square();
  const auto map = fit_embedding(ds);
  const SphereWindow w;
  const auto mid = embed(map, {1.0, 3.0, {}});
  const SphereAngles want{0.5 * (w.psi_lo + w.psi_hi), 0.5 * (w.chi_lo + w.chi_hi)};
  CHECK(angle_error(stokes_to_sphere(jones_to_stokes(mid.state)), want) < 1e-9);

  const auto a = embed(map, ds[1]);
  const auto b = embed(map, ds[1]);
  CHECK(a.state.ex == b.state.ex);
  CHECK(a.state.ey == b.state.ey);

  CHECK_THROWS_AS(embed(map, ds[0], EmbedMode::lut), InvalidArgument);

  const auto lut = build_lut(0.005);
  const double cell_diag = lut.resolution() * std::sqrt(2.0);
  const double floor_fid = std::pow(std::cos(cell_diag), 2);
  for (const auto& p : ds.points()) {
    const auto exact = embed(map, p);
    const auto table = embed(map, p, EmbedMode::lut, &lut);
    CHECK(fidelity(exact.state, table.state) >= floor_fid);
  }
}

TEST_CASE("distinct interior points map to distinguishable states") {
  const auto map = fit_embedding(square());
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> x(-2.0, 4.0), y(1.0, 5.0);
  for (int t = 0; t < 500; ++t) {
    const DataPoint p{x(rng), y(rng), {}}, q{x(rng), y(rng), {}};
    const auto sp = map.to_sphere(p.x, p.y), sq = map.to_sphere(q.x, q.y);
    if (angle_error(sp, sq) > 1e-9) CHECK(fidelity(embed(map, p).state, embed(map, q).state) < 1.0);
  }
}
