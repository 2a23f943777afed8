#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's numerical paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Mat = std::array<cplx, 4>;  // row-major 2x2
using Vec = std::array<cplx, 2>;

inline Mat matmul(const Mat& a, const Mat& b) {
  Mat r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int t = 0; t < 2; ++t) r[2 * i + j] += a[2 * i + t] * b[2 * t + j];
  return r;
}

inline Vec matvec(const Mat& m, const Vec& v) {
  return {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
}

// Retarder written directly from the textbook form R(-t) diag(1, e^{i d}) R(t),
// with the global phase e^{-i d / 2}.
inline Mat retarder(double d, double t) {
  const double c = std::cos(t), s = std::sin(t);
  const Mat rot{c, s, -s, c};
  const Mat rot_back{c, -s, s, c};
  const Mat delay{cplx(1.0), cplx(0.0), cplx(0.0), std::polar(1.0, d)};
  Mat m = matmul(rot_back, matmul(delay, rot));
  const cplx ph = std::polar(1.0, -d / 2);
  for (auto& e : m) e *= ph;
  return m;
}

inline Mat half_wave(double t) { return retarder(std::numbers::pi, t); }
inline Mat quarter_wave(double t) { return retarder(std::numbers::pi / 2, t); }

// Unit Stokes direction of a state.
inline std::array<double, 3> stokes(const Vec& v) {
  const double n = std::norm(v[0]) + std::norm(v[1]);
  const cplx x = std::conj(v[0]) * v[1];
  return {(std::norm(v[0]) - std::norm(v[1])) / n, 2 * x.real() / n, 2 * x.imag() / n};
}

inline double overlap_sq(const Vec& u, const Vec& v) {
  return std::norm(std::conj(u[0]) * v[0] + std::conj(u[1]) * v[1]);
}

// Sphere angles read off a Stokes direction, psi in [0, pi).
inline std::array<double, 2> angles(const Vec& v) {
  const auto s = stokes(v);
  double psi = 0.5 * std::atan2(s[1], s[0]);
  if (psi < 0) psi += std::numbers::pi;
  return {psi, 0.5 * std::asin(std::clamp(s[2], -1.0, 1.0))};
}

struct Instance {
  std::vector<std::array<double, 2>> x;  // features
  std::vector<Vec> states;               // circuit outputs
  std::vector<Vec> refs;
  double lambda = 1.0;
  bool exclude_diagonal = false;
};

// Clustering cost by the literal double sum: fidelities, argmax assignment
// (first maximum wins), centroid means, then
// 1/2 sum_ij (|x_i - x_j| + lambda |x_i - c_i|) sum_a (1 - f_ia)(1 - f_ja).
inline double naive_cost(const Instance& in) {
  const std::size_t n = in.x.size(), k = in.refs.size();
  std::vector<std::vector<double>> f(n, std::vector<double>(k));
  std::vector<int> label(n);
  for (std::size_t i = 0; i < n; ++i) {
    int best = 0;
    for (std::size_t a = 0; a < k; ++a) {
      f[i][a] = overlap_sq(in.states[i], in.refs[a]);
      if (f[i][a] > f[i][best]) best = static_cast<int>(a);
    }
    label[i] = best;
  }
  std::vector<std::array<double, 2>> c(k, {0.0, 0.0});
  std::vector<int> count(k, 0);
  for (std::size_t i = 0; i < n; ++i) {
    c[label[i]][0] += in.x[i][0];
    c[label[i]][1] += in.x[i][1];
    ++count[label[i]];
  }
  for (std::size_t a = 0; a < k; ++a)
    if (count[a]) {
      c[a][0] /= count[a];
      c[a][1] /= count[a];
    }
  double h = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (in.exclude_diagonal && i == j) continue;
      const double dij = std::sqrt(std::pow(in.x[i][0] - in.x[j][0], 2) + std::pow(in.x[i][1] - in.x[j][1], 2));
      const double dic = std::sqrt(std::pow(in.x[i][0] - c[label[i]][0], 2) +
                                   std::pow(in.x[i][1] - c[label[i]][1], 2));
      double g = 0.0;
      for (std::size_t a = 0; a < k; ++a) g += (1 - f[i][a]) * (1 - f[j][a]);
      h += (dij + in.lambda * dic) * g;
    }
  }
  return 0.5 * h;
}

// Five-point stencil derivative along coordinate j.
inline double stencil5(const std::function<double(std::span<const double>)>& f, std::vector<double> x,
                       std::size_t j, double h) {
  const double x0 = x[j];
  auto at = [&](double dx) {
    x[j] = x0 + dx;
    return f(x);
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

}  // namespace oracle
