#include "polclust/polarization.hpp"

#include <algorithm>
#include <cmath>

#include "polclust/errors.hpp"

namespace polclust {

namespace {

void require_finite(double a, const char* what) {
  if (!std::isfinite(a)) throw InvalidArgument(std::string(what) + " must be finite");
}

}  // namespace

JonesVector JonesVector::normalized() const {
  const double n2 = norm_sq();
  if (!std::isfinite(n2) || n2 <= 0.0) throw InvalidArgument("cannot normalize Jones vector");
  const double inv = 1.0 / std::sqrt(n2);
  return {ex * inv, ey * inv};
}

JonesVector horizontal() { return {{1.0, 0.0}, {0.0, 0.0}}; }
JonesVector vertical() { return {{0.0, 0.0}, {1.0, 0.0}}; }

JonesMatrix JonesMatrix::adjoint() const {
  return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)};
}

JonesMatrix operator*(const JonesMatrix& a, const JonesMatrix& b) {
  return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
          a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
}

JonesMatrix operator*(Complex s, const JonesMatrix& a) {
  return {s * a.m00, s * a.m01, s * a.m10, s * a.m11};
}

double StokesVector::degree_of_polarization() const {
  return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3) / s0;
}

JonesMatrix hwp(double beta) {
  require_finite(beta, "hwp angle");
  const double c = std::cos(beta);
  const double s = std::sin(beta);
  const Complex phase = std::polar(1.0, -kPi / 2.0);
  const double diag = c * c - s * s;
  const double off = 2.0 * c * s;
  return phase * JonesMatrix{diag, off, off, -diag};
}

JonesMatrix qwp(double alpha) {
  require_finite(alpha, "qwp angle");
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  const Complex i{0.0, 1.0};
  const Complex phase = std::polar(1.0, -kPi / 4.0);
  const Complex off = (1.0 - i) * (c * s);
  return phase * JonesMatrix{c * c + i * (s * s), off, off, s * s + i * (c * c)};
}

JonesMatrix retarder(double retardance, double axis) {
  require_finite(retardance, "retardance");
  require_finite(axis, "retarder axis");
  const double c = std::cos(axis);
  const double s = std::sin(axis);
  const Complex delay = std::polar(1.0, retardance);
  const Complex phase = std::polar(1.0, -retardance / 2.0);
  const Complex off = (1.0 - delay) * (c * s);
  return phase * JonesMatrix{c * c + delay * (s * s), off, off, s * s + delay * (c * c)};
}

JonesVector apply(const JonesMatrix& m, const JonesVector& v) {
  JonesVector out{m.m00 * v.ex + m.m01 * v.ey, m.m10 * v.ex + m.m11 * v.ey};
  if (std::abs(out.norm_sq() - 1.0) > 1e-12) out = out.normalized();
  return out;
}

JonesMatrix compose(std::span<const JonesMatrix> plates) {
  if (plates.empty()) throw InvalidArgument("compose: empty plate list");
  JonesMatrix acc = plates.front();
  for (std::size_t i = 1; i < plates.size(); ++i) acc = plates[i] * acc;
  return acc;
}

StokesVector jones_to_stokes(const JonesVector& v) {
  const double ix = std::norm(v.ex);
  const double iy = std::norm(v.ey);
  const Complex cross = std::conj(v.ex) * v.ey;
  return {ix + iy, ix - iy, 2.0 * cross.real(), 2.0 * cross.imag()};
}

SphereAngles stokes_to_sphere(const StokesVector& s, double purity_tol) {
  if (!(s.s0 > 0.0)) throw DegradedPurity(0.0);
  const double dop = s.degree_of_polarization();
  if (!(std::abs(dop - 1.0) <= purity_tol)) throw DegradedPurity(dop);
  const double n1 = s.s1 / s.s0;
  const double n2 = s.s2 / s.s0;
  const double n3 = std::clamp(s.s3 / s.s0, -1.0, 1.0);
  SphereAngles a;
  a.chi = 0.5 * std::asin(n3);
  // Orientation is undefined at the poles.
  if (std::hypot(n1, n2) < 1e-12) {
    a.psi = 0.0;
  } else {
    a.psi = wrap_angle(0.5 * std::atan2(n2, n1));
  }
  return a;
}

StokesVector sphere_to_stokes(const SphereAngles& a) {
  const double c2x = std::cos(2.0 * a.chi);
  return {1.0, c2x * std::cos(2.0 * a.psi), c2x * std::sin(2.0 * a.psi), std::sin(2.0 * a.chi)};
}

JonesVector stokes_to_jones(const StokesVector& s) {
  const double r = std::sqrt(s.s1 * s.s1 + s.s2 * s.s2 + s.s3 * s.s3);
  if (!(r > 0.0)) throw DegradedPurity(0.0);
  const double n1 = std::clamp(s.s1 / r, -1.0, 1.0);
  // ex = cos(t), ey = sin(t) e^{i phi} gives s1 = cos 2t, s2 + i s3 = sin 2t e^{i phi}.
  const double t = 0.5 * std::acos(n1);
  const double phi = std::atan2(s.s3, s.s2);
  return {Complex{std::cos(t), 0.0}, std::polar(std::sin(t), phi)};
}

JonesVector sphere_to_jones(const SphereAngles& a) { return stokes_to_jones(sphere_to_stokes(a)); }

double fidelity(const JonesVector& u, const JonesVector& v) {
  const Complex overlap = std::conj(u.ex) * v.ex + std::conj(u.ey) * v.ey;
  return std::clamp(std::norm(overlap), 0.0, 1.0);
}

double wrap_angle(double a) {
  double w = std::fmod(a, kPi);
  if (w < 0.0) w += kPi;
  if (w >= kPi) w = 0.0;
  return w;
}

}  // namespace polclust
