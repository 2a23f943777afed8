#pragma once

// Jones calculus for fully polarized light: waveplates, state transport,
// Stokes readout and Poincare-sphere coordinates. Angles are radians.

#include <complex>
#include <numbers>
#include <span>
#include <vector>

namespace polclust {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

struct JonesVector {
  Complex ex{1.0, 0.0};
  Complex ey{0.0, 0.0};

  double norm_sq() const { return std::norm(ex) + std::norm(ey); }
  // Throws InvalidArgument for a zero or non-finite vector.
  JonesVector normalized() const;
};

JonesVector horizontal();
JonesVector vertical();

struct JonesMatrix {
  Complex m00{1.0, 0.0};
  Complex m01{0.0, 0.0};
  Complex m10{0.0, 0.0};
  Complex m11{1.0, 0.0};

  static JonesMatrix identity() { return {}; }
  JonesMatrix adjoint() const;
  friend JonesMatrix operator*(const JonesMatrix& a, const JonesMatrix& b);
  friend JonesMatrix operator*(Complex s, const JonesMatrix& a);
};

struct StokesVector {
  double s0 = 1.0;
  double s1 = 1.0;
  double s2 = 0.0;
  double s3 = 0.0;

  // |(s1, s2, s3)| / s0; 1 for pure light.
  double degree_of_polarization() const;
};

struct SphereAngles {
  double psi = 0.0;  // orientation, [0, pi)
  double chi = 0.0;  // ellipticity, [-pi/4, pi/4]
};

// Half-wave plate with fast axis at `beta`, global phase exp(-i pi/2) kept.
JonesMatrix hwp(double beta);
// Quarter-wave plate with fast axis at `alpha`, global phase exp(-i pi/4) kept.
JonesMatrix qwp(double alpha);
// General linear retarder. retarder(pi, t) == hwp(t), retarder(pi/2, t) == qwp(t).
JonesMatrix retarder(double retardance, double axis);

JonesVector apply(const JonesMatrix& m, const JonesVector& v);

// Plates in application order: compose({a, b, c}) == c * b * a.
JonesMatrix compose(std::span<const JonesMatrix> plates);

StokesVector jones_to_stokes(const JonesVector& v);

// Throws DegradedPurity when the degree of polarization departs from 1 by more
// than `purity_tol`. At the poles psi is reported as 0.
SphereAngles stokes_to_sphere(const StokesVector& s, double purity_tol = 1e-6);

StokesVector sphere_to_stokes(const SphereAngles& a);
// A Jones vector with the given sphere angles (real, non-negative ex).
JonesVector sphere_to_jones(const SphereAngles& a);
// Pure state along the direction of (s1, s2, s3); used for noisy readouts.
JonesVector stokes_to_jones(const StokesVector& s);

double fidelity(const JonesVector& u, const JonesVector& v);

// Wraps into [0, pi).
double wrap_angle(double a);

}  // namespace polclust
