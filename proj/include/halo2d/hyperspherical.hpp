#pragma once

// Hyperspherical coordinates for three identical particles of unit mass and
// the s-wave kinematic rotation between Jacobi sets.

#include <algorithm>
#include <cmath>

#include "halo2d/constants.hpp"
#include "halo2d/errors.hpp"

namespace halo2d {

struct HypersphericalPoint {
  double rho = 0.0;
  double alpha = 0.0;
};

/// (rho, alpha) from the pair distance r_jk and the distance of particle i to
/// the jk centre of mass: x = r_jk / sqrt 2, y = r_i,jk sqrt(2/3).
inline HypersphericalPoint hyperspherical_from_jacobi(double r_jk, double r_i_jk) {
  if (r_jk < 0.0 || r_i_jk < 0.0) throw DomainError("hyperspherical_from_jacobi: distances must be >= 0");
  if (r_jk == 0.0 && r_i_jk == 0.0) throw DomainError("hyperspherical_from_jacobi: both distances are zero");
  const double x = r_jk / kSqrt2;
  const double y = r_i_jk * std::sqrt(2.0 / 3.0);
  return {std::hypot(x, y), std::atan2(x, y)};
}

/// sin^2 of the hyperangle seen from another Jacobi set, clamped to [0, 1].
inline double rotated_sin2(double alpha, double beta, int sign = +1) {
  const double s = std::sin(alpha);
  const double c = std::cos(alpha);
  const double v = 0.25 * s * s + 0.75 * c * c + (sign >= 0 ? 1.0 : -1.0) * 0.5 * kSqrt3 * s * c * std::cos(beta);
  return std::clamp(v, 0.0, 1.0);
}

/// alpha' in [0, pi/2] with sin^2 alpha' = sin^2(alpha)/4 + 3 cos^2(alpha)/4 +- (sqrt3/2) sin cos cos(beta).
inline double rotated_angle(double alpha, double beta, int sign = +1) {
  return std::asin(std::sqrt(rotated_sin2(alpha, beta, sign)));
}

/// (1 / 2pi) int_0^{2pi} phi(alpha'(alpha, beta)) dbeta by the M-point periodic trapezoid rule.
template <typename F>
double kernel_average(F&& phi, double alpha, int m = 64, int sign = +1) {
  if (m < 8) throw ConfigError("kernel_average: need at least 8 beta points");
  double sum = 0.0;
  for (int k = 0; k < m; ++k) sum += phi(rotated_angle(alpha, 2.0 * kPi * k / m, sign));
  return sum / m;
}

}  // namespace halo2d
