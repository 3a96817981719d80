#pragma once

#include <cmath>
#include <numbers>

namespace halo2d {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEulerGamma = 0.5772156649015329;
inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kSqrt3 = std::numbers::sqrt3;

/// 8 e^{-2 gamma}: curvature of the bound-pair branch of the lowest
/// zero-range hyperangular eigenvalue, in units of 1/a^2.
inline const double kParabolaCoefficient = 8.0 * std::exp(-2.0 * kEulerGamma);

inline constexpr const char* kVersion = "1.0.0";

}  // namespace halo2d
