#pragma once

// Special functions used by the hyperangular analysis: the digamma function
// for complex argument and Ferrers (on-the-cut) Legendre functions P_nu(x)
// for real and conical degree.

#include <cmath>
#include <complex>
#include <limits>

#include <boost/math/special_functions/bessel.hpp>

#include "halo2d/constants.hpp"
#include "halo2d/errors.hpp"

namespace halo2d {

/// Digamma psi(z) for complex z, by upward recurrence to |z| >= 15 followed by
/// the Stirling-type asymptotic series.
inline std::complex<double> digamma(std::complex<double> z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) {
    throw DomainError("digamma: pole at non-positive integer");
  }
  std::complex<double> shift{0.0, 0.0};
  // Reflection keeps the recurrence short for large negative real parts.
  if (z.real() < -10.0) {
    const std::complex<double> w = 1.0 - z;
    return digamma(w) - kPi / std::tan(kPi * z);
  }
  while (std::abs(z) < 15.0 || z.real() < 10.0) {
    shift -= 1.0 / z;
    z += 1.0;
  }
  const std::complex<double> inv = 1.0 / z;
  const std::complex<double> inv2 = inv * inv;
  // Bernoulli terms B_{2k}/(2k): 1/12, 1/120, 1/252, 1/240, 1/132, 691/32760
  const std::complex<double> series =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0))))));
  return std::log(z) - 0.5 * inv - series + shift;
}

inline double digamma(double x) { return digamma(std::complex<double>{x, 0.0}).real(); }

/// Degree of a Legendre function, stored through mu = nu (nu + 1).
///
/// mu >= -1/4 is the real branch nu = -1/2 + sqrt(mu + 1/4); mu < -1/4 is the
/// conical branch nu = -1/2 + i tau. P_nu depends on nu only through mu, so the
/// two branches join continuously at mu = -1/4.
struct LegendreDegree {
  double mu = 0.0;

  static LegendreDegree from_nu(double nu) { return {nu * (nu + 1.0)}; }
  static LegendreDegree conical(double tau) { return {-0.25 - tau * tau}; }
  /// From a hyperangular eigenvalue lambda = 4 nu (nu + 1).
  static LegendreDegree from_lambda(double lambda) { return {0.25 * lambda}; }

  [[nodiscard]] bool is_conical() const { return mu < -0.25; }
  /// Real degree on the principal branch (nu >= -1/2); only for !is_conical().
  [[nodiscard]] double real_nu() const { return -0.5 + std::sqrt(mu + 0.25); }
  [[nodiscard]] double tau() const { return std::sqrt(-0.25 - mu); }
  [[nodiscard]] std::complex<double> nu() const {
    return is_conical() ? std::complex<double>{-0.5, tau()} : std::complex<double>{real_nu(), 0.0};
  }
};

namespace detail {

// Direct hypergeometric series F(-nu, nu+1; 1; z). The coefficients depend on mu
// only: (-nu)_n (nu+1)_n = prod_k (k(k+1) - mu).
inline double legendre_direct_series(double mu, double z) {
  double term = 1.0;
  double sum = 1.0;
  for (int n = 0; n < 20000; ++n) {
    term *= (n * (n + 1.0) - mu) / ((n + 1.0) * (n + 1.0)) * z;
    sum += term;
    if (term == 0.0 || (n > 4 && std::abs(term) < 1e-17 * std::abs(sum))) return sum;
  }
  throw NumericalError("legendre_p: direct series did not converge");
}

// Logarithmic connection formula about x = -1 (z -> 1), with w = 1 - z.
// Valid for non-integer nu; psi(n - nu) is reflected where it would sit
// near a pole so that near-integer degrees stay finite.
inline double legendre_log_series(const LegendreDegree& deg, double w) {
  const std::complex<double> nu = deg.nu();
  const std::complex<double> s = std::sin(kPi * nu);
  const std::complex<double> c = std::cos(kPi * nu);
  const double log_w = std::log(w);
  double coeff = 1.0;
  std::complex<double> sum{0.0, 0.0};
  for (int n = 0; n < 20000; ++n) {
    const std::complex<double> arg = static_cast<double>(n) - nu;
    std::complex<double> psi_term;
    if (arg.real() > 0.5 || arg.imag() != 0.0) {
      psi_term = s * digamma(arg);
    } else {
      psi_term = s * digamma(1.0 + nu - static_cast<double>(n)) + kPi * c;
    }
    const std::complex<double> t =
        coeff * (psi_term + s * (digamma(static_cast<double>(n) + 1.0 + nu) -
                                 2.0 * digamma(static_cast<double>(n) + 1.0) + log_w));
    sum += t;
    coeff *= (n * (n + 1.0) - deg.mu) / ((n + 1.0) * (n + 1.0)) * w;
    if (n > 4 && std::abs(t) < 1e-17 * std::abs(sum)) return sum.real() / kPi;
    if (coeff == 0.0) return sum.real() / kPi;
  }
  throw NumericalError("legendre_p: logarithmic series did not converge");
}

}  // namespace detail

/// P_nu(x) with x = 1 - 2z = -1 + 2w given through its two half-gaps
/// z = (1 - x)/2 and w = (1 + x)/2. Passing both keeps full relative accuracy
/// next to either endpoint (e.g. z = cos^2(theta/2), w = sin^2(theta/2)).
inline double legendre_p_gaps(const LegendreDegree& deg, double z, double w) {
  if (!(w > 0.0) || z < 0.0) {
    throw DomainError("legendre_p: argument must satisfy -1 < x <= 1");
  }
  const bool direct = z <= 0.5 || (deg.mu < 0.0 && z <= 0.9);
  if (direct) return detail::legendre_direct_series(deg.mu, z);
  if (!deg.is_conical()) {
    const double nu = deg.real_nu();
    const double k = std::round(nu);
    // Integer degree: the direct series terminates and is a polynomial.
    if (std::abs(nu - k) < 1e-13) return detail::legendre_direct_series(k * (k + 1.0), z);
  }
  return detail::legendre_log_series(deg, w);
}

/// Ferrers function P_nu(x), -1 < x <= 1, by hypergeometric series
/// F(-nu, nu + 1; 1; (1 - x)/2) and its logarithmic continuation near x = -1.
inline double legendre_p(const LegendreDegree& deg, double x) {
  if (!(x > -1.0) || x > 1.0) throw DomainError("legendre_p: requires -1 < x <= 1");
  return legendre_p_gaps(deg, 0.5 * (1.0 - x), 0.5 * (1.0 + x));
}

/// P_nu(cos theta) for theta in [0, pi), accurate near both ends.
inline double legendre_p_cos(const LegendreDegree& deg, double theta) {
  const double half = 0.5 * theta;
  const double sh = std::sin(half);
  const double ch = std::cos(half);
  return legendre_p_gaps(deg, sh * sh, ch * ch);
}

/// Modified Bessel functions of the second kind, orders 0 and 1.
/// Underflow to 0 at large argument is silent.
inline double bessel_k0(double x) { return boost::math::cyl_bessel_k(0, x); }
inline double bessel_k1(double x) { return boost::math::cyl_bessel_k(1, x); }
inline double bessel_i0(double x) { return boost::math::cyl_bessel_i(0, x); }
inline double bessel_i1(double x) { return boost::math::cyl_bessel_i(1, x); }

}  // namespace halo2d
