#pragma once

// Large-distance (zero-range) hyperangular analysis for three identical bosons
// in two dimensions.
//
// Outside the potential the Faddeev component is the free solution regular at
// alpha = pi/2, phi = pi P_nu(-cos 2alpha). Matching its small-alpha logarithm
// to the zero-energy pair wave function log(r/a) gives the transcendental
// eigenvalue equation
//
//   2 sin(nu pi) [log(sqrt2 rho / a) - gamma - psi(1 + nu)] - pi cos(nu pi) - 2 phi(pi/3) = 0,
//
// with phi(pi/3) = pi P_nu(1/2) and lambda = 4 nu (nu + 1).

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "halo2d/constants.hpp"
#include "halo2d/errors.hpp"
#include "halo2d/special.hpp"

namespace halo2d {

/// A solution of the zero-range eigenvalue equation, labelled by its branch.
struct NuBranch {
  enum class Kind { real_nu, imaginary_axis };
  Kind kind = Kind::real_nu;
  /// nu on the real branch; tau > 0 with nu = -1/2 - i tau on the imaginary axis.
  double value = 0.0;
  double lambda = 0.0;

  static NuBranch from_lambda(double lambda) {
    const LegendreDegree d = LegendreDegree::from_lambda(lambda);
    if (d.is_conical()) return {Kind::imaginary_axis, d.tau(), lambda};
    return {Kind::real_nu, d.real_nu(), lambda};
  }
  static NuBranch real(double nu) { return {Kind::real_nu, nu, 4.0 * nu * (nu + 1.0)}; }
  static NuBranch imaginary(double tau) {
    if (!(tau > 0.0)) throw DomainError("NuBranch: tau must be positive");
    return {Kind::imaginary_axis, tau, -1.0 - 4.0 * tau * tau};
  }

  [[nodiscard]] LegendreDegree degree() const { return LegendreDegree::from_lambda(lambda); }
  [[nodiscard]] std::complex<double> nu() const {
    return kind == Kind::real_nu ? std::complex<double>{value, 0.0} : std::complex<double>{-0.5, -value};
  }
};

/// phi(alpha) = pi P_nu(-cos 2alpha), the free component regular at alpha = pi/2
/// (phi(pi/2) = pi, phi'(pi/2) = 0). Equivalent to
/// pi cos(nu pi) P_nu(cos 2alpha) - 2 sin(nu pi) Q_nu(cos 2alpha).
inline double free_angular_solution(const LegendreDegree& deg, double alpha) {
  if (!(alpha > 0.0) || alpha > 0.5 * kPi) {
    if (alpha == 0.0) {
      throw DomainError("free_angular_solution: logarithmic singularity at alpha = 0; use small_alpha_expansion");
    }
    throw DomainError("free_angular_solution: alpha must lie in (0, pi/2]");
  }
  const double s = std::sin(alpha);
  const double c = std::cos(alpha);
  return kPi * legendre_p_gaps(deg, c * c, s * s);
}

inline double free_angular_solution(const NuBranch& nu, double alpha) {
  return free_angular_solution(nu.degree(), alpha);
}

/// Leading small-alpha form 2 sin(nu pi)(gamma + log alpha + psi(1 + nu)) + pi cos(nu pi).
/// Real on both branches.
inline double small_alpha_expansion(const LegendreDegree& deg, double alpha) {
  const std::complex<double> nu = deg.nu();
  const std::complex<double> s = std::sin(kPi * nu);
  const std::complex<double> v =
      2.0 * s * (kEulerGamma + std::log(alpha) + digamma(1.0 + nu)) + kPi * std::cos(kPi * nu);
  return v.real();
}

/// Kernel average R phi of the free component, in closed form:
/// pi P_nu(1/2) P_nu(cos 2alpha) for alpha <= pi/3 and
/// pi P_nu(-1/2) P_nu(-cos 2alpha) above.
inline double free_rotated_solution(const LegendreDegree& deg, double alpha) {
  const double s = std::sin(alpha);
  const double c = std::cos(alpha);
  if (alpha <= kPi / 3.0) return kPi * legendre_p(deg, 0.5) * legendre_p_gaps(deg, s * s, c * c);
  return kPi * legendre_p(deg, -0.5) * legendre_p_gaps(deg, c * c, s * s);
}

/// Leading large-rho law nu = (3/2) / log(4 sqrt2 rho / (3a)) for the lowest
/// real root.
inline double nu_asymptotic(double rho_over_a) { return 1.5 / std::log(4.0 * kSqrt2 * rho_over_a / 3.0); }

namespace detail {

// The eigenvalue equation divided by 2 sin(nu pi): H = log(sqrt2 rho / a).
// H has no poles inside each branch interval, and is finite at nu = 1.
inline double zero_range_h_real(double nu) {
  auto h = [](double v) {
    return kEulerGamma + digamma(1.0 + v) +
           (kPi * std::cos(kPi * v) + 2.0 * kPi * legendre_p(LegendreDegree::from_nu(v), 0.5)) /
               (2.0 * std::sin(kPi * v));
  };
  if (std::abs(nu - 1.0) < 1e-5) {
    // Removable 0/0 at nu = 1: linear interpolation across it.
    const double dl = 1e-5;
    const double lo = h(1.0 - dl);
    const double hi = h(1.0 + dl);
    return lo + (hi - lo) * (nu - (1.0 - dl)) / (2.0 * dl);
  }
  return h(nu);
}

inline double zero_range_h(double lambda) {
  const LegendreDegree d = LegendreDegree::from_lambda(lambda);
  if (d.is_conical()) {
    const double tau = d.tau();
    // pi P_{-1/2 + i tau}(1/2) / cosh(pi tau) ~ exp(-pi tau / 3): negligible beyond tau = 100.
    const double tail = tau > 100.0 ? 0.0 : kPi * legendre_p(d, 0.5) / std::cosh(kPi * tau);
    return kEulerGamma + digamma(std::complex<double>{0.5, tau}).real() - tail;
  }
  return zero_range_h_real(d.real_nu());
}

template <typename F>
double bracket_root(F&& f, double lo, double hi, const char* what) {
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NumericalError(std::string(what) + ": root not bracketed in [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "], f = (" + std::to_string(flo) + ", " + std::to_string(fhi) + ")");
  }
  boost::uintmax_t iters = 300;
  const auto r =
      boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace detail

/// Residual of the eigenvalue equation at rho / a, divided by
/// max(1, |2 sin nu pi|) so that it stays finite on the imaginary axis, where
/// sin(nu pi) = -cosh(pi tau). Real on both branches; at integer nu it reduces
/// to -pi cos(nu pi) - 2 phi(pi/3).
inline double eig18_residual(const LegendreDegree& deg, double rho_over_a) {
  if (!(rho_over_a > 0.0)) throw DomainError("eig18_residual: rho/a must be positive");
  const double log_term = std::log(kSqrt2 * rho_over_a);
  if (deg.is_conical()) {
    // F = 2 sin(nu pi) (L - H) with 2 sin(nu pi) = -2 cosh(pi tau) <= -2.
    return detail::zero_range_h(4.0 * deg.mu) - log_term;
  }
  const double nu = deg.real_nu();
  const double s = std::sin(kPi * nu);
  const double f = 2.0 * s * (log_term - kEulerGamma - digamma(1.0 + nu)) - kPi * std::cos(kPi * nu) -
                   2.0 * kPi * legendre_p(deg, 0.5);
  return f / std::max(1.0, std::abs(2.0 * s));
}

inline double eig18_residual(const NuBranch& nu, double rho_over_a) {
  return eig18_residual(nu.degree(), rho_over_a);
}

/// n-th solution (n = 1 lowest) of the zero-range eigenvalue equation at rho / a.
/// lambda_1 < 0 follows the bound-pair branch (conical degree at large rho);
/// lambda_2 lies in (0, 24) and lambda_n for n >= 3 in (4 (n-1) n, 4 n (n+1)).
inline NuBranch solve_lambda_zero_range(double rho_over_a, int n) {
  if (!(rho_over_a > 0.0)) throw DomainError("solve_lambda_zero_range: rho/a must be positive");
  if (n < 1) throw DomainError("solve_lambda_zero_range: n must be >= 1");
  const double target = std::log(kSqrt2 * rho_over_a);
  if (n == 1) {
    // H(-1) on the join of the two branches decides where the root lies.
    if (detail::zero_range_h(-1.0) >= target) {
      auto f = [&](double nu) { return detail::zero_range_h_real(nu) - target; };
      const double nu = detail::bracket_root(f, -0.5, -1e-10, "solve_lambda_zero_range");
      return NuBranch::real(nu);
    }
    auto f = [&](double tau) { return detail::zero_range_h(-1.0 - 4.0 * tau * tau) - target; };
    double hi = 1.0;
    while (f(hi) < 0.0) {
      hi *= 2.0;
      if (hi > 1e12) throw NumericalError("solve_lambda_zero_range: imaginary-axis bracket failed");
    }
    const double tau = detail::bracket_root(f, 0.0, hi, "solve_lambda_zero_range");
    if (tau == 0.0) return NuBranch::from_lambda(-1.0);
    return NuBranch::imaginary(tau);
  }
  // nu in (0, 2) for n = 2 (nu = 1 is removable), (n - 1, n) above.
  const double nu_lo = n == 2 ? 0.0 : n - 1.0;
  const double nu_hi = n == 2 ? 2.0 : static_cast<double>(n);
  const double eps = 1e-10;
  auto f = [&](double nu) { return detail::zero_range_h_real(nu) - target; };
  const double nu = detail::bracket_root(f, nu_lo + eps, nu_hi - eps * nu_hi, "solve_lambda_zero_range");
  return NuBranch::real(nu);
}

/// Bound-pair channel profile 2 k rho K0(sqrt2 k rho alpha), normalized to
/// int_0^inf phi^2 alpha dalpha = 1.
inline double k0_channel_profile(double k, double rho, double alpha) {
  if (!(k > 0.0) || !(rho > 0.0)) throw DomainError("k0_channel_profile: k and rho must be positive");
  if (alpha < 0.0) throw DomainError("k0_channel_profile: alpha must be >= 0");
  if (alpha == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * k * rho * bessel_k0(kSqrt2 * k * rho * alpha);
}

struct ProfileQ11 {
  double value = 0.0;
  bool regime_warning = false;  ///< k rho < 5: the K0 profile is not yet the channel function
};

/// Q11 = int phi d^2phi/drho^2 alpha dalpha for the K0 profile, with the rho
/// derivative taken by a five-point difference and the alpha integral by
/// double-exponential quadrature. Tends to -1 / (3 rho^2).
inline ProfileQ11 q11_from_profile(double k, double rho) {
  if (!(k > 0.0) || !(rho > 0.0)) throw DomainError("q11_from_profile: k and rho must be positive");
  const double h = 1e-3 * rho;
  // Integrate in t = sqrt2 k rho alpha, so the log singularity sits at t = 0.
  const double scale = kSqrt2 * k * rho;
  auto integrand = [&](double t) {
    const double alpha = t / scale;
    const double f0 = k0_channel_profile(k, rho, alpha);
    const double fp1 = k0_channel_profile(k, rho + h, alpha);
    const double fm1 = k0_channel_profile(k, rho - h, alpha);
    const double fp2 = k0_channel_profile(k, rho + 2.0 * h, alpha);
    const double fm2 = k0_channel_profile(k, rho - 2.0 * h, alpha);
    const double d2 = (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
    return f0 * d2 * alpha / scale;
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double value = integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity());
  return {value, k * rho < 5.0};
}

/// g(nu^2) = [x sin(nu pi/2) + nu cos(nu pi/2) - (8/sqrt3) sin(nu pi/6)] / nu,
/// x = sqrt2 rho / a: the three-dimensional analogue, analytic in nu^2 and real
/// for imaginary nu.
inline double efimov3d_function(double lambda_tilde, double x) {
  const double s = lambda_tilde + 4.0;  // nu^2
  if (s >= 0.0) {
    const double nu = std::sqrt(s);
    if (nu < 1e-8) return x * kPi / 2.0 + 1.0 - 8.0 / kSqrt3 * kPi / 6.0;
    return (x * std::sin(nu * kPi / 2.0) - 8.0 / kSqrt3 * std::sin(nu * kPi / 6.0)) / nu + std::cos(nu * kPi / 2.0);
  }
  const double sigma = std::sqrt(-s);
  return (x * std::sinh(sigma * kPi / 2.0) - 8.0 / kSqrt3 * std::sinh(sigma * kPi / 6.0)) / sigma +
         std::cosh(sigma * kPi / 2.0);
}

/// Lowest lambda~ = nu~^2 - 4 of the three-dimensional zero-range equation at
/// rho / a; lambda~ -> -5.0125 as rho -> 0 and -> 0 (nu~ -> 2) as rho -> inf.
inline double efimov3d_lowest(double rho_over_a) {
  if (rho_over_a < 0.0 || std::isnan(rho_over_a)) throw DomainError("efimov3d_lowest: rho/a must be >= 0");
  if (std::isinf(rho_over_a)) return 0.0;
  const double x = kSqrt2 * rho_over_a;
  auto f = [x](double l) { return efimov3d_function(l, x); };
  const double step = 0.05;
  double lo = -50.0;
  double flo = f(lo);
  for (double l = lo + step; l <= 1e-12; l += step) {
    const double fl = f(l);
    if ((fl > 0.0) != (flo > 0.0)) return detail::bracket_root(f, lo, l, "efimov3d_lowest");
    lo = l;
    flo = fl;
  }
  // At nu~ = 2 the function is -3 < 0, so the last cell always closes the bracket.
  return detail::bracket_root(f, lo, 0.0, "efimov3d_lowest");
}

/// Three-body overlap quadrature for the free components: composite Gauss
/// rules graded as alpha ~ s^4 toward the logarithmic point alpha = 0 and
/// split at the kink of R phi at pi/3. Weights include sin 2alpha.
struct ZeroRangeQuadrature {
  std::vector<double> alpha;
  std::vector<double> weight;

  static const ZeroRangeQuadrature& instance() {
    static const ZeroRangeQuadrature q = [] {
      ZeroRangeQuadrature r;
      const boost::math::quadrature::gauss<double, 40> g;
      auto panel = [&](double a, double b, auto map, auto jac) {
        for (int sign : {-1, 1}) {
          for (std::size_t i = 0; i < g.abscissa().size(); ++i) {
            const double xi = sign * g.abscissa()[i];
            if (sign < 0 && xi == 0.0) continue;
            const double s = 0.5 * (a + b) + 0.5 * (b - a) * xi;
            const double w = 0.5 * (b - a) * g.weights()[i];
            const double al = map(s);
            r.alpha.push_back(al);
            r.weight.push_back(w * jac(s) * std::sin(2.0 * al));
          }
        }
      };
      for (int k = 0; k < 4; ++k) {
        panel(k / 4.0, (k + 1) / 4.0, [](double s) { return kPi / 3.0 * std::pow(s, 4); },
              [](double s) { return 4.0 * kPi / 3.0 * std::pow(s, 3); });
      }
      for (int k = 0; k < 2; ++k) {
        panel(k / 2.0, (k + 1) / 2.0, [](double s) { return kPi / 3.0 + kPi / 6.0 * s * s; },
              [](double s) { return kPi / 3.0 * s; });
      }
      return r;
    }();
    return q;
  }
};

namespace detail {

struct FreePair {
  std::vector<double> phi;
  std::vector<double> total;
};

inline FreePair free_components(double lambda) {
  const auto& q = ZeroRangeQuadrature::instance();
  const LegendreDegree d = LegendreDegree::from_lambda(lambda);
  FreePair out;
  out.phi.resize(q.alpha.size());
  out.total.resize(q.alpha.size());
  for (std::size_t i = 0; i < q.alpha.size(); ++i) {
    const double a = q.alpha[i];
    out.phi[i] = free_angular_solution(d, a);
    out.total[i] = out.phi[i] + 2.0 * free_rotated_solution(d, a);
  }
  return out;
}

// 3 <phi_a | Phi_b>
inline double free_overlap(const std::vector<double>& phi_a, const std::vector<double>& total_b) {
  const auto& q = ZeroRangeQuadrature::instance();
  double s = 0.0;
  for (std::size_t i = 0; i < q.weight.size(); ++i) s += q.weight[i] * phi_a[i] * total_b[i];
  return 3.0 * s;
}

}  // namespace detail

/// Three-body norm 3 <phi|Phi> of the free component at eigenvalue lambda.
inline double zero_range_norm(double lambda) {
  const detail::FreePair p = detail::free_components(lambda);
  return detail::free_overlap(p.phi, p.total);
}

struct ZeroRangeQ11Options {
  double blend_lo = 15.0;  ///< rho/a where the -1/(3 rho^2) law starts to take over
  double blend_hi = 25.0;  ///< rho/a beyond which only the law is used
};

/// Q11 for the lowest zero-range channel (a = 1 units): minus the squared
/// rho-derivative of the normalized total function, i.e. -lambda'^2 times the
/// Fubini-Study metric of Phi(lambda). Blends to -1/(3 rho^2) at large rho.
inline double zero_range_q11(double rho_over_a, const ZeroRangeQ11Options& opt = {}) {
  const double law = -1.0 / (3.0 * rho_over_a * rho_over_a);
  if (rho_over_a >= opt.blend_hi) return law;
  const double lam = solve_lambda_zero_range(rho_over_a, 1).lambda;
  const double h = 1e-4 * rho_over_a;
  const double dlam =
      (solve_lambda_zero_range(rho_over_a + h, 1).lambda - solve_lambda_zero_range(rho_over_a - h, 1).lambda) /
      (2.0 * h);
  const double d = 1e-5 * std::max(1.0, std::abs(lam));
  const detail::FreePair c0 = detail::free_components(lam);
  const detail::FreePair cp = detail::free_components(lam + d);
  const detail::FreePair cm = detail::free_components(lam - d);
  detail::FreePair dc;
  dc.phi.resize(c0.phi.size());
  dc.total.resize(c0.phi.size());
  for (std::size_t i = 0; i < c0.phi.size(); ++i) {
    dc.phi[i] = (cp.phi[i] - cm.phi[i]) / (2.0 * d);
    dc.total[i] = (cp.total[i] - cm.total[i]) / (2.0 * d);
  }
  const double n = detail::free_overlap(c0.phi, c0.total);
  const double nd = detail::free_overlap(c0.phi, dc.total);
  const double dd = detail::free_overlap(dc.phi, dc.total);
  const double metric = (dd * n - nd * nd) / (n * n);
  const double profile = -dlam * dlam * metric;
  if (rho_over_a <= opt.blend_lo) return profile;
  const double s = (rho_over_a - opt.blend_lo) / (opt.blend_hi - opt.blend_lo);
  const double w = s * s * (3.0 - 2.0 * s);
  return (1.0 - w) * profile + w * law;
}

}  // namespace halo2d
