// Independent reference computations shared by the unit and acceptance tests.
// None of these call into the library's solvers.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/numeric/odeint.hpp>

namespace oracle {

/// P_nu(cos theta) from the Mehler-Dirichlet integral. mu = nu (nu + 1);
/// mu < -1/4 selects the conical branch nu = -1/2 + i tau.
inline double mehler_dirichlet(double mu, double theta) {
  const double s = mu + 0.25;
  auto kernel = [s](double phi) {
    if (s >= 0.0) return std::cos(std::sqrt(s) * phi);
    return std::cosh(std::sqrt(-s) * phi);
  };
  const double c = std::cos(theta);
  boost::math::quadrature::tanh_sinh<double> q;
  auto f = [&](double phi, double dist) {
    // dist is the distance to the nearer endpoint; use it near theta.
    const double d = phi > 0.5 * theta ? 2.0 * std::sin(0.5 * (theta + phi)) * std::sin(0.5 * dist)
                                       : std::cos(phi) - c;
    return kernel(phi) / std::sqrt(d);
  };
  return std::sqrt(2.0) / std::numbers::pi * q.integrate(f, 0.0, theta);
}

/// Ferrers P_nu(x) and Q_nu(x), |x| < 1, by integrating the Legendre equation
/// from the closed-form values at x = 0.
inline std::array<double, 2> legendre_pq(double nu, double x) {
  using boost::math::tgamma;
  const double sp = std::sqrt(std::numbers::pi);
  const double h = 0.5 * nu;
  auto rgamma = [](double z) { return z <= 0.0 && z == std::floor(z) ? 0.0 : 1.0 / tgamma(z); };
  std::array<double, 2> out{};
  const std::array<std::array<double, 2>, 2> start = {{
      {sp * rgamma(h + 1.0) * rgamma(0.5 - h), -2.0 * sp * rgamma(h + 0.5) * rgamma(-h)},
      {-0.5 * sp * std::sin(std::numbers::pi * h) * tgamma(h + 0.5) / tgamma(h + 1.0),
       sp * std::cos(std::numbers::pi * h) * tgamma(h + 1.0) / tgamma(h + 0.5)},
  }};
  for (int k = 0; k < 2; ++k) {
    std::array<double, 2> y = start[k];
    auto rhs = [nu](const std::array<double, 2>& v, std::array<double, 2>& d, double t) {
      d[0] = v[1];
      d[1] = (2.0 * t * v[1] - nu * (nu + 1.0) * v[0]) / (1.0 - t * t);
    };
    namespace ode = boost::numeric::odeint;
    ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<std::array<double, 2>>>(1e-13, 1e-13), rhs,
                            y, 0.0, x, x >= 0.0 ? 1e-3 : -1e-3);
    out[k] = y[0];
  }
  return out;
}

/// Cell-centred finite differences for -(1/r)(r R')' + V R = E R on (0, L),
/// R(L) = 0, with Sturm-sequence bisection. Second order in h.
class SturmTwoBody {
 public:
  SturmTwoBody(const std::function<double(double)>& v, double length, int cells) {
    const double h = length / cells;
    diag_.resize(cells);
    off_.resize(cells - 1);
    for (int i = 0; i < cells; ++i) {
      const double r = (i + 0.5) * h;
      const double lo = i * h;
      const double hi = (i + 1) * h;
      diag_[i] = (lo + hi) / (h * h * r) + v(r);
      if (i + 1 < cells) {
        const double r1 = (i + 1.5) * h;
        off_[i] = -hi / (h * h * std::sqrt(r * r1));
      }
    }
  }

  /// Eigenvalues strictly below e.
  [[nodiscard]] int count_below(double e) const {
    int n = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < diag_.size(); ++i) {
      const double prev = i == 0 ? 0.0 : off_[i - 1] * off_[i - 1] / d;
      d = diag_[i] - e - prev;
      if (d == 0.0) d = -1e-300;
      if (d < 0.0) ++n;
    }
    return n;
  }

  [[nodiscard]] std::vector<double> below(double lo, double hi) const {
    std::vector<double> out;
    const int n0 = count_below(lo);
    const int n1 = count_below(hi);
    for (int k = n0; k < n1; ++k) {
      double a = lo;
      double b = hi;
      for (int it = 0; it < 200 && b - a > 1e-15 * std::abs(b); ++it) {
        const double m = 0.5 * (a + b);
        (count_below(m) > k ? b : a) = m;
      }
      out.push_back(0.5 * (a + b));
    }
    return out;
  }

 private:
  std::vector<double> diag_;
  std::vector<double> off_;
};

/// Bound energies below zero, Richardson-extrapolated from h and h/2.
inline std::vector<double> two_body_energies(const std::function<double(double)>& v, double vmin, double length,
                                             int cells) {
  const auto coarse = SturmTwoBody(v, length, cells).below(vmin, 0.0);
  const auto fine = SturmTwoBody(v, length, 2 * cells).below(vmin, 0.0);
  std::vector<double> out;
  for (std::size_t i = 0; i < std::min(coarse.size(), fine.size()); ++i) {
    out.push_back((4.0 * fine[i] - coarse[i]) / 3.0);
  }
  return out;
}

inline std::function<double(double)> gaussian(double b, double s1, double s2) {
  return [=](double r) {
    const double x = r / b;
    return (s1 * std::exp(-0.5 * x * x) + s2 * std::exp(-2.0 * x * x)) / (2.0 * b * b);
  };
}

/// Hyperangles of one configuration of three unit-mass particles in the plane,
/// built directly from particle positions. alpha[i] uses pair (j, k) and
/// spectator i; beta is the angle between the pair and spectator vectors of set 0.
struct Geometry {
  std::array<double, 3> alpha{};
  double beta = 0.0;
};

inline Geometry geometry(const std::array<std::array<double, 2>, 3>& p) {
  Geometry g;
  std::array<std::array<double, 2>, 3> x{};
  std::array<std::array<double, 2>, 3> y{};
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    for (int c = 0; c < 2; ++c) {
      x[i][c] = (p[j][c] - p[k][c]) / std::sqrt(2.0);
      y[i][c] = std::sqrt(2.0 / 3.0) * (p[i][c] - 0.5 * (p[j][c] + p[k][c]));
    }
    g.alpha[i] = std::atan2(std::hypot(x[i][0], x[i][1]), std::hypot(y[i][0], y[i][1]));
  }
  g.beta = std::atan2(x[0][0] * y[0][1] - x[0][1] * y[0][0], x[0][0] * y[0][0] + x[0][1] * y[0][1]);
  return g;
}

inline std::array<std::array<double, 2>, 3> random_positions(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<std::array<double, 2>, 3> p{};
  for (auto& q : p) q = {u(rng), u(rng)};
  return p;
}

}  // namespace oracle
