#pragma once

// Polynomial spectral tools on [-1, 1]: Gauss and Gauss-Lobatto nodes,
// barycentric Lagrange interpolation and differentiation.

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "halo2d/constants.hpp"
#include "halo2d/errors.hpp"

namespace halo2d::spectral {

namespace detail {

// P_n(x) and P_n'(x) by the three-term recurrence.
inline std::pair<double, double> legendre_with_derivative(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  const double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

}  // namespace detail

struct Quadrature {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// n-point Gauss-Legendre rule, nodes ascending.
inline Quadrature gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need n >= 1");
  Quadrature q{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    double x = -std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = detail::legendre_with_derivative(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto [p, dp] = detail::legendre_with_derivative(n, x);
    (void)p;
    q.nodes(i) = x;
    q.weights(i) = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

/// Gauss-Lobatto-Legendre nodes of order n (n + 1 points including +-1).
inline Eigen::VectorXd gauss_lobatto_nodes(int n) {
  if (n < 2) throw DomainError("gauss_lobatto_nodes: need order >= 2");
  Eigen::VectorXd t(n + 1);
  t(0) = -1.0;
  t(n) = 1.0;
  for (int i = 1; i < n; ++i) {
    // Interior nodes are the roots of P_n'; Newton on (1 - x^2) P_n' = n (P_{n-1} - x P_n).
    double x = -std::cos(kPi * i / n);
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = detail::legendre_with_derivative(n, x);
      // d/dx[(1 - x^2) P_n'] = -n (n + 1) P_n
      const double f = (1.0 - x * x) * dp;
      const double df = -n * (n + 1.0) * p;
      const double dx = f / df;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    t(i) = x;
  }
  return t;
}

/// Barycentric weights for the node set t (scaled to unit max magnitude).
inline Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& t) {
  const Eigen::Index n = t.size();
  Eigen::VectorXd w(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double prod = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k != j) prod *= 2.0 * (t(j) - t(k));  // factor 2 keeps the product in range
    }
    w(j) = 1.0 / prod;
  }
  return w / w.cwiseAbs().maxCoeff();
}

/// Row r with r . f(t) = interpolant of f at x.
inline Eigen::RowVectorXd interpolation_row(const Eigen::VectorXd& t, const Eigen::VectorXd& bw, double x) {
  const Eigen::Index n = t.size();
  Eigen::RowVectorXd row(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = x - t(j);
    if (d == 0.0) {
      row.setZero();
      row(j) = 1.0;
      return row;
    }
    row(j) = bw(j) / d;
  }
  return row / row.sum();
}

/// Adds scale * interpolation_row(t, bw, x) into `out` without allocating.
inline void accumulate_interpolation_row(const Eigen::VectorXd& t, const Eigen::VectorXd& bw, double x,
                                         double scale, Eigen::RowVectorXd& out,
                                         Eigen::RowVectorXd& scratch) {
  const Eigen::Index n = t.size();
  double total = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = x - t(j);
    if (d == 0.0) {
      out(j) += scale;
      return;
    }
    scratch(j) = bw(j) / d;
    total += scratch(j);
  }
  out += (scale / total) * scratch;
}

/// Differentiation matrix for values at nodes t.
inline Eigen::MatrixXd differentiation_matrix(const Eigen::VectorXd& t, const Eigen::VectorXd& bw) {
  const Eigen::Index n = t.size();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double diag = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      d(i, j) = bw(j) / bw(i) / (t(i) - t(j));
      diag -= d(i, j);
    }
    d(i, i) = diag;
  }
  return d;
}

}  // namespace halo2d::spectral
