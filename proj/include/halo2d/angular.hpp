#pragma once

// Hyperangular Faddeev eigenproblem at fixed hyperradius for a finite-range
// pair potential (three identical bosons, s-waves):
//
//   Lambda^2 phi + 2 rho^2 V(sqrt2 rho sin alpha) (phi + 2 R phi) = lambda phi,
//
// with R the beta-average over the kinematic rotation. In u = 2 sin^2 alpha
// the operator is Lambda^2 = -4 d/du [u (2 - u) d/du] and the volume element
// sin 2alpha dalpha = du / 2.
//
// Discretization: Lagrange basis on Gauss-Lobatto nodes in t in [-1, 1],
// mapped by u = 2 sinh(c (1 + t) / 2) / sinh(c) so that nodes cluster at small
// alpha where the potential lives at large rho. The weak form is integrated by
// an over-resolved Gauss rule; regularity at both ends is natural (u (2 - u)
// vanishes there), so no boundary rows are imposed.

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <boost/math/tools/roots.hpp>

#include "halo2d/constants.hpp"
#include "halo2d/errors.hpp"
#include "halo2d/hyperspherical.hpp"
#include "halo2d/potential.hpp"
#include "halo2d/spectral.hpp"

namespace halo2d {

struct AngularOptions {
  int order = 80;              ///< polynomial order (order + 1 basis functions)
  int extra_quadrature = 12;   ///< Gauss points beyond order + 1
  int beta_points = 64;        ///< periodic trapezoid size for the kernel average
  int norm_alpha_points = 128;  ///< per-panel outer rule of the three-body overlap
  int norm_beta_points = 256;
  double cutoff_alpha = 0.12;      ///< split point of the overlap (see AngularGrid)
  double imag_tolerance = 1e-8;    ///< accepted |Im lambda| / max(1, |lambda|)
  double spurious_tolerance = 1e-6;
  int min_resolving_nodes = 20;
};

/// Clustering parameter c of the sinh map for a potential of range `range` at
/// hyperradius rho. Small rho gives the (almost) linear map.
inline double angular_map_parameter(double rho, double range) {
  const double u0 = std::min(1.9, 0.5 * (range / rho) * (range / rho));
  if (u0 >= 1.9) return 1e-3;
  auto f = [u0](double c) { return 2.0 * c / std::sinh(c) - u0; };
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, 1e-3, 600.0, boost::math::tools::eps_tolerance<double>(50),
                                                   iters);
  return 0.5 * (r.first + r.second);
}

/// Discretization of the hyperangular problem. Depends on (rho, range) only
/// through the map parameter and is shared by all eigenpairs at that rho.
///
/// Quadrature nodes alpha_q are Gauss points (open interval, ascending) with
/// weights for the measure sin 2alpha dalpha; they sum to 1.
///
/// The three-body overlap <Psi_a|Psi_b> = 3 [<phi_a|phi_b> + 2 <phi_a|R phi_b>]
/// is held as a matrix on coefficient space. With phi = s + m, s = chi phi
/// supported at alpha < 2 alpha_c, <s_a|R s_b> vanishes identically, and the
/// rest is computed as <s_a|R m_b> + <s_b|R m_a> + <m_a|R m_b> with a separate
/// alpha-uniform rule for the outer part. This keeps the overlap accurate when
/// phi is a narrow bound-pair peak at large rho.
class AngularGrid {
 public:
  AngularGrid(double rho, double range, const AngularOptions& opt = {})
      : AngularGrid(angular_map_parameter(rho, range), opt) {}

  AngularGrid(double map_c, const AngularOptions& opt) : opt_(opt), c_(map_c) {
    if (opt.order < 8) throw ConfigError("AngularGrid: order must be >= 8");
    if (opt.beta_points < 8 || opt.norm_beta_points < 8) {
      throw ConfigError("AngularGrid: need at least 8 beta points");
    }
    const int n = opt.order + 1;
    t_ = spectral::gauss_lobatto_nodes(opt.order);
    bw_ = spectral::barycentric_weights(t_);
    const Eigen::MatrixXd d = spectral::differentiation_matrix(t_, bw_);
    const spectral::Quadrature gq = spectral::gauss_legendre(n + opt.extra_quadrature);
    const Eigen::Index nq = gq.nodes.size();

    interp_.resize(nq, n);
    u_q_.resize(nq);
    alpha_q_.resize(nq);
    mw_.resize(nq);
    Eigen::VectorXd stiff_w(nq);
    for (Eigen::Index q = 0; q < nq; ++q) {
      const double t = gq.nodes(q);
      interp_.row(q) = spectral::interpolation_row(t_, bw_, t);
      const double u = u_of_t(t);
      const double du = du_dt(t);
      u_q_(q) = u;
      alpha_q_(q) = std::asin(std::sqrt(0.5 * u));
      mw_(q) = gq.weights(q) * du / 2.0;
      stiff_w(q) = gq.weights(q) * u * (2.0 - u) / du;
    }
    const Eigen::MatrixXd id = interp_ * d;
    stiffness_ = 2.0 * id.transpose() * stiff_w.asDiagonal() * id;
    mass_ = interp_.transpose() * mw_.asDiagonal() * interp_;

    // Kernel average at the quadrature nodes: (R phi)(alpha_q) = rot_ . coeffs.
    rot_ = Eigen::MatrixXd::Zero(nq, n);
    Eigen::RowVectorXd scratch(n);
    Eigen::RowVectorXd acc(n);
    const int m = opt.beta_points;
    for (Eigen::Index q = 0; q < nq; ++q) {
      acc.setZero();
      for (int k = 0; k < m; ++k) {
        const double up = 2.0 * rotated_sin2(alpha_q_(q), 2.0 * kPi * k / m);
        spectral::accumulate_interpolation_row(t_, bw_, t_of_u(up), 1.0 / m, acc, scratch);
      }
      rot_.row(q) = acc;
    }
    build_overlap();
    spurious_ = project([](double a) { return std::cos(2.0 * a); });
    spurious_ /= std::sqrt(spurious_.dot(mass_ * spurious_));
  }

  [[nodiscard]] const AngularOptions& options() const { return opt_; }
  [[nodiscard]] double map_parameter() const { return c_; }
  [[nodiscard]] int basis_size() const { return static_cast<int>(t_.size()); }
  [[nodiscard]] int beta_points() const { return opt_.beta_points; }

  [[nodiscard]] const Eigen::VectorXd& nodes() const { return alpha_q_; }
  [[nodiscard]] const Eigen::VectorXd& weights() const { return mw_; }
  /// u = 2 sin^2 alpha at the quadrature nodes.
  [[nodiscard]] const Eigen::VectorXd& u_nodes() const { return u_q_; }

  [[nodiscard]] const Eigen::MatrixXd& stiffness() const { return stiffness_; }
  [[nodiscard]] const Eigen::MatrixXd& mass() const { return mass_; }
  /// Basis values at the quadrature nodes.
  [[nodiscard]] const Eigen::MatrixXd& interpolation() const { return interp_; }
  /// Kernel average of basis functions at the quadrature nodes.
  [[nodiscard]] const Eigen::MatrixXd& rotation() const { return rot_; }
  /// Three-body overlap matrix on coefficient space.
  [[nodiscard]] const Eigen::MatrixXd& overlap() const { return overlap_; }

  /// Basis nodes expressed as hyperangles (ascending, from 0 to pi/2).
  [[nodiscard]] Eigen::VectorXd basis_alphas() const {
    Eigen::VectorXd a(t_.size());
    for (Eigen::Index j = 0; j < t_.size(); ++j) a(j) = std::asin(std::sqrt(0.5 * u_of_t(t_(j))));
    return a;
  }

  [[nodiscard]] double u_of_t(double t) const { return 2.0 * std::sinh(c_ * (1.0 + t) / 2.0) / std::sinh(c_); }
  [[nodiscard]] double du_dt(double t) const { return c_ * std::cosh(c_ * (1.0 + t) / 2.0) / std::sinh(c_); }
  [[nodiscard]] double t_of_u(double u) const {
    return std::clamp(2.0 / c_ * std::asinh(0.5 * u * std::sinh(c_)) - 1.0, -1.0, 1.0);
  }

  /// Interpolant of the coefficient vector at hyperangle alpha.
  [[nodiscard]] double evaluate(const Eigen::VectorXd& coeffs, double alpha) const {
    const double s = std::sin(alpha);
    return spectral::interpolation_row(t_, bw_, t_of_u(2.0 * s * s)).dot(coeffs);
  }

  /// Coefficients (values at the basis nodes) of an arbitrary function of alpha.
  template <typename F>
  [[nodiscard]] Eigen::VectorXd project(F&& f) const {
    const Eigen::VectorXd a = basis_alphas();
    Eigen::VectorXd c(a.size());
    for (Eigen::Index j = 0; j < a.size(); ++j) c(j) = f(a(j));
    return c;
  }

  [[nodiscard]] double overlap(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return a.dot(overlap_ * b);
  }

  /// The Faddeev-spurious component cos 2alpha (total function zero, lambda = 8
  /// for any potential), normalized to <phi|phi> = 1.
  [[nodiscard]] const Eigen::VectorXd& spurious_mode() const { return spurious_; }

  /// Removes the spurious admixture (M-orthogonal projection). Leaves the
  /// total function, and hence every three-body quantity, unchanged.
  [[nodiscard]] Eigen::VectorXd remove_spurious(const Eigen::VectorXd& c) const {
    return c - spurious_.dot(mass_ * c) * spurious_;
  }

 private:
  // Smooth partition: 1 below alpha_c, 0 above 2 alpha_c, C-infinity between.
  [[nodiscard]] double chi(double alpha) const {
    const double ac = opt_.cutoff_alpha;
    const double s = (alpha - ac) / ac;
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    const double f0 = std::exp(-1.0 / (1.0 - s));
    const double f1 = std::exp(-1.0 / s);
    return f0 / (f0 + f1);
  }

  void build_overlap() {
    const Eigen::Index n = t_.size();
    Eigen::RowVectorXd scratch(n);
    Eigen::RowVectorXd acc(n);

    // Inner part <s_a|R phi_b> on two panels in t: chi = 1 below alpha_c, and
    // the cutoff ramp up to 2 alpha_c. The main rule would smear the ramp when
    // the map is strongly clustered.
    Eigen::MatrixXd inner_outer = Eigen::MatrixXd::Zero(n, n);
    const double ac = opt_.cutoff_alpha;
    const double t_c = t_of_u(2.0 * std::pow(std::sin(ac), 2));
    const double t_2c = t_of_u(2.0 * std::pow(std::sin(2.0 * ac), 2));
    const spectral::Quadrature g1 = spectral::gauss_legendre(n + opt_.extra_quadrature);
    const spectral::Quadrature g2 = spectral::gauss_legendre(64);
    auto add_panel = [&](const spectral::Quadrature& g, double ta, double tb) {
      for (Eigen::Index q = 0; q < g.nodes.size(); ++q) {
        const double t = 0.5 * (ta + tb) + 0.5 * (tb - ta) * g.nodes(q);
        const double u = u_of_t(t);
        const double a = std::asin(std::sqrt(0.5 * u));
        const double w = 0.5 * (tb - ta) * g.weights(q) * du_dt(t) / 2.0 * chi(a);
        if (w == 0.0) continue;
        acc.setZero();
        for (int k = 0; k < opt_.beta_points; ++k) {
          const double up = 2.0 * rotated_sin2(a, 2.0 * kPi * k / opt_.beta_points);
          spectral::accumulate_interpolation_row(t_, bw_, t_of_u(up), 1.0 / opt_.beta_points, acc, scratch);
        }
        inner_outer += w * spectral::interpolation_row(t_, bw_, t).transpose() * acc;
      }
    };
    add_panel(g1, -1.0, t_c);
    add_panel(g2, t_c, t_2c);

    // Outer part <m_a|R m_b>: Gauss panels uniform in alpha, split at the end
    // of the cutoff ramp and at pi/3, where the rotated angle first reaches 0.
    const spectral::Quadrature gb = spectral::gauss_legendre(opt_.norm_alpha_points);
    const std::array<double, 4> edges{ac, 2.0 * ac, kPi / 3.0, 0.5 * kPi};
    const Eigen::Index per = gb.nodes.size();
    const Eigen::Index nb = per * 3;
    Eigen::MatrixXd ib(nb, n);
    Eigen::MatrixXd rb = Eigen::MatrixXd::Zero(nb, n);
    Eigen::VectorXd wb(nb);
    const int m = opt_.norm_beta_points;
    for (Eigen::Index q = 0; q < nb; ++q) {
      const double lo = edges[q / per];
      const double hi = edges[q / per + 1];
      const double a = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gb.nodes(q % per);
      const double s = std::sin(a);
      ib.row(q) = spectral::interpolation_row(t_, bw_, t_of_u(2.0 * s * s));
      wb(q) = 0.5 * (hi - lo) * gb.weights(q % per) * std::sin(2.0 * a) * (1.0 - chi(a));
      acc.setZero();
      for (int k = 0; k < m; ++k) {
        const double sp2 = rotated_sin2(a, 2.0 * kPi * k / m);
        const double w = 1.0 - chi(std::asin(std::sqrt(sp2)));
        if (w == 0.0) continue;
        spectral::accumulate_interpolation_row(t_, bw_, t_of_u(2.0 * sp2), w / m, acc, scratch);
      }
      rb.row(q) = acc;
    }
    Eigen::MatrixXd outer = ib.transpose() * wb.asDiagonal() * rb;
    outer = 0.5 * (outer + outer.transpose()).eval();
    overlap_ = 3.0 * (mass_ + 2.0 * (inner_outer + inner_outer.transpose() + outer));
  }

  AngularOptions opt_;
  double c_;
  Eigen::VectorXd t_;
  Eigen::VectorXd bw_;
  Eigen::MatrixXd interp_;
  Eigen::VectorXd u_q_;
  Eigen::VectorXd alpha_q_;
  Eigen::VectorXd mw_;
  Eigen::MatrixXd stiffness_;
  Eigen::MatrixXd mass_;
  Eigen::MatrixXd rot_;
  Eigen::MatrixXd overlap_;
  Eigen::VectorXd spurious_;
};

/// Eigenpairs at one hyperradius.
///
/// Physical eigenfunctions are normalized to unit three-body norm,
/// <Psi|Psi> = 3 <phi|Phi> = 1, with Phi = phi + 2 R phi the total function
/// projected on the first Jacobi set. Faddeev-spurious solutions (Phi = 0,
/// e.g. phi = cos 2alpha at lambda = 8) are flagged and normalized to
/// <phi|phi> = 1 instead.
struct AngularSpectrum {
  double rho = 0.0;
  std::vector<double> lambdas;
  std::vector<bool> spurious;
  Eigen::MatrixXd coefficients;  ///< column n: phi_n at the basis nodes
  Eigen::MatrixXd components;    ///< column n: phi_n at grid().nodes()
  Eigen::MatrixXd totals;        ///< column n: Phi_n at grid().nodes()
  std::shared_ptr<const AngularGrid> grid;

  [[nodiscard]] std::size_t size() const { return lambdas.size(); }
};

namespace detail {

inline void check_resolution(const AngularGrid& grid, double rho, double range, const AngularOptions& opt) {
  int count = 0;
  for (Eigen::Index q = 0; q < grid.u_nodes().size(); ++q) {
    if (rho * std::sqrt(grid.u_nodes()(q)) <= range) ++count;
  }
  // At small rho the whole interval lies inside the range and every node counts.
  if (count < opt.min_resolving_nodes) {
    throw GridError("solve_angular: potential region holds only " + std::to_string(count) +
                    " quadrature nodes at rho = " + std::to_string(rho));
  }
}

}  // namespace detail

/// Lowest n eigenpairs on a prepared grid.
inline AngularSpectrum solve_angular(const PotentialSpec& spec, double rho,
                                     const std::shared_ptr<const AngularGrid>& grid, int n) {
  if (spec.is_zero_range()) throw DomainError("solve_angular: requires a finite-range potential");
  if (!(rho > 0.0)) throw DomainError("solve_angular: rho must be positive");
  if (n < 1 || n > grid->basis_size()) throw ConfigError("solve_angular: invalid number of eigenpairs");
  const AngularOptions& opt = grid->options();
  detail::check_resolution(*grid, rho, spec.effective_range_scale(), opt);

  const Eigen::VectorXd& u = grid->u_nodes();
  Eigen::VectorXd wv(u.size());
  for (Eigen::Index q = 0; q < u.size(); ++q) {
    wv(q) = grid->weights()(q) * 2.0 * rho * rho * spec.evaluate(rho * std::sqrt(u(q)));
  }
  const Eigen::MatrixXd& interp = grid->interpolation();
  const Eigen::MatrixXd a =
      grid->stiffness() + interp.transpose() * wv.asDiagonal() * (interp + 2.0 * grid->rotation());

  // Reduce to a standard problem with the Cholesky factor of the mass matrix.
  const Eigen::LLT<Eigen::MatrixXd> llt(grid->mass());
  if (llt.info() != Eigen::Success) throw NumericalError("solve_angular: mass matrix not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  Eigen::MatrixXd tmp = l.triangularView<Eigen::Lower>().solve(a);
  const Eigen::MatrixXd std_a = l.triangularView<Eigen::Lower>().solve(tmp.transpose()).transpose();

  const Eigen::EigenSolver<Eigen::MatrixXd> es(std_a, true);
  if (es.info() != Eigen::Success) throw NumericalError("solve_angular: eigensolver failed");
  const Eigen::VectorXcd ev = es.eigenvalues();
  std::vector<Eigen::Index> order(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return ev(x).real() < ev(y).real(); });

  AngularSpectrum out;
  out.rho = rho;
  out.grid = grid;
  const Eigen::Index nb = grid->basis_size();
  out.coefficients.resize(nb, n);
  for (int k = 0; k < n; ++k) {
    const Eigen::Index idx = order[k];
    const std::complex<double> lam = ev(idx);
    if (std::abs(lam.imag()) > opt.imag_tolerance * std::max(1.0, std::abs(lam.real()))) {
      throw GridError("solve_angular: complex eigenvalue " + std::to_string(lam.real()) + " + " +
                      std::to_string(lam.imag()) + "i at rho = " + std::to_string(rho));
    }
    const Eigen::VectorXcd y = es.eigenvectors().col(idx);
    // Rotate the (complex-scaled) eigenvector onto the real axis.
    Eigen::Index big = 0;
    y.cwiseAbs().maxCoeff(&big);
    const std::complex<double> phase = std::abs(y(big)) / y(big);
    const Eigen::VectorXd yr = (y * phase).real();
    Eigen::VectorXd c = l.transpose().triangularView<Eigen::Upper>().solve(yr);
    // Inverse iteration polishes the eigenvector; at large rho the matrix
    // entries span many decades and the direct solver leaves ~1e-8 noise,
    // which the finite-difference couplings would amplify.
    {
      const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a - lam.real() * grid->mass());
      for (int it = 0; it < 2; ++it) {
        Eigen::VectorXd next = lu.solve(grid->mass() * c);
        if (!next.allFinite()) break;
        c = next / next.norm();
      }
    }

    // Near lambda = 8 a physical vector can carry a large spurious admixture;
    // judge it by what remains after removing that admixture.
    const double plain = c.dot(grid->mass() * c);
    const double full = grid->overlap(c, c);
    const Eigen::VectorXd cg = grid->remove_spurious(c);
    const double plain_g = cg.dot(grid->mass() * cg);
    const bool spurious = full < opt.spurious_tolerance * 3.0 * plain &&
                          (plain_g < 1e-6 * plain || full < opt.spurious_tolerance * 3.0 * plain_g);
    c /= std::sqrt(spurious ? plain : full);
    // Sign convention: positive overlap with phi = 1.
    const double s = (grid->mass() * c).sum();
    if (s < 0.0 || (s == 0.0 && c(big) < 0.0)) c = -c;
    out.lambdas.push_back(lam.real());
    out.spurious.push_back(spurious);
    out.coefficients.col(k) = c;
  }
  out.components = interp * out.coefficients;
  out.totals = out.components + 2.0 * grid->rotation() * out.coefficients;
  return out;
}

/// Lowest n eigenpairs with a grid fitted to rho and the potential range.
inline AngularSpectrum solve_angular(const PotentialSpec& spec, double rho, int n,
                                     const AngularOptions& opt = {}) {
  if (spec.is_zero_range()) throw DomainError("solve_angular: requires a finite-range potential");
  if (!(rho > 0.0)) throw DomainError("solve_angular: rho must be positive");
  auto grid = std::make_shared<const AngularGrid>(rho, spec.effective_range_scale(), opt);
  return solve_angular(spec, rho, grid, n);
}

}  // namespace halo2d
