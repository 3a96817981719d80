#pragma once

// Adiabatic channel table: lambda_n(rho) and the non-adiabatic couplings
//
//   P_nm = <Phi_n | d/drho Phi_m>,  Q_nm = <Phi_n | d^2/drho^2 Phi_m>,
//   D_nm = <d/drho Phi_n | d/drho Phi_m>,
//
// on a hyperradial grid, for a finite-range potential (angular Faddeev solves)
// or the zero-range limit (single channel from the analytic eigenvalue equation).

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "halo2d/angular.hpp"
#include "halo2d/errors.hpp"
#include "halo2d/parallel.hpp"
#include "halo2d/potential.hpp"
#include "halo2d/twobody.hpp"
#include "halo2d/zero_range.hpp"

namespace halo2d {

struct ChannelOptions {
  double fd_step = 1e-4;                ///< relative rho step of the coupling differences
  double richardson_tolerance = 1e-4;   ///< accepted |X(h) - X(2h)| relative to the coupling scale
  double weak_overlap = 0.5;            ///< tracking overlap below which a point is flagged
  bool strict_tracking = false;         ///< throw instead of flagging
  int workers = 1;
  AngularOptions angular;
  ZeroRangeQ11Options q11;
  TwoBodyOptions two_body;
};

struct ChannelTable {
  enum class Source { finite_range, zero_range };

  Source source = Source::zero_range;
  PotentialSpec potential = PotentialSpec::zero_range(1.0);
  std::vector<double> rho;
  int channels = 0;
  std::vector<std::vector<double>> lambdas;            ///< [n][j]
  std::vector<std::vector<std::vector<double>>> P;     ///< [n][m][j]
  std::vector<std::vector<std::vector<double>>> Q;     ///< [n][m][j]
  std::vector<std::vector<std::vector<double>>> D;     ///< [n][m][j]
  std::vector<double> thresholds;                      ///< energy each channel tends to at large rho
  std::vector<double> dimer_energies;                  ///< ascending
  std::vector<double> flagged_rho;                     ///< weak-overlap (avoided crossing) points

  /// Lowest break-up threshold, min(E2, 0).
  [[nodiscard]] double lowest_threshold() const {
    return dimer_energies.empty() ? 0.0 : std::min(0.0, dimer_energies.front());
  }
  [[nodiscard]] std::size_t size() const { return rho.size(); }
};

/// n points uniform in log rho on [lo, hi].
inline std::vector<double> make_log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ConfigError("make_log_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

namespace detail {

inline std::vector<std::vector<std::vector<double>>> cube(int n, std::size_t m) {
  return std::vector<std::vector<std::vector<double>>>(n, std::vector<std::vector<double>>(n, std::vector<double>(m)));
}

// Physical (non-spurious) eigenpairs of one angular solve, at most n.
struct Physical {
  std::vector<double> lambda;
  Eigen::MatrixXd coeffs;
};

inline Physical physical_pairs(const PotentialSpec& spec, double rho, const std::shared_ptr<const AngularGrid>& grid,
                               int n) {
  // Each spurious solution below the n-th physical one costs a slot.
  for (int extra = 3;; extra += 3) {
    const int want = std::min(n + extra, grid->basis_size());
    const AngularSpectrum s = solve_angular(spec, rho, grid, want);
    Physical p;
    p.coeffs.resize(grid->basis_size(), n);
    for (std::size_t k = 0; k < s.size() && static_cast<int>(p.lambda.size()) < n; ++k) {
      if (s.spurious[k]) continue;
      // Fix the spurious gauge so that components vary smoothly with rho.
      p.coeffs.col(static_cast<Eigen::Index>(p.lambda.size())) =
          grid->remove_spurious(s.coefficients.col(static_cast<Eigen::Index>(k)));
      p.lambda.push_back(s.lambdas[k]);
    }
    if (static_cast<int>(p.lambda.size()) == n) return p;
    if (want == grid->basis_size()) throw GridError("build_channel_table: not enough physical eigenpairs");
  }
}

// Orders and signs the columns of `other` to follow `ref` by maximal |overlap|.
inline Eigen::MatrixXd align_to(const AngularGrid& grid, const Eigen::MatrixXd& ref, const Eigen::MatrixXd& other) {
  Eigen::MatrixXd out(ref.rows(), ref.cols());
  const Eigen::MatrixXd g = ref.transpose() * grid.overlap() * other;
  for (Eigen::Index n = 0; n < ref.cols(); ++n) {
    Eigen::Index best = 0;
    g.row(n).cwiseAbs().maxCoeff(&best);
    out.col(n) = g(n, best) < 0.0 ? Eigen::VectorXd(-other.col(best)) : Eigen::VectorXd(other.col(best));
  }
  return out;
}

struct PointResult {
  std::vector<double> lambda;
  Eigen::MatrixXd coeffs;
  Eigen::MatrixXd P, Q, D;
  std::shared_ptr<const AngularGrid> grid;
};

inline PointResult finite_range_point(const PotentialSpec& spec, double rho, int n, const ChannelOptions& opt) {
  PointResult r;
  r.grid = std::make_shared<const AngularGrid>(rho, spec.effective_range_scale(), opt.angular);
  const AngularGrid& grid = *r.grid;
  const Physical p0 = physical_pairs(spec, rho, r.grid, n);
  r.lambda = p0.lambda;
  r.coeffs = p0.coeffs;
  const Eigen::MatrixXd& g = grid.overlap();

  struct Couplings {
    Eigen::MatrixXd P, Q, D;
  };
  auto couplings = [&](double h) {
    const Eigen::MatrixXd cp = align_to(grid, p0.coeffs, physical_pairs(spec, rho + h, r.grid, n).coeffs);
    const Eigen::MatrixXd cm = align_to(grid, p0.coeffs, physical_pairs(spec, rho - h, r.grid, n).coeffs);
    const Eigen::MatrixXd d1 = (cp - cm) / (2.0 * h);
    const Eigen::MatrixXd d2 = (cp - 2.0 * p0.coeffs + cm) / (h * h);
    return Couplings{p0.coeffs.transpose() * g * d1, p0.coeffs.transpose() * g * d2, d1.transpose() * g * d1};
  };
  // Step-size check between h and 2h; retried with larger and smaller steps
  // because near the exact crossing of a physical lambda with the spurious
  // lambda = 8 the eigenvectors lose a few digits.
  double worst = 0.0;
  for (const double factor : {1.0, 4.0, 0.25}) {
    const double h = factor * opt.fd_step * rho;
    const Couplings c1 = couplings(h);
    const Couplings c2 = couplings(2.0 * h);
    // P and D carry 1/rho scales; compare on that footing.
    const double scale = std::max(1.0 / rho, c1.P.cwiseAbs().maxCoeff());
    const double err =
        std::max((c1.P - c2.P).cwiseAbs().maxCoeff() / scale,
                 (c1.D - c2.D).cwiseAbs().maxCoeff() / std::max(scale * scale, c1.D.cwiseAbs().maxCoeff()));
    if (err <= opt.richardson_tolerance) {
      // Richardson-extrapolated values (central differences are second order).
      r.P = c1.P + (c1.P - c2.P) / 3.0;
      r.D = c1.D + (c1.D - c2.D) / 3.0;
      r.Q = c1.Q;
      return r;
    }
    worst = factor == 1.0 ? err : std::min(worst, err);
  }
  throw NumericalError("build_channel_table: coupling step-size check failed at rho = " + std::to_string(rho) +
                       " (relative difference " + std::to_string(worst) + ")");
}

}  // namespace detail

/// Channel table for a finite-range potential on the given hyperradial grid
/// (lengths in the potential's own units), N lowest physical channels in
/// adiabatic order, eigenfunction signs tracked by overlap along the grid.
inline ChannelTable build_channel_table(const PotentialSpec& source, const std::vector<double>& rho_grid, int n,
                                        const ChannelOptions& opt = {}) {
  if (rho_grid.size() < 4) throw ConfigError("build_channel_table: need at least 4 grid points");
  for (std::size_t j = 0; j < rho_grid.size(); ++j) {
    if (!(rho_grid[j] > 0.0) || (j > 0 && !(rho_grid[j] > rho_grid[j - 1]))) {
      throw ConfigError("build_channel_table: rho grid must be positive and ascending");
    }
  }
  if (n < 1) throw ConfigError("build_channel_table: need at least one channel");
  ChannelTable t;
  t.potential = source;
  t.rho = rho_grid;
  t.channels = n;
  const std::size_t m = rho_grid.size();
  t.lambdas.assign(n, std::vector<double>(m));
  t.P = detail::cube(n, m);
  t.Q = detail::cube(n, m);
  t.D = detail::cube(n, m);

  if (source.is_zero_range()) {
    if (n != 1) throw ConfigError("build_channel_table: the zero-range table is single-channel");
    t.source = ChannelTable::Source::zero_range;
    const double a = std::get<ZeroRange>(source.model()).a;
    const WeakBinding wb = weak_binding_energy(a);
    t.dimer_energies = {-wb.binding};
    t.thresholds = {-wb.binding};
    parallel_for(m, opt.workers, [&](std::size_t j) {
      const double x = rho_grid[j] / a;
      t.lambdas[0][j] = solve_lambda_zero_range(x, 1).lambda;
      const double q = zero_range_q11(x, opt.q11) / (a * a);
      t.Q[0][0][j] = q;
      t.D[0][0][j] = -q;
      t.P[0][0][j] = 0.0;
    });
    return t;
  }

  t.source = ChannelTable::Source::finite_range;
  t.dimer_energies = bound_states(source, std::nullopt, opt.two_body);
  t.thresholds.assign(n, 0.0);
  for (int k = 0; k < n && k < static_cast<int>(t.dimer_energies.size()); ++k) t.thresholds[k] = t.dimer_energies[k];

  std::vector<detail::PointResult> pts(m);
  parallel_for(m, opt.workers, [&](std::size_t j) { pts[j] = detail::finite_range_point(source, rho_grid[j], n, opt); });

  // Sequential sign tracking: carry the previous eigenfunctions onto the
  // current grid and fix each sign by the three-body overlap.
  std::vector<double> sign(n, 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    detail::PointResult& p = pts[j];
    if (j > 0) {
      const detail::PointResult& q = pts[j - 1];
      const Eigen::VectorXd alphas = p.grid->basis_alphas();
      bool weak = false;
      for (int k = 0; k < n; ++k) {
        Eigen::VectorXd carried(alphas.size());
        for (Eigen::Index i = 0; i < alphas.size(); ++i) carried(i) = q.grid->evaluate(q.coeffs.col(k), alphas(i));
        const double norm = std::sqrt(std::max(p.grid->overlap(carried, carried), 1e-300));
        const double o = p.grid->overlap(carried, p.coeffs.col(k)) / norm;
        sign[k] = o < 0.0 ? -1.0 : 1.0;
        if (std::abs(o) < opt.weak_overlap) weak = true;
      }
      if (weak) {
        if (opt.strict_tracking) {
          throw NumericalError("build_channel_table: ambiguous channel tracking at rho = " + std::to_string(rho_grid[j]));
        }
        t.flagged_rho.push_back(rho_grid[j]);
      }
    } else {
      std::fill(sign.begin(), sign.end(), 1.0);
    }
    for (int k = 0; k < n; ++k) {
      p.coeffs.col(k) *= sign[k];
      t.lambdas[k][j] = p.lambda[k];
    }
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const double s = sign[a] * sign[b];
        t.P[a][b][j] = s * p.P(a, b);
        t.Q[a][b][j] = s * p.Q(a, b);
        t.D[a][b][j] = s * p.D(a, b);
      }
    }
    if (j > 0) pts[j - 1].grid.reset();
  }
  return t;
}

/// U_n(rho) = (lambda_n + 3/4) / rho^2 - Q_nn on the table grid.
inline std::vector<double> effective_potential(const ChannelTable& table, int n) {
  if (n < 1 || n > table.channels) throw DomainError("effective_potential: channel index out of range");
  std::vector<double> u(table.size());
  for (std::size_t j = 0; j < table.size(); ++j) {
    const double r = table.rho[j];
    u[j] = (table.lambdas[n - 1][j] + 0.75) / (r * r) - table.Q[n - 1][n - 1][j];
  }
  return u;
}

}  // namespace halo2d
