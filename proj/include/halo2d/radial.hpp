#pragma once

// Hyperradial equations for the adiabatic channels,
//
//   [-d^2/drho^2 + (lambda_n + 3/4)/rho^2 + D_nn - 2E] f_n + couplings = 0,
//
// solved in x = log rho with f = rho^{1/2} g, where the centrifugal term turns
// into a smooth potential:
//
//   -g'' + [lambda_n + 1 + rho^2 D_nn - 2 E rho^2] g + couplings = 0.
//
// One channel: Numerov shooting with node-count bisection and outward/inward
// matching. Several channels: spectral-element Galerkin on the symmetric form
//
//   a(g, h) = int g'h' + (lambda + 1) g h + rho^2 g.D h + rho (g'.P h - g.P h') dx,
//
// with mass int rho^2 g h dx and eigenvalue 2E.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/interpolators/pchip.hpp>

#include "halo2d/channels.hpp"
#include "halo2d/errors.hpp"
#include "halo2d/spectral.hpp"

namespace halo2d {

struct RadialOptions {
  double x_step = 1e-3;            ///< Numerov step in log rho
  double energy_tolerance = 1e-10;  ///< relative
  int max_states = 16;
  bool force_galerkin = false;     ///< use the coupled solver even for one channel
  int element_order = 8;
  double element_width = 0.25;     ///< largest element in log rho
  double decay_per_element = 3.0;  ///< e-folds of the shallowest decay per element
  double phase_per_element = 2.0;  ///< radians of the deepest oscillation per element
};

struct EnergyWindow {
  std::optional<double> lo;
  std::optional<double> hi;  ///< defaults to the lowest threshold
};

struct ThreeBodyState {
  double E3 = 0.0;
  std::vector<double> rho;
  std::vector<std::vector<double>> f;  ///< [n][j], sum_n int f_n^2 drho = 1
  int nodes = 0;                       ///< excitation index
  int lowest_channel_nodes = 0;        ///< sign changes of f_1
  double rms_rho = 0.0;                ///< sqrt <rho^2>
};

/// Smooth interpolants of the table in x = log rho:
/// lambda_n - 2 thr_n rho^2, rho^2 D_nm and rho P_nm.
class ChannelInterpolant {
 public:
  explicit ChannelInterpolant(const ChannelTable& t) : n_(t.channels), thr_(t.thresholds) {
    const std::size_t m = t.size();
    std::vector<double> x(m);
    for (std::size_t j = 0; j < m; ++j) x[j] = std::log(t.rho[j]);
    x0_ = x.front();
    x1_ = x.back();
    bool uniform = true;
    const double dx = (x1_ - x0_) / static_cast<double>(m - 1);
    for (std::size_t j = 0; j < m; ++j) uniform = uniform && std::abs(x[j] - (x0_ + j * dx)) < 1e-9 * (1.0 + std::abs(x[j]));
    auto make = [&](std::vector<double> y) -> Fn {
      if (uniform) {
        auto s = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(y.begin(), y.end(), x0_, dx);
        return [s](double xx) { return (*s)(xx); };
      }
      auto p = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::vector<double>(x),
                                                                                         std::move(y));
      return [p](double xx) { return (*p)(xx); };
    };
    for (int a = 0; a < n_; ++a) {
      std::vector<double> l(m);
      for (std::size_t j = 0; j < m; ++j) l[j] = t.lambdas[a][j] - 2.0 * thr_[a] * t.rho[j] * t.rho[j];
      lam_.push_back(make(l));
    }
    d_.resize(n_ * n_);
    p_.resize(n_ * n_);
    for (int a = 0; a < n_; ++a) {
      for (int b = 0; b < n_; ++b) {
        std::vector<double> dd(m);
        std::vector<double> pp(m);
        for (std::size_t j = 0; j < m; ++j) {
          const double r = t.rho[j];
          dd[j] = 0.5 * (t.D[a][b][j] + t.D[b][a][j]) * r * r;
          pp[j] = 0.5 * (t.P[a][b][j] - t.P[b][a][j]) * r;
        }
        d_[a * n_ + b] = make(dd);
        p_[a * n_ + b] = make(pp);
      }
    }
  }

  [[nodiscard]] int channels() const { return n_; }
  [[nodiscard]] double x_min() const { return x0_; }
  [[nodiscard]] double x_max() const { return x1_; }
  [[nodiscard]] double threshold(int n) const { return thr_[n]; }
  /// lambda_n - 2 thr_n rho^2
  [[nodiscard]] double reduced_lambda(int n, double x) const { return lam_[n](x); }
  [[nodiscard]] double rho2_d(int a, int b, double x) const { return d_[a * n_ + b](x); }
  [[nodiscard]] double rho_p(int a, int b, double x) const { return p_[a * n_ + b](x); }

  /// Diagonal single-channel coefficient K(x) of -g'' + K g = 0 at energy E.
  [[nodiscard]] double k_diag(int n, double x, double energy) const {
    const double r2 = std::exp(2.0 * x);
    return reduced_lambda(n, x) + 1.0 + rho2_d(n, n, x) + 2.0 * (thr_[n] - energy) * r2;
  }

 private:
  using Fn = std::function<double(double)>;
  int n_;
  std::vector<double> thr_;
  double x0_ = 0.0;
  double x1_ = 0.0;
  std::vector<Fn> lam_;
  std::vector<Fn> d_;
  std::vector<Fn> p_;
};

namespace detail {

// Numerov for g'' = K g on a uniform x grid with g(x_0) = 0.
class NumerovChannel {
 public:
  NumerovChannel(const ChannelInterpolant& ip, int channel, double x_end, double step) : ip_(ip), n_(channel) {
    const int steps = std::max(16, static_cast<int>(std::ceil((x_end - ip.x_min()) / step)));
    h_ = (x_end - ip.x_min()) / steps;
    x_.resize(steps + 1);
    base_.resize(steps + 1);
    r2_.resize(steps + 1);
    for (int i = 0; i <= steps; ++i) {
      x_[i] = ip.x_min() + i * h_;
      r2_[i] = std::exp(2.0 * x_[i]);
      base_[i] = ip.k_diag(channel, x_[i], ip.threshold(channel));
    }
  }

  [[nodiscard]] std::vector<double> k_at(double energy) const {
    std::vector<double> k(x_.size());
    const double shift = 2.0 * (ip_.threshold(n_) - energy);
    for (std::size_t i = 0; i < x_.size(); ++i) k[i] = base_[i] + shift * r2_[i];
    return k;
  }

  // Last usable point: beyond the outermost classically allowed point, the
  // integration stops where h^2 K / 12 would destabilize Numerov. The solution
  // has decayed by many e-folds there.
  [[nodiscard]] std::size_t cut(const std::vector<double>& k) const {
    const double c = h_ * h_ / 12.0;
    std::size_t last_neg = 0;
    for (std::size_t i = k.size(); i-- > 0;) {
      if (k[i] < 0.0) {
        last_neg = i;
        break;
      }
    }
    for (std::size_t i = last_neg + 1; i < k.size(); ++i) {
      if (c * k[i] > 0.25) return i;
    }
    return k.size() - 1;
  }

  // Sign changes of the outward solution.
  [[nodiscard]] int nodes(double energy) const {
    const std::vector<double> k = k_at(energy);
    const double c = h_ * h_ / 12.0;
    const std::size_t end = cut(k);
    double gm = 0.0;
    double g = 1e-30;
    int count = 0;
    for (std::size_t i = 1; i < end; ++i) {
      const double gp = (2.0 * g * (1.0 + 5.0 * c * k[i]) - gm * (1.0 - c * k[i - 1])) / (1.0 - c * k[i + 1]);
      if ((gp > 0.0) != (g > 0.0) && gp != 0.0) ++count;
      gm = g;
      g = gp;
      if (std::abs(g) > 1e100) {
        g *= 1e-100;
        gm *= 1e-100;
      }
    }
    return count;
  }

  // Positions (in x) of the sign changes of the outward solution.
  [[nodiscard]] std::vector<double> node_positions(double energy) const {
    const std::vector<double> k = k_at(energy);
    const double c = h_ * h_ / 12.0;
    const std::size_t end = cut(k);
    std::vector<double> out;
    double gm = 0.0;
    double g = 1e-30;
    for (std::size_t i = 1; i < end; ++i) {
      const double gp = (2.0 * g * (1.0 + 5.0 * c * k[i]) - gm * (1.0 - c * k[i - 1])) / (1.0 - c * k[i + 1]);
      if ((gp > 0.0) != (g > 0.0) && gp != 0.0) out.push_back(x_[i] + h_ * g / (g - gp));
      gm = g;
      g = gp;
      if (std::abs(g) > 1e100) {
        g *= 1e-100;
        gm *= 1e-100;
      }
    }
    return out;
  }

  // Outward and inward solutions joined at the outermost point with K < 0.
  [[nodiscard]] std::vector<double> eigenfunction(double energy) const {
    const std::vector<double> k = k_at(energy);
    const std::size_t n = cut(k) + 1;
    const double c = h_ * h_ / 12.0;
    std::size_t match = n / 2;
    for (std::size_t i = n - 2; i > 1; --i) {
      if (k[i] < 0.0) {
        match = i;
        break;
      }
    }
    std::vector<double> out(n, 0.0);
    std::vector<double> in(n, 0.0);
    out[1] = 1e-30;
    for (std::size_t i = 1; i < match + 1 && i + 1 < n; ++i) {
      out[i + 1] = (2.0 * out[i] * (1.0 + 5.0 * c * k[i]) - out[i - 1] * (1.0 - c * k[i - 1])) / (1.0 - c * k[i + 1]);
      if (std::abs(out[i + 1]) > 1e100) {
        for (std::size_t j = 0; j <= i + 1; ++j) out[j] *= 1e-100;
      }
    }
    in[n - 2] = 1e-30;
    for (std::size_t i = n - 2; i > match - 1 && i >= 1; --i) {
      in[i - 1] = (2.0 * in[i] * (1.0 + 5.0 * c * k[i]) - in[i + 1] * (1.0 - c * k[i + 1])) / (1.0 - c * k[i - 1]);
      if (std::abs(in[i - 1]) > 1e100) {
        for (std::size_t j = i - 1; j < n; ++j) in[j] *= 1e-100;
      }
    }
    std::vector<double> g(k.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) g[i] = i <= match ? out[i] / out[match] : in[i] / in[match];
    return g;
  }

  [[nodiscard]] const std::vector<double>& x() const { return x_; }
  [[nodiscard]] double step() const { return h_; }

  // Lowest energy at which K can turn negative anywhere.
  [[nodiscard]] double energy_floor() const {
    double lo = ip_.threshold(n_);
    for (std::size_t i = 0; i < x_.size(); ++i) lo = std::min(lo, ip_.threshold(n_) + base_[i] / (2.0 * r2_[i]));
    return lo;
  }

 private:
  const ChannelInterpolant& ip_;
  int n_;
  double h_ = 0.0;
  std::vector<double> x_;
  std::vector<double> base_;
  std::vector<double> r2_;
};

inline ThreeBodyState state_from_single(const NumerovChannel& nc, double energy, int index) {
  std::vector<double> g = nc.eigenfunction(energy);
  const std::vector<double>& x = nc.x();
  const double h = nc.step();
  double norm = 0.0;
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double w = (i == 0 || i + 1 == x.size()) ? 0.5 * h : h;
    const double rho2 = std::exp(2.0 * x[i]);
    norm += w * rho2 * g[i] * g[i];
    r2 += w * rho2 * rho2 * g[i] * g[i];
  }
  ThreeBodyState s;
  s.E3 = energy;
  s.nodes = index;
  s.rho.resize(x.size());
  s.f.assign(1, std::vector<double>(x.size()));
  const double inv = 1.0 / std::sqrt(norm);
  // Sign convention: positive near the origin.
  double first = 0.0;
  for (double v : g) {
    if (v != 0.0) {
      first = v;
      break;
    }
  }
  const double sgn = first < 0.0 ? -1.0 : 1.0;
  int changes = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s.rho[i] = std::exp(x[i]);
    s.f[0][i] = sgn * inv * std::sqrt(s.rho[i]) * g[i];
    if (i > 0 && s.f[0][i] != 0.0 && s.f[0][i - 1] != 0.0 && (s.f[0][i] > 0.0) != (s.f[0][i - 1] > 0.0)) ++changes;
  }
  s.lowest_channel_nodes = changes;
  s.rms_rho = std::sqrt(r2 / norm);
  return s;
}

inline std::vector<ThreeBodyState> single_channel_states(const ChannelInterpolant& ip, const EnergyWindow& window,
                                                         const RadialOptions& opt) {
  const NumerovChannel nc(ip, 0, ip.x_max(), opt.x_step);
  const double thr = ip.threshold(0);
  const double hi = std::min(window.hi.value_or(thr), thr);
  const double lo = std::max(window.lo.value_or(-1e300), nc.energy_floor());
  if (!(hi > lo)) return {};
  const int n_lo = nc.nodes(lo);
  const int n_hi = std::min(nc.nodes(hi), n_lo + opt.max_states);
  std::vector<ThreeBodyState> out;
  const double scale = std::max(std::abs(lo), std::abs(hi));
  for (int n = n_lo; n < n_hi; ++n) {
    double a = lo;
    double b = hi;
    for (int it = 0; it < 400 && b - a > opt.energy_tolerance * std::max(std::abs(b), 1e-12 * scale); ++it) {
      const double mid = 0.5 * (a + b);
      if (nc.nodes(mid) > n) {
        b = mid;
      } else {
        a = mid;
      }
    }
    out.push_back(state_from_single(nc, 0.5 * (a + b), n));
  }
  return out;
}

// Spectral-element mesh in x: element widths bounded by the largest width,
// the shallowest decay length and the deepest local wavelength.
inline std::vector<double> element_edges(const ChannelInterpolant& ip, double kappa, const RadialOptions& opt) {
  std::vector<double> edges{ip.x_min()};
  double x = ip.x_min();
  while (x < ip.x_max()) {
    double w = opt.element_width;
    const double rho = std::exp(x);
    if (kappa > 0.0) w = std::min(w, opt.decay_per_element / (kappa * rho));
    double kneg = 0.0;
    for (int n = 0; n < ip.channels(); ++n) kneg = std::max(kneg, -ip.k_diag(n, std::min(x, ip.x_max()), ip.threshold(n)));
    if (kneg > 0.0) w = std::min(w, opt.phase_per_element / std::sqrt(kneg));
    w = std::max(w, 1e-4);
    x = std::min(ip.x_max(), x + w);
    if (ip.x_max() - x < 0.2 * w) x = ip.x_max();
    edges.push_back(x);
  }
  return edges;
}

inline std::vector<ThreeBodyState> coupled_states(const ChannelInterpolant& ip, const EnergyWindow& window,
                                                  const RadialOptions& opt) {
  const int nch = ip.channels();
  double thr_low = ip.threshold(0);
  for (int n = 1; n < nch; ++n) thr_low = std::min(thr_low, ip.threshold(n));
  const double hi = std::min(window.hi.value_or(thr_low), thr_low);

  // Decay scale for the mesh from the single-channel spectrum (an upper bound
  // on the coupled energies, so a conservative decay rate).
  RadialOptions single = opt;
  single.max_states = 64;
  const std::vector<ThreeBodyState> guess = single_channel_states(ip, EnergyWindow{std::nullopt, hi}, single);
  double e_shallow = guess.empty() ? thr_low - 1e-3 * std::max(1.0, std::abs(thr_low)) : guess.back().E3;
  const double kappa = std::sqrt(2.0 * std::max(thr_low - e_shallow, 1e-12));

  const std::vector<double> edges = element_edges(ip, kappa, opt);
  const int p = opt.element_order;
  const Eigen::VectorXd tl = spectral::gauss_lobatto_nodes(p);
  const Eigen::VectorXd bw = spectral::barycentric_weights(tl);
  const Eigen::MatrixXd dm = spectral::differentiation_matrix(tl, bw);
  const spectral::Quadrature gq = spectral::gauss_legendre(p + 4);
  Eigen::MatrixXd bq(gq.nodes.size(), p + 1);
  for (Eigen::Index q = 0; q < gq.nodes.size(); ++q) bq.row(q) = spectral::interpolation_row(tl, bw, gq.nodes(q));
  const Eigen::MatrixXd dq = bq * dm;

  const int ne = static_cast<int>(edges.size()) - 1;
  const int nodes_per_channel = ne * p + 1;
  // Dirichlet at both ends: drop the first and last node of every channel.
  const int inner = nodes_per_channel - 2;
  const int size = inner * nch;
  if (size > 12000) throw GridError("solve_bound_states: coupled problem too large; coarsen the mesh");
  auto dof = [&](int ch, int node) { return (node <= 0 || node >= nodes_per_channel - 1) ? -1 : ch * inner + node - 1; };

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(size, size);
  std::vector<double> node_x(nodes_per_channel);
  for (int e = 0; e < ne; ++e) {
    const double xa = edges[e];
    const double xb = edges[e + 1];
    const double half = 0.5 * (xb - xa);
    for (int i = 0; i <= p; ++i) node_x[e * p + i] = xa + half * (1.0 + tl(i));
    for (Eigen::Index q = 0; q < gq.nodes.size(); ++q) {
      const double x = xa + half * (1.0 + gq.nodes(q));
      const double w = half * gq.weights(q);
      const double r2 = std::exp(2.0 * x);
      for (int n = 0; n < nch; ++n) {
        const double lam1 = ip.reduced_lambda(n, x) + 2.0 * ip.threshold(n) * r2 + 1.0;
        for (int m = 0; m < nch; ++m) {
          const double dnm = ip.rho2_d(n, m, x);
          const double pnm = n == m ? 0.0 : ip.rho_p(n, m, x);
          for (int i = 0; i <= p; ++i) {
            const int r = dof(n, e * p + i);
            if (r < 0) continue;
            const double li = bq(q, i);
            const double di = dq(q, i) / half;
            for (int j = 0; j <= p; ++j) {
              const int c = dof(m, e * p + j);
              if (c < 0) continue;
              const double lj = bq(q, j);
              const double dj = dq(q, j) / half;
              double v = dnm * li * lj + pnm * (di * lj - li * dj);
              if (n == m) {
                v += di * dj + lam1 * li * lj;
                b(r, c) += w * r2 * li * lj;
              }
              a(r, c) += w * v;
            }
          }
        }
      }
    }
  }
  a = 0.5 * (a + a.transpose()).eval();
  b = 0.5 * (b + b.transpose()).eval();
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b);
  if (es.info() != Eigen::Success) throw NumericalError("solve_bound_states: coupled eigensolver failed");

  std::vector<ThreeBodyState> out;
  const double lo = window.lo.value_or(-1e300);
  for (Eigen::Index k = 0; k < es.eigenvalues().size() && static_cast<int>(out.size()) < opt.max_states; ++k) {
    const double e = 0.5 * es.eigenvalues()(k);
    if (e >= hi) break;
    if (e <= lo) continue;
    const Eigen::VectorXd v = es.eigenvectors().col(k);
    ThreeBodyState s;
    s.E3 = e;
    s.nodes = static_cast<int>(out.size());
    s.rho.resize(nodes_per_channel);
    s.f.assign(nch, std::vector<double>(nodes_per_channel, 0.0));
    for (int i = 0; i < nodes_per_channel; ++i) s.rho[i] = std::exp(node_x[i]);
    for (int n = 0; n < nch; ++n) {
      for (int i = 0; i < nodes_per_channel; ++i) {
        const int d = dof(n, i);
        s.f[n][i] = d < 0 ? 0.0 : std::sqrt(s.rho[i]) * v(d);
      }
    }
    // <rho^2> by the element quadrature.
    double r2 = 0.0;
    double norm = 0.0;
    for (int el = 0; el < ne; ++el) {
      const double half = 0.5 * (edges[el + 1] - edges[el]);
      for (Eigen::Index q = 0; q < gq.nodes.size(); ++q) {
        const double x = edges[el] + half * (1.0 + gq.nodes(q));
        const double rr = std::exp(2.0 * x);
        for (int n = 0; n < nch; ++n) {
          double g = 0.0;
          for (int i = 0; i <= p; ++i) {
            const int d = dof(n, el * p + i);
            if (d >= 0) g += bq(q, i) * v(d);
          }
          norm += half * gq.weights(q) * rr * g * g;
          r2 += half * gq.weights(q) * rr * rr * g * g;
        }
      }
    }
    const double inv = 1.0 / std::sqrt(norm);
    double first = 0.0;
    for (double val : s.f[0]) {
      if (std::abs(val) > 1e-12) {
        first = val;
        break;
      }
    }
    for (auto& row : s.f) {
      for (double& val : row) val *= (first < 0.0 ? -inv : inv);
    }
    int changes = 0;
    for (std::size_t i = 1; i < s.f[0].size(); ++i) {
      if (s.f[0][i] != 0.0 && s.f[0][i - 1] != 0.0 && (s.f[0][i] > 0.0) != (s.f[0][i - 1] > 0.0)) ++changes;
    }
    s.lowest_channel_nodes = changes;
    s.rms_rho = std::sqrt(r2 / norm);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

/// Bound states below the lowest threshold (or inside `window`), ascending in
/// energy. One channel uses Numerov shooting; several use the coupled solver.
inline std::vector<ThreeBodyState> solve_bound_states(const ChannelTable& table, const EnergyWindow& window = {},
                                                      const RadialOptions& opt = {}) {
  if (table.size() < 4 || table.channels < 1) throw DomainError("solve_bound_states: empty channel table");
  const ChannelInterpolant ip(table);
  if (table.channels == 1 && !opt.force_galerkin) return detail::single_channel_states(ip, window, opt);
  return detail::coupled_states(ip, window, opt);
}

/// sqrt <rho^2> = sqrt(sum_n int f_n^2 rho^2 drho) for a normalized state.
inline double rms_hyperradius(const ThreeBodyState& s) {
  double norm = 0.0;
  double r2 = 0.0;
  for (const auto& fn : s.f) {
    for (std::size_t i = 1; i < s.rho.size(); ++i) {
      const double h = s.rho[i] - s.rho[i - 1];
      norm += 0.5 * h * (fn[i] * fn[i] + fn[i - 1] * fn[i - 1]);
      r2 += 0.5 * h * (fn[i] * fn[i] * s.rho[i] * s.rho[i] + fn[i - 1] * fn[i - 1] * s.rho[i - 1] * s.rho[i - 1]);
    }
  }
  if (std::abs(norm - 1.0) > 1e-3) throw DomainError("rms_hyperradius: state is not normalized");
  return std::sqrt(r2 / norm);
}

/// Root-mean-square distance of a particle from the centre of mass,
/// sqrt(<rho^2> / 3) for three identical particles.
inline double rms_center_of_mass_radius(const ThreeBodyState& s) { return s.rms_rho / std::sqrt(3.0); }

namespace detail {

inline NumerovChannel threshold_channel(const ChannelInterpolant& ip, double rho_max, const RadialOptions& opt) {
  return NumerovChannel(ip, 0, std::log(std::max(rho_max, std::exp(ip.x_min() + 1e-3))), opt.x_step);
}

inline void check_reach(const ChannelTable& table, double rho_max) {
  if (rho_max > table.rho.back() * (1.0 + 1e-12)) {
    throw DomainError("count_zero_energy_nodes: channel table ends before rho_max");
  }
}

}  // namespace detail

/// Nodes of the lowest-channel solution at the break-up threshold, integrated
/// outward to rho_max. Equals the number of bound states below threshold.
inline int count_zero_energy_nodes(const ChannelTable& table, double rho_max, const RadialOptions& opt = {}) {
  detail::check_reach(table, rho_max);
  const ChannelInterpolant ip(table);
  return detail::threshold_channel(ip, rho_max, opt).nodes(ip.threshold(0));
}

/// Hyperradii of those nodes.
inline std::vector<double> zero_energy_node_positions(const ChannelTable& table, double rho_max,
                                                      const RadialOptions& opt = {}) {
  detail::check_reach(table, rho_max);
  const ChannelInterpolant ip(table);
  std::vector<double> x = detail::threshold_channel(ip, rho_max, opt).node_positions(ip.threshold(0));
  for (double& v : x) v = std::exp(v);
  return x;
}

}  // namespace halo2d
