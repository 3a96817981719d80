#pragma once

// Two-dimensional s-wave two-body problem for the relative motion
// (reduced mass 1/2, so 2 m* / hbar^2 = 1):
//
//   -u'' - u / (4 r^2) + V(r) u = E u,   u = sqrt(r) R(r).
//
// The integrators work with the regular radial function R (R(0) = 1,
// R'(0) = 0), which keeps the r -> 0 end free of the sqrt(r) cusp.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "halo2d/constants.hpp"
#include "halo2d/errors.hpp"
#include "halo2d/potential.hpp"
#include "halo2d/special.hpp"

namespace halo2d {

struct RadialProfile {
  std::vector<double> r;
  std::vector<double> u;
};

struct TwoBodyOptions {
  /// Integration step in units of the potential range.
  double step_over_range = 1.0 / 400.0;
  /// Matching radius to the free exterior solution, in units of the range.
  double match_over_range = 20.0;
  /// Scattering-length fit window, in units of the range.
  double fit_window_lo = 10.0;
  double fit_window_hi = 20.0;
  /// Relative energy tolerance of the node-count bisection.
  double energy_tolerance = 1e-12;
  /// Largest accepted Richardson (h vs h/2) energy disagreement, relative.
  double richardson_tolerance = 1e-7;
};

struct WeakBinding {
  double binding = 0.0;      ///< B = k^2 (natural units, 2 m* B / hbar^2 = B)
  double wave_number = 0.0;  ///< k = 2 e^{-gamma} / a
};

struct TwoBodySolution {
  std::optional<double> scattering_length;
  std::vector<double> bound_energies;  ///< ascending, all negative
  std::optional<double> wave_number;   ///< k of the shallowest state, k^2 = |E2|
  RadialProfile zero_energy_profile;
  int interior_nodes = 0;  ///< nodes of the zero-energy solution inside the fit window
};

/// k = 2 e^{-gamma} / a and B = k^2: the zero-range bound state of scattering length a.
inline WeakBinding weak_binding_energy(double a) {
  if (!(a > 0.0)) throw DomainError("weak_binding_energy: a must be positive");
  const double k = 2.0 * std::exp(-kEulerGamma) / a;
  return {k * k, k};
}

namespace detail {

// Fixed-step RK4 for the regular solution of R'' = -R'/r + (V - E) R.
// The potential is sampled once per step (three abscissae) and reused.
class RegularSolver {
 public:
  RegularSolver(const PotentialSpec& spec, double r_end, double h) : h_(h) {
    steps_ = static_cast<int>(std::ceil(r_end / h_));
    v_.resize(2 * steps_ + 1);
    for (int i = 0; i <= 2 * steps_; ++i) v_[i] = spec.evaluate(0.5 * i * h_);
  }

  [[nodiscard]] double step() const { return h_; }
  [[nodiscard]] int steps() const { return steps_; }

  struct State {
    double r;
    double R;
    double dR;
  };

  // Integrates outward, invoking visit(state) after every step.
  template <typename Visitor>
  State run(double energy, Visitor&& visit) const {
    // Series start at r = h: R = 1 + c r^2 / 4, c = V(0) - E.
    const double c = v_[0] - energy;
    State s{h_, 1.0 + 0.25 * c * h_ * h_, 0.5 * c * h_};
    visit(s);
    for (int i = 1; i < steps_; ++i) {
      const double r = s.r;
      const double v0 = v_[2 * i] - energy;
      const double vm = v_[2 * i + 1] - energy;
      const double v1 = v_[2 * i + 2] - energy;
      auto f = [](double rr, double vv, double R, double dR) { return -dR / rr + vv * R; };
      const double k1r = s.dR;
      const double k1d = f(r, v0, s.R, s.dR);
      const double k2r = s.dR + 0.5 * h_ * k1d;
      const double k2d = f(r + 0.5 * h_, vm, s.R + 0.5 * h_ * k1r, s.dR + 0.5 * h_ * k1d);
      const double k3r = s.dR + 0.5 * h_ * k2d;
      const double k3d = f(r + 0.5 * h_, vm, s.R + 0.5 * h_ * k2r, s.dR + 0.5 * h_ * k2d);
      const double k4r = s.dR + h_ * k3d;
      const double k4d = f(r + h_, v1, s.R + h_ * k3r, s.dR + h_ * k3d);
      s.R += h_ / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
      s.dR += h_ / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
      s.r = (i + 1) * h_;
      const double scale = std::max(std::abs(s.R), std::abs(s.dR));
      if (scale > 1e150) {
        s.R /= scale;
        s.dR /= scale;
      }
      visit(s);
    }
    return s;
  }

  // Number of eigenvalues below `energy` (< 0) for the problem on (0, inf):
  // interior nodes of R up to the matching radius plus one if the exterior
  // continuation a I0(kr) + b K0(kr) still crosses zero.
  [[nodiscard]] int count_below(double energy) const {
    int nodes = 0;
    double prev = 1.0;
    const State end = run(energy, [&](const State& s) {
      if (s.R == 0.0) return;
      if ((s.R > 0.0) != (prev > 0.0)) ++nodes;
      prev = s.R;
    });
    const double k = std::sqrt(-energy);
    const double x = k * end.r;
    // Only the sign of the I0 coefficient r (k K1 R + K0 R') matters, so use
    // the ratio K1/K0 (asymptotic form once K0 would underflow).
    const double ratio = x < 600.0 ? bessel_k1(x) / bessel_k0(x) : 1.0 + 0.5 / x - 0.125 / (x * x);
    const double alpha = k * ratio * end.R + end.dR;
    if (end.R != 0.0 && alpha != 0.0 && (alpha > 0.0) != (end.R > 0.0)) ++nodes;
    return nodes;
  }

 private:
  double h_;
  int steps_ = 0;
  std::vector<double> v_;
};

inline void require_finite_range(const PotentialSpec& spec, const char* what) {
  if (spec.is_zero_range()) {
    throw DomainError(std::string(what) + ": zero-range potential is handled analytically");
  }
}

inline double potential_minimum(const PotentialSpec& spec) {
  const double range = spec.effective_range_scale();
  double vmin = 0.0;
  for (int i = 0; i <= 4000; ++i) vmin = std::min(vmin, spec.evaluate(i * range * 1e-3));
  return vmin;
}

inline std::vector<double> bound_states_at_step(const PotentialSpec& spec, double e_min, double h,
                                                const TwoBodyOptions& opt) {
  const double range = spec.effective_range_scale();
  const RegularSolver solver(spec, opt.match_over_range * range, h);
  const double e_top = -1e-14 * std::max(std::abs(e_min), 1e-300);
  const int total = solver.count_below(e_top);
  const int below_min = solver.count_below(e_min);
  std::vector<double> energies;
  for (int n = below_min; n < total; ++n) {
    double lo = e_min;
    double hi = e_top;
    for (int it = 0; it < 400 && hi - lo > opt.energy_tolerance * std::abs(hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (solver.count_below(mid) > n) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    if (hi - lo > 1e3 * opt.energy_tolerance * std::abs(hi)) {
      throw NumericalError("bound_states: bisection did not converge");
    }
    energies.push_back(0.5 * (lo + hi));
  }
  return energies;
}

}  // namespace detail

/// s-wave bound-state energies in (e_min, 0), ascending, by node-count
/// bisection with K0 exterior matching. e_min defaults to min V.
inline std::vector<double> bound_states(const PotentialSpec& spec, std::optional<double> e_min = std::nullopt,
                                        const TwoBodyOptions& opt = {}) {
  if (spec.is_zero_range()) {
    return {-weak_binding_energy(std::get<ZeroRange>(spec.model()).a).binding};
  }
  if (spec.is_identically_zero()) return {};
  const double floor = e_min.value_or(detail::potential_minimum(spec));
  if (!(floor < 0.0)) return {};  // no attraction anywhere below zero
  // Halve the step until the h vs h/2 pair agrees; deep states in narrow
  // wells need more than the default resolution.
  double h = opt.step_over_range * spec.effective_range_scale();
  for (int refine = 0;; ++refine, h *= 0.5) {
    std::vector<double> coarse = detail::bound_states_at_step(spec, floor, h, opt);
    std::vector<double> fine = detail::bound_states_at_step(spec, floor, 0.5 * h, opt);
    bool ok = coarse.size() == fine.size();
    for (std::size_t i = 0; ok && i < fine.size(); ++i) {
      ok = std::abs(fine[i] - coarse[i]) <= opt.richardson_tolerance * std::abs(fine[i]) + 1e-15;
    }
    if (!ok) {
      if (refine < 3) continue;
      if (coarse.size() != fine.size()) {
        throw NumericalError("bound_states: state count changes under step halving");
      }
      throw NumericalError("bound_states: Richardson check failed (step too coarse)");
    }
    // Fourth-order extrapolation of the halved-step pair.
    for (std::size_t i = 0; i < fine.size(); ++i) fine[i] += (fine[i] - coarse[i]) / 15.0;
    return fine;
  }
}

/// Exact number of s-wave bound states, including those with exponentially
/// small binding: nodes of the zero-energy solution plus one if its
/// logarithmic tail C log r + D still crosses zero beyond the matching radius.
inline int count_bound_states(const PotentialSpec& spec, const TwoBodyOptions& opt = {}) {
  if (spec.is_zero_range()) return 1;
  if (spec.is_identically_zero()) return 0;
  const double range = spec.effective_range_scale();
  const detail::RegularSolver solver(spec, opt.match_over_range * range, opt.step_over_range * range);
  int nodes = 0;
  double prev = 1.0;
  const auto end = solver.run(0.0, [&](const detail::RegularSolver::State& s) {
    if (s.R == 0.0) return;
    if ((s.R > 0.0) != (prev > 0.0)) ++nodes;
    prev = s.R;
  });
  if (end.R != 0.0 && end.dR != 0.0 && (end.dR > 0.0) != (end.R > 0.0)) ++nodes;
  return nodes;
}

/// Zero-energy reduced solution u = sqrt(r) R sampled at r_i = r_max i / n,
/// i = 1..n, normalized so that u(r_max) = 1 when it does not vanish there.
inline RadialProfile zero_energy_solution(const PotentialSpec& spec, double r_max, int n_points,
                                          const TwoBodyOptions& opt = {}) {
  detail::require_finite_range(spec, "zero_energy_solution");
  const double range = spec.effective_range_scale();
  if (r_max < 20.0 * range * (1.0 - 1e-12)) {
    throw DomainError("zero_energy_solution: r_max must be at least 20 ranges");
  }
  if (n_points < 2) throw DomainError("zero_energy_solution: need at least two samples");
  const int per_sample =
      std::max(1, static_cast<int>(std::ceil(r_max / n_points / (opt.step_over_range * range))));
  const double h = r_max / (static_cast<double>(n_points) * per_sample);
  const detail::RegularSolver solver(spec, r_max + 0.5 * h, h);
  RadialProfile out;
  out.r.reserve(n_points);
  out.u.reserve(n_points);
  int step = 0;
  solver.run(0.0, [&](const detail::RegularSolver::State& s) {
    ++step;
    if (step % per_sample == 0 && static_cast<int>(out.r.size()) < n_points) {
      out.r.push_back(s.r);
      out.u.push_back(std::sqrt(s.r) * s.R);
    }
  });
  if (static_cast<int>(out.r.size()) != n_points || !std::isfinite(out.u.back())) {
    throw NumericalError("zero_energy_solution: integration did not reach r_max");
  }
  const double last = out.u.back();
  if (last != 0.0) {
    for (double& x : out.u) x /= last;
  }
  return out;
}

/// 2D scattering length: zero of the logarithmic asymptote R(r) = C log(r / a)
/// fitted over the window [lo, hi] x range.
inline double scattering_length(const PotentialSpec& spec, const TwoBodyOptions& opt = {}) {
  if (spec.is_zero_range()) return std::get<ZeroRange>(spec.model()).a;
  const double range = spec.effective_range_scale();
  const double lo = opt.fit_window_lo * range;
  const double hi = opt.fit_window_hi * range;
  if (!(hi > lo && lo > 0.0)) throw ConfigError("scattering_length: invalid fit window");
  const detail::RegularSolver solver(spec, hi + 0.5 * opt.step_over_range * range,
                                     opt.step_over_range * range);
  std::vector<double> xs;
  std::vector<double> ys;
  solver.run(0.0, [&](const detail::RegularSolver::State& s) {
    if (s.r >= lo && s.r <= hi) {
      xs.push_back(std::log(s.r));
      ys.push_back(s.R);
    }
  });
  const auto n = static_cast<double>(xs.size());
  if (n < 10) throw NumericalError("scattering_length: fit window holds too few samples");
  double sx = 0;
  double sy = 0;
  double sxx = 0;
  double sxy = 0;
  double syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  const double y_scale = std::sqrt(syy / n);
  if (std::abs(slope) * std::log(hi / lo) < 1e-9 * y_scale) {
    throw DomainError("scattering_length: undefined (no logarithmic term in the zero-energy solution)");
  }
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = ys[i] - (slope * xs[i] + intercept);
    ss += d * d;
  }
  const double rms = std::sqrt(ss / n);
  if (rms > 1e-6 * std::abs(slope)) {
    throw NumericalError("scattering_length: residual of log fit too large; widen or move the window");
  }
  return std::exp(-intercept / slope);
}

/// Everything the two-body analysis produces for one potential.
inline TwoBodySolution solve_two_body(const PotentialSpec& spec, const TwoBodyOptions& opt = {}) {
  TwoBodySolution out;
  if (spec.is_zero_range()) {
    const double a = std::get<ZeroRange>(spec.model()).a;
    const WeakBinding wb = weak_binding_energy(a);
    out.scattering_length = a;
    out.bound_energies = {-wb.binding};
    out.wave_number = wb.wave_number;
    return out;
  }
  out.bound_energies = bound_states(spec, std::nullopt, opt);
  if (!out.bound_energies.empty()) out.wave_number = std::sqrt(-out.bound_energies.back());
  if (!spec.is_identically_zero()) {
    try {
      out.scattering_length = scattering_length(spec, opt);
    } catch (const DomainError&) {
      out.scattering_length.reset();
    }
  }
  const double range = spec.effective_range_scale();
  out.zero_energy_profile = zero_energy_solution(spec, opt.fit_window_hi * range, 400, opt);
  const auto& u = out.zero_energy_profile.u;
  for (std::size_t i = 1; i < u.size(); ++i) {
    if ((u[i] > 0.0) != (u[i - 1] > 0.0) && u[i] != 0.0) ++out.interior_nodes;
  }
  return out;
}

}  // namespace halo2d
