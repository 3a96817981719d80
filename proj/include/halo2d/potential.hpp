#pragma once

// Two-body radial potentials in natural units hbar = m = 1 (m the particle
// mass). Lengths of finite-range models are measured in their own range b.

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

// pchip calls isnan unqualified and relies on boost::math::isnan being declared.
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>

#include "halo2d/errors.hpp"

namespace halo2d {

/// Contact interaction fixed entirely by its 2D scattering length.
struct ZeroRange {
  double a = 1.0;
};

/// V(r) = (1 / (2 b^2)) [S1 exp(-r^2 / (2 b^2)) + S2 exp(-2 r^2 / b^2)].
struct GaussianPair {
  double b = 1.0;
  double s1 = 0.0;
  double s2 = 0.0;
};

/// Pointwise table, interpolated by a monotone cubic and zero past its end.
struct Tabulated {
  std::vector<double> r;
  std::vector<double> v;
};

class PotentialSpec {
 public:
  static PotentialSpec zero_range(double a) {
    if (!(a > 0.0)) throw DomainError("zero_range: scattering length must be positive");
    return PotentialSpec(ZeroRange{a});
  }

  static PotentialSpec gaussian_pair(double b, double s1, double s2) {
    if (!(b > 0.0)) throw DomainError("gaussian_pair: range b must be positive");
    return PotentialSpec(GaussianPair{b, s1, s2});
  }

  static PotentialSpec tabulated(std::vector<double> r, std::vector<double> v) {
    if (r.size() < 2 || r.size() != v.size()) {
      throw DomainError("tabulated: need at least two (r, V) pairs of equal length");
    }
    for (std::size_t i = 1; i < r.size(); ++i) {
      if (!(r[i] > r[i - 1])) throw DomainError("tabulated: grid must be strictly ascending");
    }
    if (r.front() < 0.0) throw DomainError("tabulated: radii must be non-negative");
    double vmax = 0.0;
    for (double x : v) vmax = std::max(vmax, std::abs(x));
    if (std::abs(v.back()) > 1e-8 * std::max(vmax, 1e-300)) {
      throw DomainError("tabulated: potential must vanish at the last grid point");
    }
    PotentialSpec spec(Tabulated{r, v});
    spec.table_ = std::make_shared<const Interp>(std::move(r), std::move(v));
    return spec;
  }

  /// V = 0 expressed as a Gaussian with both strengths zero.
  static PotentialSpec free(double b = 1.0) { return gaussian_pair(b, 0.0, 0.0); }

  [[nodiscard]] bool is_zero_range() const { return std::holds_alternative<ZeroRange>(model_); }
  [[nodiscard]] const auto& model() const { return model_; }

  /// V(r). Not defined for the contact interaction, which is handled analytically.
  [[nodiscard]] double evaluate(double r) const {
    if (r < 0.0 || std::isnan(r)) throw DomainError("evaluate: r must be non-negative");
    if (const auto* g = std::get_if<GaussianPair>(&model_)) {
      const double x = r / g->b;
      return (g->s1 * std::exp(-0.5 * x * x) + g->s2 * std::exp(-2.0 * x * x)) / (2.0 * g->b * g->b);
    }
    if (const auto* t = std::get_if<Tabulated>(&model_)) {
      if (r >= t->r.back()) return 0.0;
      if (r <= t->r.front()) return t->v.front();
      return (*table_->pchip)(r);
    }
    throw DomainError("evaluate: zero-range potential is not pointwise evaluable");
  }

  /// a for the contact interaction, b for the Gaussian pair, last grid point
  /// for a table. Used to size grids.
  [[nodiscard]] double effective_range_scale() const {
    return std::visit(
        [](const auto& m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, ZeroRange>) {
            return m.a;
          } else if constexpr (std::is_same_v<T, GaussianPair>) {
            return m.b;
          } else {
            return m.r.back();
          }
        },
        model_);
  }

  /// True when V vanishes identically.
  [[nodiscard]] bool is_identically_zero() const {
    if (const auto* g = std::get_if<GaussianPair>(&model_)) return g->s1 == 0.0 && g->s2 == 0.0;
    if (const auto* t = std::get_if<Tabulated>(&model_)) {
      return std::all_of(t->v.begin(), t->v.end(), [](double x) { return x == 0.0; });
    }
    return false;
  }

  /// Largest |V| over the support (sampled for tables, analytic bound otherwise).
  [[nodiscard]] double max_abs() const {
    if (const auto* g = std::get_if<GaussianPair>(&model_)) {
      double m = 0.0;
      for (int i = 0; i <= 400; ++i) m = std::max(m, std::abs(evaluate(0.02 * i * g->b)));
      return m;
    }
    if (const auto* t = std::get_if<Tabulated>(&model_)) {
      double m = 0.0;
      for (double x : t->v) m = std::max(m, std::abs(x));
      return m;
    }
    throw DomainError("max_abs: zero-range potential has no pointwise values");
  }

 private:
  struct Interp {
    Interp(std::vector<double> r, std::vector<double> v)
        : pchip(std::make_unique<boost::math::interpolators::pchip<std::vector<double>>>(std::move(r),
                                                                                          std::move(v))) {}
    std::unique_ptr<boost::math::interpolators::pchip<std::vector<double>>> pchip;
  };

  explicit PotentialSpec(std::variant<ZeroRange, GaussianPair, Tabulated> m) : model_(std::move(m)) {}

  std::variant<ZeroRange, GaussianPair, Tabulated> model_;
  std::shared_ptr<const Interp> table_;
};

}  // namespace halo2d
