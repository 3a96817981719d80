#include <cmath>

#include <gtest/gtest.h>

#include "halo2d/angular.hpp"
#include "halo2d/hyperspherical.hpp"
#include "halo2d/twobody.hpp"

using namespace halo2d;

TEST(Angular, FreeSpectrum) {
  const auto s = solve_angular(PotentialSpec::free(), 2.0, 3);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_NEAR(s.lambdas[0], 0.0, 1e-6);
  EXPECT_NEAR(s.lambdas[1], 8.0, 1e-6);
  EXPECT_NEAR(s.lambdas[2], 24.0, 1e-6);
  EXPECT_FALSE(s.spurious[0]);
  EXPECT_TRUE(s.spurious[1]);
  EXPECT_FALSE(s.spurious[2]);
}

TEST(Angular, SpuriousSurvivesAnyPotential) {
  const auto s = solve_angular(PotentialSpec::gaussian_pair(1.0, -4.0, 0.0), 3.0, 4);
  int flagged = 0;
  for (std::size_t n = 0; n < s.size(); ++n) {
    if (s.spurious[n]) {
      ++flagged;
      EXPECT_NEAR(s.lambdas[n], 8.0, 1e-6);
      EXPECT_LT(s.totals.col(n).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
  EXPECT_EQ(flagged, 1);
}

// Pointwise residual of the Faddeev equation
//   -phi'' - 2 cot(2a) phi' + 2 rho^2 V(sqrt2 rho sin a) (phi + 2 R phi) = lambda phi
// with derivatives by differences of the interpolant and R by direct beta quadrature.
TEST(Angular, FaddeevResidualAtSamplePoints) {
  const auto spec = PotentialSpec::gaussian_pair(1.0, -4.0, 0.0);
  const double rho = 3.0;
  const auto s = solve_angular(spec, rho, 2);
  const auto& g = *s.grid;
  const Eigen::VectorXd c = s.coefficients.col(0);
  auto phi = [&](double a) { return g.evaluate(c, a); };
  const double lambda = s.lambdas[0];
  double scale = 0.0;
  for (double a = 0.05; a < 1.5; a += 0.05) scale = std::max(scale, std::abs(lambda * phi(a)));
  for (double a : {0.15, 0.4, 0.7, 1.0, 1.3}) {
    const double h = 1e-4;
    const double d1 = (phi(a + h) - phi(a - h)) / (2.0 * h);
    const double d2 = (phi(a + h) - 2.0 * phi(a) + phi(a - h)) / (h * h);
    const double total = phi(a) + 2.0 * kernel_average(phi, a, 512);
    const double v = spec.evaluate(kSqrt2 * rho * std::sin(a));
    const double residual = -d2 - 2.0 / std::tan(2.0 * a) * d1 + 2.0 * rho * rho * v * total - lambda * phi(a);
    EXPECT_LT(std::abs(residual), 1e-4 * scale) << "alpha " << a;
  }
}

TEST(Angular, GridConvergence) {
  const auto spec = PotentialSpec::gaussian_pair(1.0, -8.0, 10.0);
  AngularOptions lo;
  lo.order = 80;
  AngularOptions hi;
  hi.order = 120;
  for (double rho : {0.5, 5.0, 50.0}) {
    const auto a = solve_angular(spec, rho, 3, lo);
    const auto b = solve_angular(spec, rho, 3, hi);
    for (std::size_t n = 0; n < 3; ++n) {
      EXPECT_NEAR(a.lambdas[n], b.lambdas[n], 1e-6 * std::max(1.0, std::abs(b.lambdas[n]))) << rho << " " << n;
    }
  }
}

TEST(Angular, BoundPairChannelApproachesDimerEnergy) {
  const auto spec = PotentialSpec::gaussian_pair(1.0, -4.0, 0.0);
  const double e2 = bound_states(spec).back();
  const double rho = 200.0;
  const auto s = solve_angular(spec, rho, 1);
  // lambda_1 = 2 E2 rho^2 + O(1)
  EXPECT_NEAR(s.lambdas[0] / (2.0 * rho * rho), e2, 1e-4 * std::abs(e2));
}

TEST(Angular, ThreeBodyNormalization) {
  const auto s = solve_angular(PotentialSpec::gaussian_pair(1.0, -2.0, 0.0), 4.0, 3);
  const auto& g = *s.grid;
  for (std::size_t n = 0; n < s.size(); ++n) {
    if (s.spurious[n]) continue;
    EXPECT_NEAR(g.overlap(s.coefficients.col(n), s.coefficients.col(n)), 1.0, 1e-8);
  }
}

TEST(Angular, RejectsZeroRange) {
  EXPECT_THROW(solve_angular(PotentialSpec::zero_range(1.0), 1.0, 1), DomainError);
  EXPECT_THROW(solve_angular(PotentialSpec::free(), -1.0, 1), DomainError);
}
