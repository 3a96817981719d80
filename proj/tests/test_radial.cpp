#include <cmath>

#include <gtest/gtest.h>

#include "halo2d/radial.hpp"
#include "halo2d/survey.hpp"

using namespace halo2d;

namespace {

// lambda = omega^2 rho^4, D = -depth: the radial equation becomes the planar
// oscillator with |m| = 1 shifted down by depth / 2, E_n = 2 omega (n + 1) - depth / 2.
ChannelTable oscillator_table(double omega, double depth) {
  ChannelTable t;
  t.source = ChannelTable::Source::finite_range;
  t.potential = PotentialSpec::free();
  t.rho = make_log_grid(1e-3, 12.0, 600);
  t.channels = 1;
  const std::size_t m = t.rho.size();
  t.lambdas.assign(1, std::vector<double>(m));
  t.P = detail::cube(1, m);
  t.Q = detail::cube(1, m);
  t.D = detail::cube(1, m);
  for (std::size_t j = 0; j < m; ++j) {
    const double r = t.rho[j];
    t.lambdas[0][j] = omega * omega * r * r * r * r;
    t.D[0][0][j] = -depth;
    t.Q[0][0][j] = depth;
  }
  t.thresholds = {0.0};
  return t;
}

const ChannelTable& zero_range() {
  static const ChannelTable t = zero_range_table(1.0);
  return t;
}

}  // namespace

TEST(Radial, OscillatorSpectrum) {
  const auto t = oscillator_table(1.0, 20.0);
  const auto states = solve_bound_states(t);
  ASSERT_EQ(states.size(), 4u);
  for (std::size_t n = 0; n < states.size(); ++n) {
    EXPECT_NEAR(states[n].E3, 2.0 * (n + 1.0) - 10.0, 1e-5) << n;
    EXPECT_EQ(states[n].nodes, static_cast<int>(n));
    EXPECT_EQ(states[n].lowest_channel_nodes, static_cast<int>(n));
  }
  // <rho^2> of the |m| = 1 ground state is (|m| + 1) / omega.
  EXPECT_NEAR(rms_hyperradius(states[0]), std::sqrt(2.0), 1e-4);
}

TEST(Radial, GalerkinAgreesWithShooting) {
  const auto t = oscillator_table(0.5, 6.0);
  RadialOptions g;
  g.force_galerkin = true;
  const auto a = solve_bound_states(t);
  const auto b = solve_bound_states(t, {}, g);
  ASSERT_EQ(a.size(), b.size());
  ASSERT_FALSE(a.empty());
  for (std::size_t n = 0; n < a.size(); ++n) EXPECT_NEAR(a[n].E3, b[n].E3, 1e-7 * std::abs(a[n].E3));
}

TEST(Radial, EnergyWindow) {
  const auto t = oscillator_table(1.0, 20.0);
  const auto states = solve_bound_states(t, {-7.0, -3.0});
  ASSERT_EQ(states.size(), 2u);
  EXPECT_NEAR(states[0].E3, -6.0, 1e-5);
  EXPECT_NEAR(states[1].E3, -4.0, 1e-5);
}

TEST(Radial, FreeTableHasNoStates) {
  const auto t = build_channel_table(PotentialSpec::free(), make_log_grid(0.01, 50.0, 30), 1);
  EXPECT_TRUE(solve_bound_states(t).empty());
  EXPECT_EQ(count_zero_energy_nodes(t, 50.0), 0);
}

TEST(Radial, ZeroRangeUniversalStates) {
  const auto& t = zero_range();
  const double e2 = t.thresholds[0];
  const auto states = solve_bound_states(t);
  ASSERT_EQ(states.size(), 2u);
  EXPECT_NEAR(states[0].E3 / e2, 16.52, 0.01 * 16.52);
  EXPECT_NEAR(states[1].E3 / e2, 1.267, 0.005 * 1.267);
  EXPECT_NEAR(rms_center_of_mass_radius(states[0]), 0.111, 0.03 * 0.111);
  EXPECT_NEAR(rms_center_of_mass_radius(states[1]), 0.927, 0.03 * 0.927);
  for (const auto& s : states) {
    EXPECT_LT(s.E3, e2);
    EXPECT_NEAR(rms_hyperradius(s), s.rms_rho, 1e-6 * s.rms_rho);
  }
}

TEST(Radial, ZeroRangeTailDecaysAtSeparationEnergy) {
  const auto& t = zero_range();
  const auto states = solve_bound_states(t);
  const auto& s = states[1];
  const double kappa = std::sqrt(2.0 * (t.thresholds[0] - s.E3));
  // Fit log f between 8 and 16 decay lengths.
  std::size_t i0 = 0;
  std::size_t i1 = 0;
  for (std::size_t j = 0; j < s.rho.size(); ++j) {
    if (s.rho[j] <= 8.0 / kappa) i0 = j;
    if (s.rho[j] <= 16.0 / kappa) i1 = j;
  }
  ASSERT_GT(i1, i0);
  const double slope = (std::log(std::abs(s.f[0][i1])) - std::log(std::abs(s.f[0][i0]))) / (s.rho[i1] - s.rho[i0]);
  EXPECT_NEAR(slope, -kappa, 0.02 * kappa);
}

TEST(Radial, NoThirdZeroRangeState) {
  const auto t = zero_range_table(1.0, 1000.0, 30);
  EXPECT_EQ(count_zero_energy_nodes(t, 1000.0), 2);
  EXPECT_THROW(count_zero_energy_nodes(t, 2000.0), DomainError);
}

TEST(Radial, RmsRequiresNormalizedState) {
  ThreeBodyState s;
  s.rho = {0.0, 1.0, 2.0};
  s.f = {{0.0, 5.0, 0.0}};
  EXPECT_THROW(rms_hyperradius(s), DomainError);
}

TEST(Radial, RmsOfNarrowProfile) {
  ThreeBodyState s;
  const double rho0 = 3.0;
  const double w = 0.01;
  double norm = 0.0;
  for (int i = 0; i <= 6000; ++i) {
    const double r = 6.0 * i / 6000.0;
    s.rho.push_back(r);
  }
  s.f.assign(1, {});
  for (double r : s.rho) s.f[0].push_back(std::exp(-0.5 * (r - rho0) * (r - rho0) / (w * w)));
  for (std::size_t i = 1; i < s.rho.size(); ++i) {
    norm += 0.5 * (s.rho[i] - s.rho[i - 1]) * (s.f[0][i] * s.f[0][i] + s.f[0][i - 1] * s.f[0][i - 1]);
  }
  for (double& v : s.f[0]) v /= std::sqrt(norm);
  EXPECT_NEAR(rms_hyperradius(s), rho0, 1e-4);
}
