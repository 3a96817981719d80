#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "halo2d/potential.hpp"
#include "halo2d/survey.hpp"

using namespace halo2d;

TEST(Potential, GaussianValues) {
  const auto p = PotentialSpec::gaussian_pair(2.0, -3.0, 5.0);
  EXPECT_NEAR(p.evaluate(0.0), (5.0 - 3.0) / 8.0, 1e-15);
  const double r = 1.3;
  const double x = r / 2.0;
  EXPECT_NEAR(p.evaluate(r), (-3.0 * std::exp(-0.5 * x * x) + 5.0 * std::exp(-2.0 * x * x)) / 8.0, 1e-15);
  EXPECT_DOUBLE_EQ(p.effective_range_scale(), 2.0);
}

TEST(Potential, GaussianDecaysWithinTwentyRanges) {
  const auto p = PotentialSpec::gaussian_pair(1.0, -100.0, 40.0);
  EXPECT_LT(std::abs(p.evaluate(20.0)), 1e-80);
}

TEST(Potential, FreeIsIdenticallyZero) {
  EXPECT_TRUE(PotentialSpec::free().is_identically_zero());
  EXPECT_FALSE(PotentialSpec::gaussian_pair(1, -1, 0).is_identically_zero());
}

TEST(Potential, ZeroRangeHasNoPointValues) {
  const auto z = PotentialSpec::zero_range(1.0);
  EXPECT_TRUE(z.is_zero_range());
  EXPECT_THROW(static_cast<void>(z.evaluate(1.0)), DomainError);
  EXPECT_THROW(PotentialSpec::zero_range(-1.0), DomainError);
}

TEST(Potential, TabulatedInterpolatesAndVanishesOutside) {
  std::vector<double> r;
  std::vector<double> v;
  for (int i = 0; i <= 200; ++i) {
    r.push_back(0.05 * i);
    v.push_back(i == 200 ? 0.0 : -std::exp(-r.back() * r.back()));
  }
  const auto t = PotentialSpec::tabulated(r, v);
  EXPECT_NEAR(t.evaluate(0.512), -std::exp(-0.512 * 0.512), 1e-4);
  EXPECT_EQ(t.evaluate(10.0), 0.0);
  EXPECT_EQ(t.evaluate(50.0), 0.0);
  EXPECT_DOUBLE_EQ(t.effective_range_scale(), 10.0);
}

TEST(Potential, TabulatedValidation) {
  EXPECT_THROW(PotentialSpec::tabulated({0.0}, {0.0}), DomainError);
  EXPECT_THROW(PotentialSpec::tabulated({0.0, 1.0, 0.5}, {1.0, 1.0, 0.0}), DomainError);
  EXPECT_THROW(PotentialSpec::tabulated({0.0, 1.0}, {-1.0, -0.5}), DomainError);
}

TEST(Potential, FromConfig) {
  auto c = Config::parse("potential.type = gaussian\npotential.b = 1.5\npotential.S1 = -4\npotential.S2 = 2\n");
  const auto p = potential_from_config(c);
  const auto& g = std::get<GaussianPair>(p.model());
  EXPECT_DOUBLE_EQ(g.b, 1.5);
  EXPECT_DOUBLE_EQ(g.s1, -4.0);
  EXPECT_DOUBLE_EQ(g.s2, 2.0);

  auto z = Config::parse("potential.type = zero_range\npotential.a = 3\n");
  EXPECT_DOUBLE_EQ(std::get<ZeroRange>(potential_from_config(z).model()).a, 3.0);
  EXPECT_THROW(potential_from_config(Config::parse("potential.type = square\n")), ConfigError);
}

TEST(Potential, TabulatedFile) {
  const std::string path = testing::TempDir() + "halo2d_table.txt";
  {
    std::ofstream out(path);
    out << "# r V\n0 -2\n0.5 -1\n1 -0.25\n2 0\n";
  }
  const auto p = load_tabulated_potential(path);
  EXPECT_DOUBLE_EQ(p.evaluate(0.5), -1.0);
  EXPECT_EQ(p.evaluate(3.0), 0.0);
  EXPECT_THROW(load_tabulated_potential(path + ".missing"), ConfigError);
}
