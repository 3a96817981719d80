#include <cmath>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <gtest/gtest.h>

#include "halo2d/special.hpp"
#include "oracles.hpp"

using namespace halo2d;

TEST(Digamma, MatchesBoostOnRealAxis) {
  for (double x : {0.1, 0.5, 1.0, 2.5, 7.0, 31.0, -0.5, -2.3}) {
    EXPECT_NEAR(digamma(x), boost::math::digamma(x), 1e-12 * std::max(1.0, std::abs(boost::math::digamma(x))))
        << x;
  }
}

TEST(Digamma, RecurrenceOffAxis) {
  const std::complex<double> z{0.5, -1.7};
  EXPECT_LT(std::abs(digamma(z + 1.0) - digamma(z) - 1.0 / z), 1e-12);
}

TEST(Digamma, RejectsPoles) { EXPECT_THROW(digamma(-3.0), DomainError); }

TEST(Legendre, IntegerDegreeIsThePolynomial) {
  for (int n = 0; n <= 5; ++n) {
    for (double x : {-0.9, -0.3, 0.0, 0.4, 0.95}) {
      EXPECT_NEAR(legendre_p(LegendreDegree::from_nu(n), x), boost::math::legendre_p(n, x), 1e-11) << n << " " << x;
    }
  }
}

TEST(Legendre, RealDegreeAgainstMehlerDirichlet) {
  for (double nu : {0.13, 0.5, 1.37, 2.9}) {
    const auto deg = LegendreDegree::from_nu(nu);
    for (double theta : {0.2, 1.0, 2.0, 2.9}) {
      const double ref = oracle::mehler_dirichlet(deg.mu, theta);
      EXPECT_NEAR(legendre_p_cos(deg, theta), ref, 1e-9 * std::max(1.0, std::abs(ref))) << nu << " " << theta;
    }
  }
}

TEST(Legendre, ConicalAgainstMehlerDirichlet) {
  for (double tau : {0.3, 1.0, 2.5}) {
    const auto deg = LegendreDegree::conical(tau);
    ASSERT_TRUE(deg.is_conical());
    EXPECT_NEAR(deg.tau(), tau, 1e-14);
    for (double theta : {0.3, 1.2, 2.4}) {
      const double ref = oracle::mehler_dirichlet(deg.mu, theta);
      EXPECT_NEAR(legendre_p_cos(deg, theta), ref, 1e-9 * std::max(1.0, std::abs(ref))) << tau << " " << theta;
    }
  }
}

TEST(Legendre, DegreeFromLambda) {
  // lambda = 4 nu (nu + 1)
  EXPECT_NEAR(LegendreDegree::from_lambda(8.0).real_nu(), 1.0, 1e-14);
  EXPECT_NEAR(LegendreDegree::from_lambda(24.0).real_nu(), 2.0, 1e-14);
  EXPECT_TRUE(LegendreDegree::from_lambda(-1.5).is_conical());
  EXPECT_FALSE(LegendreDegree::from_lambda(-0.5).is_conical());
}
