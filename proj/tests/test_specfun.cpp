#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <boost/math/special_functions/bessel.hpp>

#include "oracles.hpp"
#include "uvturb/modem.hpp"
#include "uvturb/specfun.hpp"

using namespace uvturb;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(LnGamma, HalfAndInteger) {
  EXPECT_NEAR(ln_gamma(0.5), 0.5 * std::log(std::numbers::pi), 1e-14);
  EXPECT_NEAR(ln_gamma(5.0), std::log(24.0), 1e-14);
}

TEST(LnGamma, RealRangeAgainstStdGamma) {
  for (double x = 0.1; x <= 50.0; x += 0.37) {
    EXPECT_LT(rel(std::exp(ln_gamma(x)), std::tgamma(x)), 1e-12) << "x = " << x;
  }
}

TEST(LnGamma, NegativeNonIntegerUsesReflection) {
  for (double x : {-0.5, -1.3, -4.75, -10.1}) {
    EXPECT_LT(rel(gamma_fn(x), std::tgamma(x)), 1e-12) << "x = " << x;
  }
}

TEST(LnGamma, PolesAreRejected) {
  for (double x : {0.0, -1.0, -7.0}) {
    EXPECT_THROW(ln_gamma(x), DomainError) << "x = " << x;
  }
}

TEST(LnGamma, ComplexMatchesStirling) {
  const std::complex<double> pts[] = {{1.0, 1.0}, {0.3, -2.0}, {5.5, 12.0}, {-2.3, 0.7}, {0.01, 40.0}};
  for (auto z : pts) {
    const auto mine = std::exp(ln_gamma(z));
    const auto ref = std::exp(oracle::stirling_lgamma(z));
    EXPECT_LT(std::abs(mine - ref) / std::abs(ref), 1e-10) << "z = " << z;
    EXPECT_NEAR(ln_gamma(z).real(), oracle::stirling_lgamma(z).real(), 1e-10 * (1.0 + std::abs(ln_gamma(z))));
  }
}

TEST(LnGamma, ComplexOnRealAxisAgreesWithReal) {
  for (double x : {0.2, 1.7, 9.0, 33.3}) {
    EXPECT_NEAR(ln_gamma(std::complex<double>(x, 0.0)).real(), ln_gamma(x), 1e-13);
  }
}

TEST(BesselK, HalfOrderClosedForm) {
  EXPECT_NEAR(bessel_k(0.5, 1.0), std::sqrt(std::numbers::pi / 2.0) * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(bessel_k(0.5, 1.0), 0.4610685, 1e-7);
}

TEST(BesselK, OrderSymmetry) {
  for (double nu : {0.5, 1.0, 2.3, 5.94, 9.99}) {
    for (double x : {1e-3, 0.7, 4.0, 30.0}) {
      EXPECT_EQ(bessel_k(-nu, x), bessel_k(nu, x)) << nu << ' ' << x;
    }
  }
}

TEST(BesselK, UnitOrderAgainstIntegral) {
  const double ref = oracle::bessel_k_integral(1.0, 1.0);
  EXPECT_NEAR(ref, 0.6019072, 1e-7);
  EXPECT_LT(rel(bessel_k(1.0, 1.0), ref), 1e-10);
}

TEST(BesselK, HalfIntegerElementaryForms) {
  for (double x : {1e-3, 0.1, 1.0, 7.5, 40.0}) {
    const double k12 = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x);
    EXPECT_LT(rel(bessel_k(0.5, x), k12), 1e-12) << x;
    EXPECT_LT(rel(bessel_k(1.5, x), k12 * (1.0 + 1.0 / x)), 1e-12) << x;
    EXPECT_LT(rel(bessel_k(2.5, x), k12 * (1.0 + 3.0 / x + 3.0 / (x * x))), 1e-12) << x;
  }
}

TEST(BesselK, GridAgainstBoost) {
  for (double nu = 0.0; nu <= 10.0; nu += 0.45) {
    for (double lx = -4.0; lx <= std::log10(50.0); lx += 0.25) {
      const double x = std::pow(10.0, lx);
      const double ref = boost::math::cyl_bessel_k(nu, x);
      EXPECT_LT(rel(bessel_k(nu, x), ref), 1e-10) << "nu = " << nu << " x = " << x;
    }
  }
}

TEST(BesselK, GridAgainstIntegral) {
  for (double nu : {0.0, 0.18, 1.0, 3.36, 5.94}) {
    for (double x : {0.05, 0.5, 2.0, 12.0}) {
      EXPECT_LT(rel(bessel_k(nu, x), oracle::bessel_k_integral(nu, x)), 1e-10) << nu << ' ' << x;
    }
  }
}

TEST(BesselK, NonPositiveArgumentRejected) {
  EXPECT_THROW(bessel_k(1.0, 0.0), DomainError);
  EXPECT_THROW(bessel_k(1.0, -2.0), DomainError);
}

TEST(BetaFn, Examples) {
  EXPECT_NEAR(beta_fn(0.5, 1.0), 2.0, 1e-14);
  EXPECT_NEAR(beta_fn(1.0, 1.0), 1.0, 1e-14);
  const double ref = std::tgamma(0.5) * std::tgamma(1.025) / std::tgamma(1.525);
  EXPECT_LT(rel(beta_fn(0.5, 1.025), ref), 1e-12);
}

TEST(BetaFn, NonPositiveRejected) {
  EXPECT_THROW(beta_fn(0.0, 1.0), DomainError);
  EXPECT_THROW(beta_fn(1.0, -0.5), DomainError);
}

TEST(GQuarter, Examples) {
  EXPECT_NEAR(g_quarter(0.0), std::numbers::pi / 4.0, 1e-15);
  EXPECT_LT(rel(g_quarter(1.0), 1.0 - std::sqrt(2.0) / 2.0), 1e-10);
  EXPECT_LT(rel(g_quarter(2.0), std::numbers::pi / 8.0 - 0.25), 1e-10);
}

TEST(GQuarter, DivergentRejected) {
  EXPECT_THROW(g_quarter(-1.0), DomainError);
  EXPECT_THROW(g_quarter(-3.0), DomainError);
}

TEST(GQuarter, DecreasingAndBoundedByHalfRange) {
  double prev = g_quarter(0.0);
  for (double x = 0.25; x <= 60.0; x += 0.25) {
    const double g = g_quarter(x);
    EXPECT_LT(g, prev) << x;
    EXPECT_LE(g, 0.5 * beta_fn(0.5, (x + 1.0) / 2.0)) << x;
    prev = g;
  }
}

TEST(GQuarter, AgreesWithIncompleteBetaSeries) {
  for (double x : {-0.9, -0.5, 0.05, 1.0, 2.0, 7.3, 31.23, 80.0}) {
    EXPECT_LT(rel(g_quarter(x), static_cast<double>(detail::g_quarter_extended(x))), 1e-12) << x;
  }
}
