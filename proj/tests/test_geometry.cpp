#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "uvturb/geometry.hpp"
#include "uvturb/quadrature.hpp"

using namespace uvturb;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

LinkGeometry reference_geometry() { return {30.0 * kDeg, 8e-3, 80.0 * kDeg, 20.0 * kDeg, 1000.0}; }

double sphere_integral(const Atmosphere& atm) {
  auto f = [&](double mu) { return phase_function(mu, atm); };
  return 2.0 * std::numbers::pi * quad::gauss_kronrod(f, -1.0, 1.0, 1e-13).value;
}

}  // namespace

TEST(CommonVolume, LawOfSines) {
  const auto cv = derive_common_volume(reference_geometry());
  EXPECT_NEAR(cv.r1, 1047.9, 0.15);
  EXPECT_NEAR(cv.r2, 532.1, 0.05);
  EXPECT_NEAR(cv.theta_s, 110.0 * kDeg, 1e-14);
}

TEST(CommonVolume, IsoscelesCase) {
  const auto cv = derive_common_volume({45.0 * kDeg, 0.01, 45.0 * kDeg, 0.1, 100.0});
  EXPECT_NEAR(cv.r1, 70.71, 0.005);
  EXPECT_DOUBLE_EQ(cv.r1, cv.r2);
}

TEST(CommonVolume, ParallelAxesNeverMeet) {
  EXPECT_THROW(derive_common_volume({90.0 * kDeg, 0.01, 90.0 * kDeg, 0.1, 100.0}), DomainError);
  EXPECT_THROW(derive_common_volume({120.0 * kDeg, 0.01, 70.0 * kDeg, 0.1, 100.0}), DomainError);
}

TEST(CommonVolume, ClosureOverAngles) {
  for (double tt = 5.0; tt < 170.0; tt += 7.0) {
    for (double tr = 3.0; tt + tr < 178.0; tr += 11.0) {
      const LinkGeometry g{tt * kDeg, 0.01, tr * kDeg, 0.1, 321.0};
      const auto cv = derive_common_volume(g);
      EXPECT_LT(rel(cv.r1 * std::sin(g.theta_t), cv.r2 * std::sin(g.theta_r)), 1e-12) << tt << ' ' << tr;
    }
  }
}

TEST(PhaseFunction, NormalizedOnSphere) {
  EXPECT_NEAR(sphere_integral(Atmosphere{}), 1.0, 1e-6);
  for (double g : {-0.5, 0.0, 0.3, 0.9}) {
    for (double f : {0.0, 0.5, 1.0}) {
      Atmosphere atm;
      atm.g_asym = g;
      atm.f_mie = f;
      atm.gamma_ray = 0.05;
      atm.k_r = 0.1e-3;
      atm.k_m = 0.7e-3;
      EXPECT_NEAR(sphere_integral(atm), 1.0, 1e-6) << g << ' ' << f;
    }
  }
}

TEST(PhaseFunction, PureRayleighIsSymmetric) {
  Atmosphere atm;
  atm.g_asym = 0.0;
  atm.k_m = 0.0;
  for (double mu : {0.1, 0.4, 0.99}) {
    EXPECT_DOUBLE_EQ(phase_function(mu, atm), phase_function(-mu, atm));
  }
}

TEST(PhaseFunction, TableValueAtReferenceAngle) {
  const Atmosphere atm;
  const double mu = std::cos(110.0 * kDeg);
  const double ray = 3.0 * (1.0 + 3.0 * 0.017 + 0.983 * mu * mu) / (16.0 * std::numbers::pi * 1.034);
  const double g = 0.72;
  const double mie = (1.0 - g * g) / (4.0 * std::numbers::pi) *
                     (1.0 / std::pow(1.0 + g * g - 2.0 * g * mu, 1.5) +
                      0.5 * (3.0 * mu * mu - 1.0) / (2.0 * std::pow(1.0 + g * g, 1.5)));
  const double ref = (0.266 * ray + 0.284 * mie) / 0.55;
  EXPECT_GT(phase_function(mu, atm), 0.0);
  EXPECT_LT(rel(phase_function(mu, atm), ref), 1e-13);
}

TEST(PhaseFunction, RejectsBadCosine) {
  EXPECT_THROW(phase_function(1.01, Atmosphere{}), DomainError);
}

TEST(E2Gain, LosslessAndInverseSquare) {
  Atmosphere clear;
  clear.k_a = clear.k_r = 0.0;
  clear.k_m = 1e-30;  // keeps k_s positive
  EXPECT_LT(rel(e2_gain(clear, 50.0, 2e-4), 2e-4 / 2500.0), 1e-12);
  EXPECT_LT(rel(e2_gain(clear, 100.0, 2e-4), 0.25 * e2_gain(clear, 50.0, 2e-4)), 1e-12);
}

TEST(E2Gain, TableAtmosphere) {
  const double v = e2_gain(Atmosphere{}, 532.1, 1.77e-4);
  EXPECT_LT(rel(v, std::exp(-1.352e-3 * 532.1) * 1.77e-4 / (532.1 * 532.1)), 1e-12);
  EXPECT_NEAR(v, 3.05e-10, 0.01e-10);
}

TEST(OmegaV, ReceivedPowerDecreasesWithBaseline) {
  // The scattering volume grows with the receiver range, so Omega_v alone
  // rises at short baselines; the power reaching the aperture must not.
  auto g = reference_geometry();
  double prev = 1e300;
  for (double r = 100.0; r <= 3000.0; r += 100.0) {
    g.baseline_r = r;
    const auto cv = derive_common_volume(g);
    const double v = omega_v(g, Atmosphere{}, 1.0) * e2_gain(Atmosphere{}, cv.r2, g.aperture_a_r);
    EXPECT_LT(v, prev) << r;
    prev = v;
  }
}

TEST(OmegaV, LosslessGrowsWithReceiverRange) {
  Atmosphere clear;
  clear.k_a = clear.k_r = 0.0;
  clear.k_m = 1e-30;
  auto g = reference_geometry();
  const double v1 = omega_v(g, clear, 1.0);
  g.baseline_r *= 2.0;
  EXPECT_LT(rel(omega_v(g, clear, 1.0), 2.0 * v1), 1e-12);
}

TEST(OmegaV, LinearInPower) {
  const auto g = reference_geometry();
  EXPECT_LT(rel(omega_v(g, Atmosphere{}, 2.0), 2.0 * omega_v(g, Atmosphere{}, 1.0)), 1e-14);
}

TEST(OmegaV, HandEvaluatedRightAngle) {
  Atmosphere atm;
  atm.k_a = 0.0;
  atm.k_r = 1e-3;
  atm.k_m = 0.0;
  atm.gamma_ray = 0.0;
  const LinkGeometry g{45.0 * kDeg, 0.02, 45.0 * kDeg, 0.2, 100.0};
  const double r1 = 100.0 / std::sqrt(2.0);
  // Rayleigh phase at mu = 0 with gamma = 0 is 3 / (16 pi).
  const double phase = 3.0 / (16.0 * std::numbers::pi);
  const double volume = std::numbers::pi * std::pow(r1 * std::tan(0.01), 2) * 2.0 * r1 * std::tan(0.1);
  const double solid = 2.0 * std::numbers::pi * (1.0 - std::cos(0.01));
  // k_e = k_s here, so the path loss is not switched off entirely.
  const double ref = 5.0 * std::exp(-1e-3 * r1) * 1e-3 * phase * volume / (solid * r1 * r1);
  EXPECT_LT(rel(omega_v(g, atm, 5.0), ref), 1e-12);
}

TEST(Ellipse, ConstantTotalPath) {
  const double e = std::sqrt(2.0) / 2.0;
  for (double th = 5.0; th <= 175.0; th += 5.0) {
    const auto cv = derive_common_volume(ellipse_configuration(e, 200.0, th * kDeg, reference_geometry()));
    EXPECT_NEAR(cv.r1 + cv.r2, 200.0 / e, 1e-9 * 200.0 / e) << th;
  }
}

TEST(Ellipse, EqualPathsAtSymmetricApex) {
  const double e = std::sqrt(3.0) / 2.0;
  const auto g = ellipse_configuration(e, 1000.0, 30.0 * kDeg, reference_geometry());
  const auto cv = derive_common_volume(g);
  EXPECT_LT(rel(cv.r1, cv.r2), 1e-12);
  EXPECT_NEAR(g.theta_t, g.theta_r, 1e-12);
}

TEST(Ellipse, UnreachableAngle) {
  EXPECT_THROW(ellipse_configuration(0.5, 100.0, 0.0), DomainError);
  EXPECT_THROW(ellipse_configuration(0.5, 100.0, std::numbers::pi), DomainError);
  EXPECT_THROW(ellipse_configuration(1.0, 100.0, 1.0), DomainError);
}

TEST(MeanSnr, PhotonRateEqualToBitRate) {
  const double wavelength = 260e-9, bits = 5000.0;
  const double power = bits * kPlanck * kLightSpeed / wavelength;
  EXPECT_NEAR(mean_snr(power, 0.1, 0.2, wavelength, bits), 0.02, 1e-15);
  EXPECT_LT(rel(mean_snr(3.0 * power, 0.1, 0.2, wavelength, bits), 0.06), 1e-14);
  EXPECT_LT(rel(mean_snr(power, 0.1, 0.2, wavelength, 2.0 * bits), 0.01), 1e-14);
  EXPECT_THROW(mean_snr(0.0, 0.1, 0.2, wavelength, bits), DomainError);
}

TEST(LinkBudget, StrongTurbulenceShapesFromReferenceGeometry) {
  const auto b = link_budget(reference_geometry(), Atmosphere{}, 1.0, 260e-9);
  EXPECT_LT(rel(b.link1.alpha, 6.99), 0.02);
  EXPECT_LT(rel(b.link1.beta, 1.05), 0.02);
  EXPECT_LT(rel(b.link2.alpha, 4.59), 0.02);
  EXPECT_LT(rel(b.link2.beta, 1.23), 0.02);
}
