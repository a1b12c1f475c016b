#pragma once

// Single-scattering NLOS link geometry and power budget.
//
// Transmitter T and receiver R sit on a baseline of length r. Both point
// upward at elevations theta_t and theta_r measured from the baseline toward
// each other, and the beam meets the field of view in a small common volume V.
// Everything is planar, and V is treated as a point for distances and angles.

#include <cmath>
#include <numbers>
#include <sstream>

#include "uvturb/channel.hpp"
#include "uvturb/errors.hpp"

namespace uvturb {

struct Atmosphere {
  double k_a = 0.802e-3;   // absorption, 1/m
  double k_r = 0.266e-3;   // Rayleigh scattering, 1/m
  double k_m = 0.284e-3;   // Mie scattering, 1/m
  double gamma_ray = 0.017;
  double g_asym = 0.72;
  double f_mie = 0.5;
  double cn2 = 1e-13;      // m^(-2/3)

  double k_s() const { return k_r + k_m; }
  double k_e() const { return k_a + k_s(); }
};

inline void validate(const Atmosphere& atm) {
  if (!(atm.k_a >= 0.0 && atm.k_r >= 0.0 && atm.k_m >= 0.0)) {
    throw DomainError("atmosphere: coefficients must be non-negative");
  }
  if (!(atm.k_s() > 0.0)) throw DomainError("atmosphere: total scattering coefficient must be positive");
  if (!(std::abs(atm.g_asym) < 1.0)) throw DomainError("atmosphere: Mie asymmetry factor must satisfy |g| < 1");
  if (!(atm.cn2 >= 0.0)) throw DomainError("atmosphere: Cn2 must be non-negative");
}

struct LinkGeometry {
  double theta_t = 0.0;     // rad
  double beta_t = 0.0;      // full beam angle, rad
  double theta_r = 0.0;     // rad
  double beta_r = 0.0;      // full field of view, rad
  double baseline_r = 0.0;  // m
  double aperture_a_r = 1.77e-4;  // m^2
};

struct CommonVolume {
  double r1 = 0.0;  // T -> V
  double r2 = 0.0;  // V -> R
  double theta_s = 0.0;
};

inline CommonVolume derive_common_volume(const LinkGeometry& g) {
  const double pi = std::numbers::pi;
  if (!(g.theta_t > 0.0 && g.theta_t < pi && g.theta_r > 0.0 && g.theta_r < pi)) {
    throw DomainError("geometry: elevation angles must lie in (0, pi)");
  }
  const double sum = g.theta_t + g.theta_r;
  if (!(sum < pi)) {
    std::ostringstream msg;
    msg << "geometry: beam and field of view do not intersect above the baseline (theta_t + theta_r = "
        << sum << " rad >= pi)";
    throw DomainError(msg.str());
  }
  if (!(g.baseline_r > 0.0)) throw DomainError("geometry: baseline must be positive");
  const double s = std::sin(sum);
  return {g.baseline_r * std::sin(g.theta_r) / s, g.baseline_r * std::sin(g.theta_t) / s, sum};
}

/// Scattering phase function per steradian, Rayleigh plus generalized
/// Henyey-Greenstein weighted by the scattering coefficients.
inline double phase_function(double mu, const Atmosphere& atm) {
  if (!(std::abs(mu) <= 1.0)) {
    std::ostringstream msg;
    msg << "phase_function: cosine must lie in [-1, 1], got " << mu;
    throw DomainError(msg.str());
  }
  const double pi = std::numbers::pi;
  const double gr = atm.gamma_ray;
  const double g = atm.g_asym;
  const double rayleigh = 3.0 * (1.0 + 3.0 * gr + (1.0 - gr) * mu * mu) / (16.0 * pi * (1.0 + 2.0 * gr));
  const double g2 = 1.0 + g * g;
  const double mie = (1.0 - g * g) / (4.0 * pi) *
                     (std::pow(g2 - 2.0 * g * mu, -1.5) +
                      atm.f_mie * (3.0 * mu * mu - 1.0) / (2.0 * std::pow(g2, 1.5)));
  return (atm.k_r * rayleigh + atm.k_m * mie) / atm.k_s();
}

/// Deterministic gain of the common-volume-to-receiver hop.
inline double e2_gain(const Atmosphere& atm, double r2, double aperture) {
  if (!(r2 > 0.0)) throw DomainError("e2_gain: r2 must be positive");
  if (!(aperture > 0.0)) throw DomainError("e2_gain: aperture must be positive");
  return std::exp(-atm.k_e() * r2) * aperture / (r2 * r2);
}

/// Mean power scattered toward the receiver by the common volume.
inline double omega_v(const LinkGeometry& g, const Atmosphere& atm, double tx_power) {
  if (!(tx_power > 0.0)) throw DomainError("omega_v: transmit power must be positive");
  const auto cv = derive_common_volume(g);
  if (!(g.beta_t > 0.0 && g.beta_t < std::numbers::pi && g.beta_r > 0.0 && g.beta_r < std::numbers::pi)) {
    throw DomainError("omega_v: beam and field-of-view angles must lie in (0, pi)");
  }
  const double solid_t = 2.0 * std::numbers::pi * (1.0 - std::cos(g.beta_t / 2.0));
  const double beam_radius = cv.r1 * std::tan(g.beta_t / 2.0);
  const double depth = 2.0 * cv.r2 * std::tan(g.beta_r / 2.0) / std::sin(cv.theta_s);
  const double volume = std::numbers::pi * beam_radius * beam_radius * depth;
  return tx_power * std::exp(-atm.k_e() * cv.r1) * atm.k_s() * phase_function(std::cos(cv.theta_s), atm) *
         volume / (solid_t * cv.r1 * cv.r1);
}

/// Transmitter and receiver on the foci of an ellipse with focal distance r
/// and eccentricity e; the common volume lies on the ellipse where the
/// receiver's ray at elevation theta_r meets it.
inline LinkGeometry ellipse_configuration(double e, double r, double theta_r, LinkGeometry base = {}) {
  const double pi = std::numbers::pi;
  if (!(e > 0.0 && e < 1.0)) throw DomainError("ellipse_configuration: eccentricity must lie in (0, 1)");
  if (!(r > 0.0)) throw DomainError("ellipse_configuration: focal distance must be positive");
  if (!(theta_r > 0.0 && theta_r < pi)) {
    std::ostringstream msg;
    msg << "ellipse_configuration: receiver elevation " << theta_r
        << " rad is not reachable; the ray must point above the baseline, in (0, pi)";
    throw DomainError(msg.str());
  }
  // Focal polar form about R, angle measured from the direction of T.
  const double r2 = r * (1.0 - e * e) / (2.0 * e * (1.0 - e * std::cos(theta_r)));
  const double vx = r - r2 * std::cos(theta_r);  // V relative to T, along the baseline
  const double vy = r2 * std::sin(theta_r);
  base.theta_t = std::atan2(vy, vx);
  base.theta_r = theta_r;
  base.baseline_r = r;
  return base;
}

inline constexpr double kPlanck = 6.62607015e-34;    // J s
inline constexpr double kLightSpeed = 299792458.0;   // m/s

/// Mean electrical SNR of a photon-counting receiver.
inline double mean_snr(double received_power, double filter_eta, double detector_eta, double wavelength,
                       double bit_rate) {
  if (!(received_power > 0.0 && filter_eta > 0.0 && detector_eta > 0.0 && wavelength > 0.0 && bit_rate > 0.0)) {
    throw DomainError("mean_snr: all inputs must be positive");
  }
  return filter_eta * detector_eta * wavelength * received_power / (kPlanck * kLightSpeed * bit_rate);
}

/// Everything a sweep point needs: geometry, per-link shapes, and the channel.
struct LinkBudget {
  LinkGeometry geometry;
  CommonVolume volume;
  ShapePair link1;
  ShapePair link2;
  double omega_v = 0.0;
  double e2 = 0.0;
  NlosChannel channel;
};

inline LinkBudget link_budget(const LinkGeometry& g, const Atmosphere& atm, double tx_power, double wavelength) {
  validate(atm);
  if (!(atm.cn2 > 0.0)) throw DomainError("link_budget: Cn2 must be positive to build a fading channel");
  LinkBudget b;
  b.geometry = g;
  b.volume = derive_common_volume(g);
  b.link1 = gg_params_from_rytov(atm.cn2, b.volume.r1, wavelength);
  b.link2 = gg_params_from_rytov(atm.cn2, b.volume.r2, wavelength);
  b.omega_v = omega_v(g, atm, tx_power);
  b.e2 = e2_gain(atm, b.volume.r2, g.aperture_a_r);
  b.channel = build_channel(b.omega_v, b.e2, b.link1, b.link2);
  return b;
}

}  // namespace uvturb
