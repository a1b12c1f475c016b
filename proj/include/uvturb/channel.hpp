#pragma once

// Cascaded Gamma-Gamma NLOS channel: transmitter -> common volume -> receiver,
// each leg a Gamma-Gamma link, the second leg's mean set by the first leg's
// realization times the deterministic gain E2.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "uvturb/errors.hpp"
#include "uvturb/meijer_g.hpp"
#include "uvturb/quadrature.hpp"
#include "uvturb/series_real.hpp"
#include "uvturb/specfun.hpp"

namespace uvturb {

struct ShapePair {
  double alpha = 0.0;  // large-scale eddies
  double beta = 0.0;   // small-scale eddies
};

struct GammaGammaParams {
  double alpha = 0.0;
  double beta = 0.0;
  double mean_power = 1.0;
};

/// Plane-wave Rytov variance 1.23 Cn2 k^{7/6} L^{11/6}, k = 2 pi / lambda.
inline double rytov_variance(double cn2, double path_length, double wavelength) {
  if (!(cn2 > 0.0) || !(path_length > 0.0) || !(wavelength > 0.0)) {
    throw DomainError("rytov_variance: Cn2, path length and wavelength must be positive");
  }
  const double k = 2.0 * std::numbers::pi / wavelength;
  return 1.23 * cn2 * std::pow(k, 7.0 / 6.0) * std::pow(path_length, 11.0 / 6.0);
}

/// Gamma-Gamma shapes from the Rytov variance (plane wave, zero inner scale).
inline ShapePair gg_shapes_from_rytov_variance(double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("gg_shapes_from_rytov_variance: variance must be positive");
  const double s125 = std::pow(sigma2, 6.0 / 5.0);  // sigma^{12/5}
  const double large = 0.49 * sigma2 / std::pow(1.0 + 1.11 * s125, 7.0 / 6.0);
  const double small = 0.51 * sigma2 / std::pow(1.0 + 0.69 * s125, 5.0 / 6.0);
  ShapePair out{1.0 / std::expm1(large), 1.0 / std::expm1(small)};
  if (!(out.alpha > out.beta)) {
    std::ostringstream msg;
    msg << "gg_shapes_from_rytov_variance: alpha = " << out.alpha << " not above beta = " << out.beta
        << " at Rytov variance " << sigma2;
    throw DomainError(msg.str());
  }
  return out;
}

inline ShapePair gg_params_from_rytov(double cn2, double path_length, double wavelength) {
  return gg_shapes_from_rytov_variance(rytov_variance(cn2, path_length, wavelength));
}

/// Gamma-Gamma density of the received power x (per watt).
inline double gg_pdf(const GammaGammaParams& p, double x) {
  if (!(x > 0.0)) throw DomainError("gg_pdf: power must be positive");
  if (!(p.alpha > 0.0) || !(p.beta > 0.0) || !(p.mean_power > 0.0)) {
    throw DomainError("gg_pdf: shapes and mean power must be positive");
  }
  const double ab = p.alpha * p.beta;
  const double half = 0.5 * (p.alpha + p.beta);
  const double u = x / p.mean_power;
  const double log_v = std::log(2.0) + half * std::log(ab) - ln_gamma(p.alpha) - ln_gamma(p.beta) -
                       std::log(p.mean_power) + (half - 1.0) * std::log(u) +
                       log_bessel_k(p.alpha - p.beta, 2.0 * std::sqrt(ab * u));
  return std::exp(log_v);
}

/// A density value. Arguments at or beyond the representable range give 0
/// with `degenerate` set instead of NaN.
struct Density {
  double value = 0.0;
  bool degenerate = false;
};

struct NlosChannel {
  GammaGammaParams link1;   // transmitter -> common volume, mean Omega_v
  double alpha2 = 0.0;      // common volume -> receiver shapes
  double beta2 = 0.0;
  double e2 = 1.0;          // deterministic gain of the second leg
  double log_s = 0.0;       // log of the density prefactor s
  double s = 0.0;           // may be +inf for very weak turbulence; use log_s
  double a = 0.0;           // alpha1 + beta1 - alpha2 - beta2
  double h = 0.0;           // alpha1 beta1 alpha2 beta2 / (Omega_v E2)
  double omega_r = 0.0;     // mean received power
  bool perturbation_applied = false;
  ShapePair requested_link1;  // shapes as passed in, before any perturbation
  ShapePair requested_link2;

  double alpha1() const { return link1.alpha; }
  double beta1() const { return link1.beta; }
  double nu() const { return 0.5 * (alpha2 + beta2); }
  /// alpha1 beta1 alpha2 beta2, which equals h * omega_r.
  double shape_product() const { return link1.alpha * link1.beta * alpha2 * beta2; }
  /// Lower parameters of the G^{4,0}_{0,4} density kernel.
  std::array<double, 4> kernel_b() const {
    const double sum2 = alpha2 + beta2;
    return {(2.0 * link1.beta - sum2) / 2.0, (2.0 * link1.alpha - sum2) / 2.0,
            (beta2 - alpha2) / 2.0, (alpha2 - beta2) / 2.0};
  }
};

/// Distance from x to the nearest integer.
inline double integer_distance(double x) { return std::abs(x - std::round(x)); }

/// The six pairwise differences among the shapes whose integrality produces
/// double poles in the cascaded density.
inline std::array<double, 6> shape_differences(double a1, double b1, double a2, double b2) {
  return {a1 - b1, a2 - b2, b2 - b1, a2 - b1, a1 - b2, a1 - a2};
}

/// Shapes closer than this to an integer difference get perturbed.
inline constexpr double kPerturbationTrigger = 1e-5;
inline constexpr double kPerturbationStep = 1e-6;

inline NlosChannel build_channel(double omega_v, double e2, ShapePair link1, ShapePair link2) {
  if (!(omega_v > 0.0) || !(e2 > 0.0) || !std::isfinite(omega_v) || !std::isfinite(e2)) {
    throw DomainError("build_channel: Omega_v and E2 must be positive and finite");
  }
  for (const auto& l : {link1, link2}) {
    if (!(l.beta > 0.0) || !(l.alpha > l.beta) || !std::isfinite(l.alpha)) {
      std::ostringstream msg;
      msg << "build_channel: need alpha > beta > 0 on every link, got (" << l.alpha << ", " << l.beta
          << ")";
      throw DomainError(msg.str());
    }
  }

  NlosChannel ch;
  ch.requested_link1 = link1;
  ch.requested_link2 = link2;
  double a1 = link1.alpha, b1 = link1.beta, a2 = link2.alpha, b2 = link2.beta;

  auto worst = [](double x1, double y1, double x2, double y2) {
    double d = 1.0;
    for (double v : shape_differences(x1, y1, x2, y2)) d = std::min(d, integer_distance(v));
    return d;
  };
  if (worst(a1, b1, a2, b2) < kPerturbationTrigger) {
    // Unequal offsets per shape move every pairwise difference; a uniform
    // shift would leave the differences untouched.
    const std::array<double, 4> pattern = {1.0, 3.0, 2.0, 0.0};
    bool done = false;
    for (double step = kPerturbationStep; step < 1e-3 && !done; step *= 2.0) {
      const double p1 = a1 + pattern[0] * step, q1 = b1 + pattern[1] * step;
      const double p2 = a2 + pattern[2] * step, q2 = b2 + pattern[3] * step;
      if (p1 > q1 && p2 > q2 && worst(p1, q1, p2, q2) >= kPoleCollisionTolerance * 10.0) {
        a1 = p1, b1 = q1, a2 = p2, b2 = q2;
        done = true;
      }
    }
    if (!done) throw PoleCollisionError("build_channel: could not perturb shapes off a pole collision");
    ch.perturbation_applied = true;
  }

  ch.link1 = {a1, b1, omega_v};
  ch.alpha2 = a2;
  ch.beta2 = b2;
  ch.e2 = e2;
  ch.a = a1 + b1 - a2 - b2;
  const double nu = 0.5 * (a2 + b2);
  const double log_h = std::log(a1) + std::log(b1) + std::log(a2) + std::log(b2) -
                       std::log(omega_v) - std::log(e2);
  ch.h = std::exp(log_h);
  ch.log_s = (3.0 - ch.a) * std::log(2.0) + nu * log_h - ln_gamma(a1) - ln_gamma(b1) -
             ln_gamma(a2) - ln_gamma(b2);
  ch.s = std::exp(ch.log_s);
  const double log_omega_r = (ch.a - 3.0) * std::log(2.0) + ch.log_s - (nu + 1.0) * log_h +
                             ln_gamma(a1 + 1.0) + ln_gamma(b1 + 1.0) + ln_gamma(a2 + 1.0) +
                             ln_gamma(b2 + 1.0);
  ch.omega_r = std::exp(log_omega_r);
  return ch;
}

namespace detail {

inline Density density_from_log(double log_value) {
  if (std::isnan(log_value)) return {0.0, true};
  if (log_value > std::log(std::numeric_limits<double>::max())) return {0.0, true};
  const double v = std::exp(log_value);
  if (v == 0.0) return {0.0, true};
  return {v, false};
}

inline bool argument_degenerate(double x) {
  return !(x >= 1e-300) || !std::isfinite(x);
}

}  // namespace detail

/// Received-power density (per watt) by direct quadrature of the Bessel-K
/// product integral. This is the independent reference for every other route.
inline Density pdf_quadrature(const NlosChannel& ch, double power) {
  if (!(power > 0.0)) throw DomainError("pdf_quadrature: power must be positive");
  if (detail::argument_degenerate(power)) return {0.0, true};
  const double nu1 = ch.link1.alpha - ch.link1.beta;
  const double nu2 = ch.alpha2 - ch.beta2;
  const double y = 4.0 * std::sqrt(ch.h * power);
  if (!(y > 0.0) || !std::isfinite(y)) return {0.0, true};
  // t = sqrt(y) e^u puts both Bessel arguments on an equal footing.
  const double log_center = 0.5 * std::log(y);
  auto log_integrand = [&](double u) {
    const double lt = log_center + u;
    const double t = std::exp(lt);
    return ch.a * lt + log_bessel_k(nu1, t) + log_bessel_k(nu2, y / t);
  };

  // Bracket the bulk: locate the peak on a coarse grid, then walk out.
  constexpr double kStep = 0.25;
  const double drop = std::log(1e-18);
  double peak_u = 0.0;
  double peak = log_integrand(0.0);
  for (int dir : {-1, 1}) {
    for (double u = dir * kStep;; u += dir * kStep) {
      const double v = log_integrand(u);
      if (v > peak) {
        peak = v;
        peak_u = u;
      } else if (v < peak + drop) {
        break;
      }
      if (std::abs(u) > 400.0) break;
    }
  }
  double lo = peak_u, hi = peak_u;
  while (log_integrand(lo) > peak + drop && lo > peak_u - 400.0) lo -= kStep;
  while (log_integrand(hi) > peak + drop && hi < peak_u + 400.0) hi += kStep;

  auto f = [&](double u) { return std::exp(log_integrand(u) - peak); };
  const auto left = quad::gauss_kronrod(f, lo, peak_u, 1e-12);
  const auto right = quad::gauss_kronrod(f, peak_u, hi, 1e-12);
  const double integral = left.value + right.value;
  const double err = left.error + right.error;
  if (!(integral > 0.0) || err > 1e-8 * integral) {
    throw AccuracyError("pdf_quadrature: Bessel-K integral did not converge", integral, err / integral);
  }
  return detail::density_from_log(ch.log_s + (ch.nu() - 1.0) * std::log(power) + peak +
                                  std::log(integral));
}

/// Density of the normalized irradiance I_n = P_r / Omega_r from the
/// quadrature route.
inline Density pdf_quadrature_normalized(const NlosChannel& ch, double i_n) {
  if (!(i_n > 0.0)) throw DomainError("pdf_quadrature_normalized: irradiance must be positive");
  const auto d = pdf_quadrature(ch, i_n * ch.omega_r);
  return {d.value * ch.omega_r, d.degenerate};
}

/// Meijer-G specification of the normalized-irradiance density kernel at i_n.
inline MeijerGSpec density_kernel_spec(const NlosChannel& ch, double i_n) {
  const auto b = ch.kernel_b();
  return {4, 0, {}, {b[0], b[1], b[2], b[3]}, ch.shape_product() * i_n};
}

/// Normalized-irradiance density through the G^{4,0}_{0,4} closed form.
inline Density pdf_meijer(const NlosChannel& ch, double i_n, const ContourConfig& cfg = {}) {
  if (!(i_n > 0.0)) throw DomainError("pdf_meijer: irradiance must be positive");
  if (detail::argument_degenerate(i_n)) return {0.0, true};
  const auto spec = density_kernel_spec(ch, i_n);
  if (!std::isfinite(spec.z)) return {0.0, true};
  const auto g = meijer_g_any(spec, cfg);
  if (!(g.mantissa > 0.0)) return {0.0, true};
  const double nu = ch.nu();
  const double log_omega_r = std::log(ch.omega_r);
  return detail::density_from_log((ch.a - 3.0) * std::log(2.0) + ch.log_s + nu * log_omega_r +
                                  (nu - 1.0) * std::log(i_n) + g.log_abs());
}

// ---------------------------------------------------------------------------
// Residue-series representation.
//
// With exponents w in {alpha2, beta2, alpha1, beta1} and P = alpha1 beta1
// alpha2 beta2, the normalized density is
//
//   f(i) = sum_w A_w i^{w-1} sum_k c_k(w) (P i)^k,
//   A_w  = P^w prod_{v != w} Gamma(v - w) / prod_v Gamma(v),
//   c_k  = prod_{v != w} Gamma(1 + w - v) / (k! prod_{v != w} Gamma(1 + w - v + k)).
//
// The families alternate in sign and nearly cancel for large i, hence the
// extended-precision scalar.

struct SeriesFamily {
  double exponent = 0.0;             // w
  std::array<xp::Real, 3> offsets{};  // w - v for the other three exponents
  xp::Real weight = 0;               // A_w
};

struct SeriesExpansion {
  std::array<SeriesFamily, 4> families;  // ordered alpha2, beta2, alpha1, beta1
  xp::Real product = 0;                  // P = h * Omega_r

  /// c_{k+1}(w) / c_k(w) without the P factor.
  static xp::Real step_ratio(const SeriesFamily& f, int k) {
    xp::Real den = static_cast<xp::Real>(k + 1);
    for (const xp::Real& x : f.offsets) den *= x + static_cast<xp::Real>(k + 1);
    return 1 / den;
  }
};

inline SeriesExpansion series_expansion(const NlosChannel& ch) {
  const std::array<double, 4> w = {ch.alpha2, ch.beta2, ch.link1.alpha, ch.link1.beta};
  for (double d : shape_differences(w[2], w[3], w[0], w[1])) {
    if (integer_distance(d) < kPoleCollisionTolerance) {
      std::ostringstream msg;
      msg << "series_expansion: shape difference " << d
          << " is an integer (double pole); build the channel with perturbation";
      throw PoleCollisionError(msg.str());
    }
  }
  SeriesExpansion out;
  // Products in the extended type so that A_w keeps its full precision.
  xp::Real log_p = 0;
  xp::Real log_den = 0;
  for (double v : w) {
    log_p += xp::log(static_cast<xp::Real>(v));
    log_den += xp::lgamma_abs(static_cast<xp::Real>(v));
  }
  out.product = xp::exp(log_p);
  for (int j = 0; j < 4; ++j) {
    auto& fam = out.families[j];
    fam.exponent = w[j];
    const xp::Real wj = static_cast<xp::Real>(w[j]);
    xp::Real log_num = wj * log_p;
    int sign = 1;
    int slot = 0;
    for (int i = 0; i < 4; ++i) {
      if (i == j) continue;
      const xp::Real diff = static_cast<xp::Real>(w[i]) - wj;
      log_num += xp::lgamma_abs(diff);
      sign *= gamma_sign(static_cast<double>(diff));
      fam.offsets[slot++] = -diff;
    }
    fam.weight = sign * xp::exp(log_num - log_den);
    if (!xp::isfinite(fam.weight)) {
      throw AccuracyError("series_expansion: family weight overflows the extended range",
                          std::numeric_limits<double>::infinity(), 0.0);
    }
  }
  return out;
}

/// Normalized-irradiance density from the residue series truncated at k = J.
inline Density pdf_series(const NlosChannel& ch, double i_n, int terms) {
  if (!(i_n > 0.0)) throw DomainError("pdf_series: irradiance must be positive");
  if (terms < 0) throw DomainError("pdf_series: number of terms must be non-negative");
  if (detail::argument_degenerate(i_n)) return {0.0, true};
  const auto ex = series_expansion(ch);
  const xp::Real x = static_cast<xp::Real>(i_n);
  const xp::Real z = ex.product * x;
  const xp::Real log_x = xp::log(x);
  xp::Real total = 0;
  for (const auto& fam : ex.families) {
    xp::Real term = 1;
    xp::Real sum = 1;
    for (int k = 0; k < terms; ++k) {
      term *= z * SeriesExpansion::step_ratio(fam, k);
      sum += term;
    }
    total += fam.weight * xp::exp((static_cast<xp::Real>(fam.exponent) - 1) * log_x) * sum;
  }
  const double v = static_cast<double>(total);
  if (!std::isfinite(v)) return {0.0, true};
  return {v, v == 0.0};
}

}  // namespace uvturb
