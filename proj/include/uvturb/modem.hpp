#pragma once

// Average error rates of subcarrier intensity modulation over the cascaded
// channel. The instantaneous SNR is gamma_bar * I_n^2.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "uvturb/channel.hpp"
#include "uvturb/errors.hpp"
#include "uvturb/meijer_g.hpp"
#include "uvturb/quadrature.hpp"
#include "uvturb/series_real.hpp"
#include "uvturb/specfun.hpp"

namespace uvturb {

enum class Scheme { bpsk, qpsk, dpsk, ncfsk };

struct Modulation {
  Scheme kind = Scheme::bpsk;
  int j = 0;  // divisor of the exponent, 1 for DPSK and 2 for NCFSK

  static Modulation bpsk() { return {Scheme::bpsk, 0}; }
  static Modulation qpsk() { return {Scheme::qpsk, 0}; }
  static Modulation dpsk() { return {Scheme::dpsk, 1}; }
  static Modulation ncfsk() { return {Scheme::ncfsk, 2}; }

  bool differential() const { return kind == Scheme::dpsk || kind == Scheme::ncfsk; }
};

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::bpsk: return "BPSK";
    case Scheme::qpsk: return "QPSK";
    case Scheme::dpsk: return "DPSK";
    case Scheme::ncfsk: return "NCFSK";
  }
  return "?";
}

enum class Method { meijer, series, quadrature, monte_carlo, asymptotic };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::meijer: return "meijer";
    case Method::series: return "series";
    case Method::quadrature: return "quadrature";
    case Method::monte_carlo: return "mc";
    case Method::asymptotic: return "asymptotic";
  }
  return "?";
}

struct ErrorRateResult {
  double probability = 0.0;
  Method method = Method::quadrature;
  int terms_used = 0;              // series only
  double truncation_upper = 0.0;   // series only
  double truncation_lower = 0.0;   // series only
  bool perturbation_applied = false;
  double standard_error = 0.0;     // Monte Carlo only
  bool out_of_range = false;       // asymptote outside [0, 1]
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

namespace detail {

inline void check_snr(double snr) {
  if (!(snr > 0.0) || !std::isfinite(snr)) {
    std::ostringstream msg;
    msg << "mean SNR must be positive and finite, got " << snr;
    throw DomainError(msg.str());
  }
}

inline void check_modulation(const Modulation& m) {
  if (m.differential() ? (m.j != 1 && m.j != 2) : m.j != 0) {
    throw DomainError("modulation: j must be 1 or 2 for DPSK/NCFSK and unset otherwise");
  }
}

}  // namespace detail

/// Error probability conditioned on the instantaneous SNR g.
inline double conditional_error(const Modulation& m, double g) {
  switch (m.kind) {
    case Scheme::bpsk: return 0.5 * std::erfc(std::sqrt(g));
    case Scheme::qpsk: {
      const double q = 0.5 * std::erfc(std::sqrt(g));
      return 2.0 * q - q * q;
    }
    case Scheme::dpsk:
    case Scheme::ncfsk: return 0.5 * std::exp(-g / m.j);
  }
  return 0.0;
}

/// Reference route: integrate the conditional error against the quadrature
/// density of the normalized irradiance.
inline ErrorRateResult error_rate_quadrature(const NlosChannel& ch, double snr, const Modulation& m) {
  detail::check_snr(snr);
  detail::check_modulation(m);
  auto integrand = [&](double i) {
    const double pe = conditional_error(m, snr * i * i);
    if (pe == 0.0) return 0.0;
    return pe * pdf_quadrature_normalized(ch, i).value;
  };
  // Every outer node costs a full inner quadrature. The inner density is good
  // to about 1e-12, and deep bisection of an octave chases that noise, so the
  // octaves are kept shallow; the error check below still guards the result.
  // The conditional error switches off around snr i^2 ~ 1, so the octave scan
  // starts there; from i = 1 at 100 dB every probe would read zero.
  const auto est = quad::integrate_half_line(integrand, 1.0 / std::sqrt(snr), 1e-9, 1e-16, 6, 1);
  if (!(est.value > 0.0)) {
    throw AccuracyError("error_rate_quadrature: no mass found", est.value, 1.0);
  }
  if (!(est.error <= 1e-8 * std::abs(est.value))) {
    throw AccuracyError("error_rate_quadrature: integral did not reach relative 1e-8", est.value,
                        est.error / std::abs(est.value));
  }
  ErrorRateResult r;
  r.probability = est.value;
  r.method = Method::quadrature;
  r.perturbation_applied = ch.perturbation_applied;
  return r;
}

// ---------------------------------------------------------------------------
// Meijer-G closed forms.

namespace detail {

// b/2 and b/2 + 1/2 for the density kernel parameters b.
inline std::vector<double> doubled_kernel_b(const NlosChannel& ch) {
  const auto b = ch.kernel_b();
  std::vector<double> out;
  for (double v : b) out.push_back(v / 2.0);
  for (double v : b) out.push_back(v / 2.0 + 0.5);
  return out;
}

// log of 2^{2a-7} s Omega_r^nu / (pi^3 gamma^{nu/2}).
inline double log_psk_prefactor(const NlosChannel& ch, double snr) {
  const double nu = ch.nu();
  return (2.0 * ch.a - 7.0) * std::log(2.0) + ch.log_s + nu * std::log(ch.omega_r) -
         3.0 * std::log(std::numbers::pi) - 0.5 * nu * std::log(snr);
}

}  // namespace detail

/// Integral (1/pi) int_0^{pi/2} E[exp(-gamma I^2 / sin^2)] dtheta in closed form.
inline double psk_half_range_meijer(const NlosChannel& ch, double snr) {
  const double nu = ch.nu();
  auto b = detail::doubled_kernel_b(ch);
  b.push_back(-nu / 2.0);
  const double p = ch.shape_product();
  const MeijerGSpec spec{8, 2, {1.0 - nu / 2.0, 0.5 - nu / 2.0}, b, p * p / (256.0 * snr)};
  const auto g = meijer_g_any(spec);
  const double log_v = detail::log_psk_prefactor(ch, snr) + std::log(0.5 * std::sqrt(std::numbers::pi)) +
                       g.log_scale;
  return g.mantissa * std::exp(log_v);
}

/// Same average over theta in (0, x]; numerical in theta, Meijer-G in the
/// irradiance.
inline double psk_partial_range_meijer(const NlosChannel& ch, double snr, double upper) {
  const double nu = ch.nu();
  const auto b = detail::doubled_kernel_b(ch);
  const double p = ch.shape_product();
  const double log_a = detail::log_psk_prefactor(ch, snr);
  MeijerGSpec spec{8, 1, {1.0 - nu / 2.0}, b, 1.0};
  auto integrand = [&](double theta) {
    const double x = std::sin(theta);
    if (!(x > 1e-25)) return 0.0;  // integrand behaves as a positive power of x here
    MeijerGSpec local = spec;
    local.z = (p * x) * (p * x) / (256.0 * snr);
    const auto g = meijer_g_any(local);
    return g.mantissa * std::exp(log_a + nu * std::log(x) + g.log_scale);
  };
  const auto est = quad::tanh_sinh(integrand, 0.0, upper, 1e-10);
  if (!(est.error <= 1e-8 * std::abs(est.value))) {
    throw AccuracyError("psk_partial_range_meijer: theta integral did not converge", est.value,
                        est.error / std::abs(est.value));
  }
  return est.value;
}

/// DPSK (j = 1) / NCFSK (j = 2) bit error rate in closed form.
inline double differential_meijer(const NlosChannel& ch, double snr, int j) {
  const double nu = ch.nu();
  const auto b = detail::doubled_kernel_b(ch);
  const double p = ch.shape_product();
  const double eff = snr / j;
  const MeijerGSpec spec{8, 1, {1.0 - nu / 2.0}, b, p * p / (256.0 * eff)};
  const auto g = meijer_g_any(spec);
  const double log_v = (2.0 * ch.a - 8.0) * std::log(2.0) + ch.log_s + nu * std::log(ch.omega_r) -
                       2.0 * std::log(std::numbers::pi) - 0.5 * nu * std::log(eff) + g.log_scale;
  return g.mantissa * std::exp(log_v);
}

inline ErrorRateResult ser_qpsk_meijer(const NlosChannel& ch, double snr) {
  detail::check_snr(snr);
  ErrorRateResult r;
  r.method = Method::meijer;
  r.perturbation_applied = ch.perturbation_applied;
  r.probability = 2.0 * psk_half_range_meijer(ch, snr) -
                  psk_partial_range_meijer(ch, snr, std::numbers::pi / 4.0);
  return r;
}

// ---------------------------------------------------------------------------
// Series forms.

namespace detail {

// Average of I^{e-1} against each conditional error kernel, as a function of
// the exponent e (the density power is e - 1).
enum class Kernel { psk_half, psk_quarter, differential };

// g(x) = (1/2) B(1/2; (x+1)/2, 1/2) through the incomplete-beta series
// z^a sum_n (1/2)_n z^n / (n! (a + n)) at z = 1/2. The double routine in
// specfun only holds about 13 digits, which the family cancellation would
// amplify.
inline xp::Real g_quarter_extended(xp::Real x) {
  const xp::Real a = (x + 1) / 2;
  const xp::Real z = static_cast<xp::Real>(0.5);
  xp::Real coef = 1;  // (1/2)_n z^n / n!
  xp::Real sum = 0;
  for (int n = 0; n < 400; ++n) {
    const xp::Real term = coef / (a + n);
    sum += term;
    if (xp::abs(term) < static_cast<xp::Real>(1e-36) * xp::abs(sum)) break;
    coef *= (static_cast<xp::Real>(n) + static_cast<xp::Real>(0.5)) * z / (n + 1);
  }
  return xp::exp(a * xp::log(z)) * sum / 2;
}

inline xp::Real kernel_moment(Kernel kind, xp::Real ex, xp::Real log_snr) {
  const xp::Real half = ex / 2;
  switch (kind) {
    case Kernel::psk_half:
      // Gamma(e/2) B(1/2, (e+1)/2) / (4 pi) = Gamma((e+1)/2) / (2 sqrt(pi) e)
      return xp::exp(xp::lgamma_abs((ex + 1) / 2) - half * log_snr) /
             (2 * xp::exp(xp::log(xp::pi()) / 2) * ex);
    case Kernel::psk_quarter:
      return xp::exp(xp::lgamma_abs(half) - half * log_snr) * g_quarter_extended(ex) / (2 * xp::pi());
    case Kernel::differential:
      return xp::exp(xp::lgamma_abs(half) - half * log_snr) / 4;
  }
  return 0;
}

// Sum of the terms first..last of every family.
inline xp::Real series_average_range(const SeriesExpansion& ex, Kernel kind, double eff_snr, int first,
                                     int last) {
  const xp::Real log_snr = xp::log(static_cast<xp::Real>(eff_snr));
  xp::Real total = 0;
  for (const auto& fam : ex.families) {
    xp::Real coef = 1;  // c_k P^k
    xp::Real sum = 0;
    for (int k = 0; k <= last; ++k) {
      if (k > 0) coef *= ex.product * SeriesExpansion::step_ratio(fam, k - 1);
      if (k >= first) sum += coef * kernel_moment(kind, static_cast<xp::Real>(fam.exponent) + k, log_snr);
    }
    total += fam.weight * sum;
  }
  return total;
}

inline xp::Real series_average(const SeriesExpansion& ex, Kernel kind, double eff_snr, int terms) {
  return series_average_range(ex, kind, eff_snr, 0, terms);
}

}  // namespace detail

/// Truncation-error estimates of the series routes for J retained terms.
struct TruncationBounds {
  double upper = 0.0;     // epsilon_1 bound for the half-range (BPSK) sum
  double lower = 0.0;     // epsilon_2 bound for the quarter-range sum
  double combined = 0.0;  // 2 epsilon_1 - epsilon_2 for the QPSK combination
  double differential = 0.0;  // DPSK/NCFSK analogue (uses gamma/j)
  int scanned_to = 0;     // last k examined
};

namespace detail {

enum class BoundWeight { beta_half, g_quarter, none };

// sum_w A_w eff^{-w/2} Gamma((k+w)/2) weight(k+w) prod Gamma(1+x)/prod Gamma(1+x+k)
inline xp::Real bound_sequence(const SeriesExpansion& ex, BoundWeight wt, double eff_snr, int k) {
  const xp::Real log_snr = xp::log(static_cast<xp::Real>(eff_snr));
  xp::Real total = 0;
  for (const auto& fam : ex.families) {
    const xp::Real e = static_cast<xp::Real>(fam.exponent) + k;
    xp::Real log_ratio = 0;
    for (const xp::Real& x : fam.offsets) {
      log_ratio += xp::lgamma_abs(1 + x) - xp::lgamma_abs(1 + x + k);
    }
    int sign = 1;
    for (const xp::Real& x : fam.offsets) {
      sign *= gamma_sign(static_cast<double>(1 + x)) * gamma_sign(static_cast<double>(1 + x + k));
    }
    xp::Real term = sign * xp::exp(log_ratio + xp::lgamma_abs(e / 2) -
                                   static_cast<xp::Real>(fam.exponent) / 2 * log_snr);
    switch (wt) {
      case BoundWeight::beta_half: term *= xp::exp(xp::lgamma_abs(static_cast<xp::Real>(0.5)) + xp::lgamma_abs((e + 1) / 2) -
                                                       xp::lgamma_abs(e / 2 + 1));
        break;
      case BoundWeight::g_quarter: term *= g_quarter_extended(e); break;
      case BoundWeight::none: break;
    }
    total += fam.weight * term;
  }
  return total;
}

// Extremum of the sequence over k > J. Scanning stops once 20 consecutive
// terms sit below 1e-3 of the largest magnitude seen. Deep truncations can
// start below the double range, where every term reads as 0 and counts as quiet.
inline double scan_extremum(const SeriesExpansion& ex, BoundWeight wt, double eff_snr, int terms,
                            bool want_max, int& last_k) {
  double best = want_max ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
  double biggest = 0.0;
  int quiet = 0;
  int k = terms + 1;
  for (; quiet < 20; ++k) {
    if (k > terms + 100000) throw AccuracyError("truncation_bounds: extremum scan did not settle", best, 0.0);
    const double v = static_cast<double>(bound_sequence(ex, wt, eff_snr, k));
    best = want_max ? std::max(best, v) : std::min(best, v);
    biggest = std::max(biggest, std::abs(v));
    quiet = (std::abs(v) <= 1e-3 * biggest) ? quiet + 1 : 0;
  }
  last_k = std::max(last_k, k - 1);
  return best;
}

}  // namespace detail

inline TruncationBounds truncation_bounds(const NlosChannel& ch, double snr, int terms, int j = 1) {
  detail::check_snr(snr);
  if (terms < 0) throw DomainError("truncation_bounds: J must be non-negative");
  const auto ex = series_expansion(ch);
  const double p = static_cast<double>(ex.product);
  TruncationBounds b;
  const double x = p / std::sqrt(snr);
  b.upper = std::exp(x) / (4.0 * std::numbers::pi) *
            detail::scan_extremum(ex, detail::BoundWeight::beta_half, snr, terms, true, b.scanned_to);
  b.lower = std::exp(x) / (2.0 * std::numbers::pi) *
            detail::scan_extremum(ex, detail::BoundWeight::g_quarter, snr, terms, false, b.scanned_to);
  b.combined = 2.0 * b.upper - b.lower;
  const double eff = snr / j;
  b.differential = std::exp(p / std::sqrt(eff)) / 4.0 *
                   detail::scan_extremum(ex, detail::BoundWeight::none, eff, terms, true, b.scanned_to);
  return b;
}

inline ErrorRateResult ser_qpsk_series(const NlosChannel& ch, double snr, int terms) {
  detail::check_snr(snr);
  if (terms < 0) throw DomainError("ser_qpsk_series: J must be non-negative");
  const auto ex = series_expansion(ch);
  const xp::Real half = detail::series_average(ex, detail::Kernel::psk_half, snr, terms);
  const xp::Real quarter = detail::series_average(ex, detail::Kernel::psk_quarter, snr, terms);
  const auto bounds = truncation_bounds(ch, snr, terms);
  ErrorRateResult r;
  r.probability = static_cast<double>(2 * half - quarter);
  r.method = Method::series;
  r.terms_used = terms;
  r.truncation_upper = bounds.combined;
  r.truncation_lower = bounds.lower;
  r.perturbation_applied = ch.perturbation_applied;
  return r;
}

/// series(deep) - series(terms), summed directly so that the difference is
/// not lost to rounding in either partial sum.
inline double series_tail(const NlosChannel& ch, double snr, const Modulation& m, int terms, int deep) {
  detail::check_snr(snr);
  detail::check_modulation(m);
  if (terms < 0 || deep < terms) throw DomainError("series_tail: need 0 <= terms <= deep");
  const auto ex = series_expansion(ch);
  using detail::Kernel;
  switch (m.kind) {
    case Scheme::bpsk:
      return static_cast<double>(detail::series_average_range(ex, Kernel::psk_half, snr, terms + 1, deep));
    case Scheme::qpsk:
      return static_cast<double>(2 * detail::series_average_range(ex, Kernel::psk_half, snr, terms + 1, deep) -
                                 detail::series_average_range(ex, Kernel::psk_quarter, snr, terms + 1, deep));
    case Scheme::dpsk:
    case Scheme::ncfsk:
      return static_cast<double>(
          detail::series_average_range(ex, Kernel::differential, snr / m.j, terms + 1, deep));
  }
  throw DomainError("series_tail: unknown scheme");
}

struct Route {
  Method method = Method::meijer;
  int terms = 30;  // series only

  static Route meijer() { return {Method::meijer, 0}; }
  static Route series(int j) { return {Method::series, j}; }
};

inline ErrorRateResult ber_bpsk(const NlosChannel& ch, double snr, const Route& route) {
  detail::check_snr(snr);
  ErrorRateResult r;
  r.perturbation_applied = ch.perturbation_applied;
  r.method = route.method;
  if (route.method == Method::meijer) {
    r.probability = psk_half_range_meijer(ch, snr);
  } else if (route.method == Method::series) {
    if (route.terms < 0) throw DomainError("ber_bpsk: J must be non-negative");
    const auto ex = series_expansion(ch);
    r.probability = static_cast<double>(detail::series_average(ex, detail::Kernel::psk_half, snr, route.terms));
    const auto bounds = truncation_bounds(ch, snr, route.terms);
    r.terms_used = route.terms;
    r.truncation_upper = bounds.upper;
    r.truncation_lower = bounds.lower;
  } else {
    throw DomainError("ber_bpsk: route must be meijer or series");
  }
  return r;
}

inline ErrorRateResult ber_dpsk_ncfsk(const NlosChannel& ch, double snr, int j, const Route& route) {
  detail::check_snr(snr);
  if (j != 1 && j != 2) throw DomainError("ber_dpsk_ncfsk: j must be 1 (DPSK) or 2 (NCFSK)");
  ErrorRateResult r;
  r.perturbation_applied = ch.perturbation_applied;
  r.method = route.method;
  if (route.method == Method::meijer) {
    r.probability = differential_meijer(ch, snr, j);
  } else if (route.method == Method::series) {
    if (route.terms < 0) throw DomainError("ber_dpsk_ncfsk: J must be non-negative");
    const auto ex = series_expansion(ch);
    r.probability = static_cast<double>(
        detail::series_average(ex, detail::Kernel::differential, snr / j, route.terms));
    const auto bounds = truncation_bounds(ch, snr, route.terms, j);
    r.terms_used = route.terms;
    r.truncation_upper = bounds.differential;
  } else {
    throw DomainError("ber_dpsk_ncfsk: route must be meijer or series");
  }
  return r;
}

/// Dispatch on scheme and route (meijer or series).
inline ErrorRateResult error_rate(const NlosChannel& ch, double snr, const Modulation& m, const Route& route) {
  detail::check_modulation(m);
  switch (m.kind) {
    case Scheme::bpsk: return ber_bpsk(ch, snr, route);
    case Scheme::qpsk:
      if (route.method == Method::meijer) return ser_qpsk_meijer(ch, snr);
      if (route.method == Method::series) return ser_qpsk_series(ch, snr, route.terms);
      throw DomainError("error_rate: route must be meijer or series");
    case Scheme::dpsk:
    case Scheme::ncfsk: return ber_dpsk_ncfsk(ch, snr, m.j, route);
  }
  throw DomainError("error_rate: unknown scheme");
}

// ---------------------------------------------------------------------------
// High-SNR behaviour.

/// Leading (k = 0) series term of family exponent w for a scheme, without
/// any summation. Power law in the SNR with exponent -w/2.
inline double leading_term(const NlosChannel& ch, double snr, const Modulation& m, double w) {
  detail::check_snr(snr);
  const auto ex = series_expansion(ch);
  for (const auto& fam : ex.families) {
    if (fam.exponent != w) continue;
    const xp::Real weight = fam.weight;
    switch (m.kind) {
      case Scheme::bpsk:
        return static_cast<double>(
            weight * detail::kernel_moment(detail::Kernel::psk_half, w, xp::log(static_cast<xp::Real>(snr))));
      case Scheme::qpsk: {
        const xp::Real ls = xp::log(static_cast<xp::Real>(snr));
        return static_cast<double>(weight * (2 * detail::kernel_moment(detail::Kernel::psk_half, w, ls) -
                                             detail::kernel_moment(detail::Kernel::psk_quarter, w, ls)));
      }
      case Scheme::dpsk:
      case Scheme::ncfsk:
        return static_cast<double>(weight * detail::kernel_moment(detail::Kernel::differential, w,
                                                                  xp::log(static_cast<xp::Real>(snr / m.j))));
    }
  }
  throw DomainError("leading_term: exponent is not one of the channel shapes");
}

/// Two-term high-SNR asymptote from the beta1 and beta2 families.
inline ErrorRateResult asymptotic_error(const NlosChannel& ch, double snr, const Modulation& m) {
  detail::check_modulation(m);
  ErrorRateResult r;
  r.method = Method::asymptotic;
  r.perturbation_applied = ch.perturbation_applied;
  r.probability = leading_term(ch, snr, m, ch.link1.beta) + leading_term(ch, snr, m, ch.beta2);
  r.out_of_range = !(r.probability >= 0.0 && r.probability <= 1.0);
  return r;
}

/// Single-term asymptote using only min(beta1, beta2).
inline ErrorRateResult asymptotic_error_single(const NlosChannel& ch, double snr, const Modulation& m) {
  detail::check_modulation(m);
  ErrorRateResult r;
  r.method = Method::asymptotic;
  r.perturbation_applied = ch.perturbation_applied;
  r.probability = leading_term(ch, snr, m, std::min(ch.link1.beta, ch.beta2));
  r.out_of_range = !(r.probability >= 0.0 && r.probability <= 1.0);
  return r;
}

struct PenaltyResult {
  double bisection_db = 0.0;             // SNR_b - SNR_a at the target
  std::optional<double> closed_form_db;  // single-beta closed form when one exists
  double snr_a_db = 0.0;
  double snr_b_db = 0.0;
};

/// SNR (dB) at which the two-term asymptote of a scheme crosses the target.
inline double asymptote_crossing_db(const NlosChannel& ch, const Modulation& m, double target) {
  constexpr double kTop = 200.0;
  constexpr double kBottom = 0.0;
  auto value = [&](double db) { return asymptotic_error(ch, db_to_linear(db), m).probability; };
  if (value(kTop) > target) {
    throw RangeError("snr_penalty: target error rate not reached below 200 dB");
  }
  // Walk down from the top to the first crossing so that the low-SNR region,
  // where the asymptote can turn negative or exceed one, is never entered.
  double hi = kTop;
  double lo = kTop - 1.0;
  while (value(lo) <= target) {
    hi = lo;
    lo -= 1.0;
    if (lo < kBottom) throw RangeError("snr_penalty: target error rate not reached above 0 dB");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = value(mid);
    if (v > target) lo = mid; else hi = mid;
    if (hi - lo < 1e-4 && std::abs(v - target) < 1e-3 * target) break;
  }
  return 0.5 * (lo + hi);
}

/// Single-beta closed form of the BPSK-to-DPSK/NCFSK penalty (dB).
inline double penalty_closed_form_psk_differential(double beta, int j) {
  return 20.0 / beta *
         std::log10(std::numbers::pi * std::pow(static_cast<double>(j), beta / 2.0) /
                    beta_fn(0.5, (beta + 1.0) / 2.0));
}

/// DPSK-to-NCFSK penalty (dB): the SNR simply doubles.
inline double penalty_closed_form_dpsk_ncfsk() { return 10.0 * std::log10(2.0); }

inline PenaltyResult snr_penalty(const NlosChannel& ch, const Modulation& a, const Modulation& b,
                                 double target) {
  if (!(target > 0.0 && target < 0.5)) {
    std::ostringstream msg;
    msg << "snr_penalty: target error rate must lie in (0, 0.5), got " << target;
    throw DomainError(msg.str());
  }
  PenaltyResult r;
  r.snr_a_db = asymptote_crossing_db(ch, a, target);
  r.snr_b_db = asymptote_crossing_db(ch, b, target);
  r.bisection_db = r.snr_b_db - r.snr_a_db;
  const double beta = std::min(ch.link1.beta, ch.beta2);
  if (a.kind == Scheme::bpsk && b.differential()) {
    r.closed_form_db = penalty_closed_form_psk_differential(beta, b.j);
  } else if (a.kind == Scheme::dpsk && b.kind == Scheme::ncfsk) {
    r.closed_form_db = penalty_closed_form_dpsk_ncfsk();
  }
  return r;
}

}  // namespace uvturb
