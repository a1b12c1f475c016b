#pragma once

// Meijer G-function for real parameters and positive real argument.
//
//   G^{m,n}_{p,q}(z | a; b) = 1/(2 pi i) * integral over Re(s) = c of
//     prod_{j<m} Gamma(b_j + s) prod_{j<n} Gamma(1 - a_j - s)
//     -------------------------------------------------------  z^{-s} ds
//     prod_{j>=m} Gamma(1 - b_j - s) prod_{j>=n} Gamma(a_j + s)
//
// Two routes: trapezoidal quadrature on the vertical line (robust, handles
// coincident poles) and summation of residues at the left poles
// s = -b_j - k (fast, needs simple poles).

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "uvturb/errors.hpp"
#include "uvturb/specfun.hpp"

namespace uvturb {

struct MeijerGSpec {
  int m = 0;
  int n = 0;
  std::vector<double> a;  // p upper parameters
  std::vector<double> b;  // q lower parameters
  double z = 1.0;

  int p() const { return static_cast<int>(a.size()); }
  int q() const { return static_cast<int>(b.size()); }
};

struct ContourConfig {
  std::optional<double> c;   // real offset; chosen automatically if empty
  double height = 40.0;      // initial truncation height T
  int nodes = 2048;          // nodes on [-T, T] for the first pass
  double rel_tol = 1e-12;
};

/// G = mantissa * exp(log_scale), so values far outside double range can be
/// combined with large prefactors before exponentiation.
struct MeijerGValue {
  double mantissa = 0.0;
  double log_scale = 0.0;
  double rel_error = 0.0;  // rounding-error estimate relative to the value
  double value() const { return mantissa == 0.0 ? 0.0 : mantissa * std::exp(log_scale); }
  double log_abs() const { return std::log(std::abs(mantissa)) + log_scale; }
};

/// Distance below which two left-pole families are treated as coincident.
inline constexpr double kPoleCollisionTolerance = 1e-9;

namespace detail {

inline void validate_meijer_spec(const MeijerGSpec& g) {
  std::ostringstream msg;
  if (g.m < 0 || g.n < 0 || g.m > g.q() || g.n > g.p() || g.p() > g.q()) {
    msg << "meijer_g: invalid orders (m,n,p,q) = (" << g.m << "," << g.n << "," << g.p() << ","
        << g.q() << ")";
    throw DomainError(msg.str());
  }
  if (!(g.z > 0.0) || !std::isfinite(g.z)) {
    msg << "meijer_g: argument must be positive and finite, got " << g.z;
    throw DomainError(msg.str());
  }
}

struct Strip {
  double lo;  // -inf if m == 0
  double hi;  // +inf if n == 0
};

inline Strip admissible_strip(const MeijerGSpec& g) {
  Strip s{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (int j = 0; j < g.m; ++j) s.lo = std::max(s.lo, -g.b[j]);
  for (int j = 0; j < g.n; ++j) s.hi = std::min(s.hi, 1.0 - g.a[j]);
  if (!(s.lo < s.hi)) {
    std::ostringstream msg;
    msg << "meijer_g: no vertical contour separates the pole families (strip [" << s.lo << ", "
        << s.hi << "] is empty)";
    throw DomainError(msg.str());
  }
  return s;
}

// Real part of the log of the numerator gamma factors minus s log z along the
// real axis. Convex inside the strip, so its minimum is the saddle point of
// the integrand on the real axis.
inline double numerator_log_real(const MeijerGSpec& g, double c) {
  double acc = -c * std::log(g.z);
  for (int j = 0; j < g.m; ++j) acc += ln_gamma(g.b[j] + c);
  for (int j = 0; j < g.n; ++j) acc += ln_gamma(1.0 - g.a[j] - c);
  return acc;
}

inline double choose_offset(const MeijerGSpec& g, const Strip& strip) {
  // An open side is pushed out until the minimum is bracketed; for large z the
  // saddle of G^{m,0}_{0,m} sits near z^{1/m}, far from the last pole.
  constexpr double kReach = 60.0;
  double lo = std::isfinite(strip.lo) ? strip.lo : strip.hi - kReach;
  double hi = std::isfinite(strip.hi) ? strip.hi : strip.lo + kReach;
  if (!std::isfinite(strip.hi)) {
    while (hi - lo < 1e7 && numerator_log_real(g, hi) < numerator_log_real(g, hi - 1.0)) hi = lo + 2.0 * (hi - lo);
  }
  if (!std::isfinite(strip.lo)) {
    while (hi - lo < 1e7 && numerator_log_real(g, lo) < numerator_log_real(g, lo + 1.0)) lo = hi - 2.0 * (hi - lo);
  }
  const double width = hi - lo;
  const double margin = std::min(0.25, width / 4.0);
  double left = lo + 1e-6 * width;
  double right = hi - 1e-6 * width;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = right - inv_phi * (right - left);
  double x2 = left + inv_phi * (right - left);
  double f1 = numerator_log_real(g, x1);
  double f2 = numerator_log_real(g, x2);
  for (int it = 0; it < 200 && right - left > 1e-10 * (1.0 + std::abs(left)); ++it) {
    if (f1 < f2) {
      right = x2;
      x2 = x1;
      f2 = f1;
      x1 = right - inv_phi * (right - left);
      f1 = numerator_log_real(g, x1);
    } else {
      left = x1;
      x1 = x2;
      f1 = f2;
      x2 = left + inv_phi * (right - left);
      f2 = numerator_log_real(g, x2);
    }
  }
  const double c = 0.5 * (left + right);
  return std::clamp(c, lo + margin, hi - margin);
}

inline std::complex<double> log_integrand(const MeijerGSpec& g, std::complex<double> s,
                                          double log_z) {
  std::complex<double> acc = -s * log_z;
  for (int j = 0; j < g.m; ++j) acc += ln_gamma(g.b[j] + s);
  for (int j = 0; j < g.n; ++j) acc += ln_gamma(1.0 - g.a[j] - s);
  for (int j = g.m; j < g.q(); ++j) acc -= ln_gamma(1.0 - g.b[j] - s);
  for (int j = g.n; j < g.p(); ++j) acc -= ln_gamma(g.a[j] + s);
  return acc;
}

}  // namespace detail

/// Contour-quadrature route, returning the value in scaled form.
inline MeijerGValue meijer_g_scaled(const MeijerGSpec& g, const ContourConfig& cfg = {}) {
  detail::validate_meijer_spec(g);
  const auto strip = detail::admissible_strip(g);
  double c = 0.0;
  if (cfg.c) {
    c = *cfg.c;
    if (!(c > strip.lo + kPoleCollisionTolerance && c < strip.hi - kPoleCollisionTolerance)) {
      std::ostringstream msg;
      msg << "meijer_g: contour offset c = " << c << " lies outside the admissible strip ("
          << strip.lo << ", " << strip.hi << ")";
      throw DomainError(msg.str());
    }
  } else {
    c = detail::choose_offset(g, strip);
  }
  const double dist = std::min(c - strip.lo, strip.hi - c);
  const double log_z = std::log(g.z);

  // Everything is scaled by exp(-ref) with ref the log-magnitude at s = c.
  const double ref = detail::log_integrand(g, {c, 0.0}, log_z).real();
  auto node = [&](double y, double& magnitude) {
    const auto lf = detail::log_integrand(g, {c, y}, log_z) - ref;
    magnitude = std::exp(lf.real());
    return magnitude * std::cos(lf.imag());
  };

  // Truncation height: grow until the integrand is negligible at +-iT.
  double height = cfg.height;
  double peak = 1.0;  // |F(c)| after scaling
  for (;;) {
    double mag = 0.0;
    node(height, mag);
    if (mag < 1e-16 * peak) break;
    height *= 2.0;
    if (height > 1e5) {
      throw AccuracyError("meijer_g: integrand does not decay along the contour", 0.0, mag);
    }
  }

  double step = std::min(2.0 * height / std::max(cfg.nodes, 2), 2.0 * std::numbers::pi * dist / 36.0);
  // Sum over y = k * step for k >= 1, stopping early once the integrand has
  // been negligible for a while.
  auto sum_nodes = [&](double h, double offset, double& l1) {
    double acc = 0.0;
    int quiet = 0;
    for (double y = offset; y <= height; y += h) {
      double mag = 0.0;
      const double v = node(y, mag);
      acc += v;
      l1 += mag;
      peak = std::max(peak, mag);
      quiet = (mag < 1e-20 * peak && y > 2.0) ? quiet + 1 : 0;
      if (quiet >= 10) break;
    }
    return acc;
  };

  double l1 = 0.5;
  double sum = 0.5 + sum_nodes(step, step, l1);  // F(c) real, weight 1/2
  double estimate = step * sum / std::numbers::pi;
  const double tol = std::max(cfg.rel_tol, 4.0 * std::numeric_limits<double>::epsilon());
  for (int level = 0;; ++level) {
    sum += sum_nodes(step, 0.5 * step, l1);  // midpoints of the current grid
    step *= 0.5;
    const double refined = step * sum / std::numbers::pi;
    const double change = std::abs(refined - estimate);
    estimate = refined;
    const double roundoff = 8.0 * std::numeric_limits<double>::epsilon() * step * l1 / std::numbers::pi;
    if (change <= tol * std::abs(estimate) || change <= roundoff) {
      if (roundoff > std::max(tol, 1e-10) * std::abs(estimate)) {
        throw AccuracyError("meijer_g: cancellation along the contour exceeds the tolerance",
                            estimate * std::exp(ref), roundoff / std::abs(estimate));
      }
      return {estimate, ref, roundoff / std::abs(estimate)};
    }
    if (level >= 8) {
      throw AccuracyError("meijer_g: trapezoidal refinement did not converge",
                          estimate * std::exp(ref), change / std::abs(estimate));
    }
  }
}

/// Contour-quadrature route.
inline double meijer_g(const MeijerGSpec& g, const ContourConfig& cfg = {}) {
  return meijer_g_scaled(g, cfg).value();
}

/// Residue-sum route over the left poles s = -b_j - k, j < m, in scaled form.
/// Requires q > p (or p == q with z < 1) and no two of b_0..b_{m-1} differing
/// by an integer.
inline MeijerGValue meijer_g_residues_scaled(const MeijerGSpec& g, double rel_tol = 1e-9) {
  detail::validate_meijer_spec(g);
  detail::admissible_strip(g);
  if (g.p() == g.q() && !(g.z < 1.0)) {
    throw DomainError("meijer_g_residues: left residue series diverges for p == q and z >= 1");
  }
  for (int i = 0; i < g.m; ++i) {
    for (int j = i + 1; j < g.m; ++j) {
      const double d = g.b[i] - g.b[j];
      if (std::abs(d - std::round(d)) < kPoleCollisionTolerance) {
        std::ostringstream msg;
        msg << "meijer_g_residues: b[" << i << "] - b[" << j << "] = " << d
            << " is an integer; poles coincide, perturb the parameters";
        throw PoleCollisionError(msg.str());
      }
    }
  }

  const double log_z = std::log(g.z);
  // Each term as (sign, log magnitude); zero terms flagged.
  auto term = [&](int j, int k, int& sign) -> double {
    const double bj = g.b[j];
    double lg = -ln_gamma(k + 1.0) + (bj + k) * log_z;
    sign = (k % 2 == 0) ? 1 : -1;
    auto mul = [&](double x) {
      lg += ln_gamma(x);
      sign *= gamma_sign(x);
    };
    auto div = [&](double x) {
      if (detail::is_nonpositive_integer(x)) return false;  // 1/Gamma vanishes
      lg -= ln_gamma(x);
      sign *= gamma_sign(x);
      return true;
    };
    for (int i = 0; i < g.m; ++i) {
      if (i != j) mul(g.b[i] - bj - k);
    }
    for (int i = 0; i < g.n; ++i) mul(1.0 - g.a[i] + bj + k);
    for (int i = g.m; i < g.q(); ++i) {
      if (!div(1.0 - g.b[i] + bj + k)) {
        sign = 0;
        return 0.0;
      }
    }
    for (int i = g.n; i < g.p(); ++i) {
      if (!div(g.a[i] - bj - k)) {
        sign = 0;
        return 0.0;
      }
    }
    return lg;
  };

  // Shared log scale across all families to avoid overflow.
  std::vector<std::vector<std::pair<int, double>>> terms(g.m);
  double log_max = -std::numeric_limits<double>::infinity();
  constexpr int kMaxTerms = 20000;
  for (int j = 0; j < g.m; ++j) {
    double prev = std::numeric_limits<double>::infinity();
    double fam_max = -std::numeric_limits<double>::infinity();
    int small_run = 0;
    for (int k = 0;; ++k) {
      if (k > kMaxTerms) throw AccuracyError("meijer_g_residues: series did not converge", 0.0, 0.0);
      int sign = 0;
      const double lg = term(j, k, sign);
      terms[j].emplace_back(sign, lg);
      if (sign == 0) continue;
      fam_max = std::max(fam_max, lg);
      const bool tiny = lg < fam_max + std::log(1e-18);
      small_run = (tiny && lg < prev) ? small_run + 1 : 0;
      prev = lg;
      if (small_run >= 3) break;
    }
    log_max = std::max(log_max, fam_max);
  }
  if (!std::isfinite(log_max)) return {0.0, 0.0};

  double sum = 0.0;
  double abs_sum = 0.0;
  for (const auto& fam : terms) {
    for (auto it = fam.rbegin(); it != fam.rend(); ++it) {
      if (it->first == 0) continue;
      const double v = std::exp(it->second - log_max);
      sum += it->first * v;
      abs_sum += v;
    }
  }
  // Each term carries a few ulps of error from its log-gamma factors.
  const double lost = 32.0 * std::numeric_limits<double>::epsilon() * abs_sum;
  if (lost > rel_tol * std::abs(sum)) {
    throw AccuracyError("meijer_g_residues: cancellation among residues exceeds the tolerance",
                        sum * std::exp(log_max), lost / std::abs(sum));
  }
  return {sum, log_max, lost / std::abs(sum)};
}

/// Residue-sum route.
inline double meijer_g_residues(const MeijerGSpec& g, double rel_tol = 1e-9) {
  return meijer_g_residues_scaled(g, rel_tol).value();
}

/// Contour route with a residue-sum fallback for small arguments. Near z = 0
/// the strip pins the contour close to the leftmost pole and the contour sum
/// cancels, while the residue series converges in a handful of terms. The
/// handover happens as soon as the contour loses more than kHandover, so the
/// two routes agree to that level where they meet.
inline MeijerGValue meijer_g_any(const MeijerGSpec& g, const ContourConfig& cfg = {}) {
  constexpr double kHandover = 1e-13;
  std::optional<MeijerGValue> contour;
  std::exception_ptr failure;
  try {
    contour = meijer_g_scaled(g, cfg);
    if (contour->rel_error <= kHandover) return *contour;
  } catch (const AccuracyError&) {
    failure = std::current_exception();
  }
  if (g.z < 1.0) {
    try {
      const auto v = meijer_g_residues_scaled(g, kHandover);
      if (std::isfinite(v.mantissa) && v.mantissa != 0.0) return v;
    } catch (const AccuracyError&) {
    } catch (const PoleCollisionError&) {
    }
  }
  if (contour) return *contour;
  std::rethrow_exception(failure);
}

}  // namespace uvturb
