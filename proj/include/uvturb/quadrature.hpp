#pragma once

// Thin wrappers over Boost.Math quadrature plus a log-segment driver for
// integrals over (0, inf) whose mass can sit anywhere across many decades.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "uvturb/errors.hpp"

namespace uvturb::quad {

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive 31-point Gauss-Kronrod on a finite interval.
///
/// The Boost recursion compares an error estimate that is not multiplied by
/// the subinterval half-width against a tolerance that is, so on a short
/// interval (say [1e-19, 2e-19]) it never accepts and always bisects to
/// max_depth. Mapping onto [0, 1] first keeps the two on the same footing.
template <typename F>
Estimate gauss_kronrod(F&& f, double lo, double hi, double rel_tol = 1e-12, unsigned max_depth = 20) {
  const double width = hi - lo;
  auto unit = [&](double t) { return f(lo + width * t); };
  Estimate out;
  out.value = width * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                          unit, 0.0, 1.0, max_depth, rel_tol, &out.error);
  out.error *= std::abs(width);
  return out;
}

inline boost::math::quadrature::tanh_sinh<double>& tanh_sinh_engine() {
  thread_local boost::math::quadrature::tanh_sinh<double> engine;
  return engine;
}

/// Double-exponential quadrature on a finite interval; tolerates integrable
/// endpoint singularities.
template <typename F>
Estimate tanh_sinh(F&& f, double lo, double hi, double rel_tol = 1e-12) {
  Estimate out;
  double l1 = 0.0;
  out.value = tanh_sinh_engine().integrate(f, lo, hi, rel_tol, &out.error, &l1);
  return out;
}

/// Integral of a non-negative (or mostly non-negative) f over (0, inf).
///
/// The half-line is cut into octaves [scale 2^k, scale 2^(k+1)]. Starting
/// from k = 0 the scan walks outward in both directions until the crude
/// midpoint mass of `quiet_run` consecutive octaves falls below
/// `cutoff` times the largest seen. Each retained octave gets adaptive
/// Gauss-Kronrod.
template <typename F>
Estimate integrate_half_line(F&& f, double scale = 1.0, double rel_tol = 1e-11,
                             double cutoff = 1e-18, int quiet_run = 6, unsigned max_depth = 20) {
  constexpr int kMinOctave = -1000;
  constexpr int kMaxOctave = 1000;
  auto octave_mass = [&](int k) {
    const double lo = std::ldexp(scale, k);
    const double mid = 1.5 * lo;
    const double v = f(mid);
    return std::isfinite(v) ? std::abs(v) * lo : 0.0;
  };

  double peak = octave_mass(0);
  int top = 0;
  for (int k = 1, quiet = 0; quiet < quiet_run; ++k) {
    if (k > kMaxOctave) throw AccuracyError("integrate_half_line: integrand does not decay", 0.0, 0.0);
    const double m = octave_mass(k);
    peak = std::max(peak, m);
    quiet = (m <= cutoff * peak) ? quiet + 1 : 0;
    top = k;
  }
  int bottom = 0;
  for (int k = -1, quiet = 0; quiet < quiet_run; --k) {
    if (k < kMinOctave) throw AccuracyError("integrate_half_line: integrand does not decay at 0", 0.0, 0.0);
    const double m = octave_mass(k);
    peak = std::max(peak, m);
    quiet = (m <= cutoff * peak) ? quiet + 1 : 0;
    bottom = k;
  }

  Estimate total;
  for (int k = bottom; k <= top; ++k) {
    const double lo = std::ldexp(scale, k);
    const auto part = gauss_kronrod(f, lo, 2.0 * lo, rel_tol, max_depth);
    total.value += part.value;
    total.error += part.error;
  }
  // Whatever lies below scale 2^bottom is bounded by the last quiet octaves.
  return total;
}

}  // namespace uvturb::quad
