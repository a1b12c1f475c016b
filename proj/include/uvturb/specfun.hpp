#pragma once

// Special-function kernels: log-gamma (real and complex), modified Bessel K of
// real order, the Beta function and the quarter-range sine-power integral.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "uvturb/errors.hpp"
#include "uvturb/quadrature.hpp"

namespace uvturb {

namespace detail {

// Lanczos approximation, g = 7, nine terms.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoef = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

inline constexpr double kHalfLog2Pi = 0.91893853320467274178032973640562;

// sin(pi x) with exact argument reduction, so zeros at integers are exact.
inline double sin_pi(double x) {
  double r = std::fmod(x, 2.0);  // (-2, 2)
  if (r > 1.0) r -= 2.0;
  if (r < -1.0) r += 2.0;
  // r in [-1, 1]; fold into [-1/2, 1/2] using sin(pi r) = sin(pi (1 - r)).
  if (r > 0.5) r = 1.0 - r;
  if (r < -0.5) r = -1.0 - r;
  return std::sin(std::numbers::pi * r);
}

template <typename T>
T lanczos_log_gamma(T z) {
  // Valid for Re(z) >= 1/2.
  z -= 1.0;
  T series = kLanczosCoef[0];
  for (std::size_t i = 1; i < kLanczosCoef.size(); ++i) {
    series += kLanczosCoef[i] / (z + static_cast<double>(i));
  }
  const T t = z + kLanczosG + 0.5;
  return kHalfLog2Pi + (z + 0.5) * std::log(t) - t + std::log(series);
}

// log(sin(pi z)) up to a multiple of 2 pi i, stable for large |Im z|.
inline std::complex<double> log_sin_pi(std::complex<double> z) {
  using namespace std::complex_literals;
  const std::complex<double> w = std::numbers::pi * z;
  if (std::abs(w.imag()) < 20.0) return std::log(std::sin(w));
  if (w.imag() > 0.0) {
    return -1.0i * w + std::log(0.5i) + std::log(1.0 - std::exp(2.0i * w));
  }
  return 1.0i * w + std::log(-0.5i) + std::log(1.0 - std::exp(-2.0i * w));
}

inline bool is_nonpositive_integer(double x) {
  return x <= 0.0 && x == std::floor(x);
}

}  // namespace detail

/// log|Gamma(x)| for real x. Throws DomainError at the poles x = 0, -1, -2, ...
inline double ln_gamma(double x) {
  if (std::isnan(x)) return x;
  if (detail::is_nonpositive_integer(x)) {
    std::ostringstream msg;
    msg << "ln_gamma: pole of Gamma at x = " << x;
    throw DomainError(msg.str());
  }
  if (x < 0.5) {
    return std::log(std::numbers::pi / std::abs(detail::sin_pi(x))) -
           detail::lanczos_log_gamma(1.0 - x);
  }
  return detail::lanczos_log_gamma(x);
}

/// Sign of Gamma(x) for real x off the poles.
inline int gamma_sign(double x) {
  if (x > 0.0) return 1;
  if (detail::is_nonpositive_integer(x)) throw DomainError("gamma_sign: pole of Gamma");
  // Gamma is negative on (-1,0), (-3,-2), ...
  return (static_cast<long long>(std::floor(x)) % 2 == 0) ? 1 : -1;
}

/// Signed Gamma(x) for real x.
inline double gamma_fn(double x) { return gamma_sign(x) * std::exp(ln_gamma(x)); }

/// Log-gamma for complex argument. The imaginary part is determined modulo
/// 2 pi; exp(ln_gamma(z)) equals Gamma(z).
inline std::complex<double> ln_gamma(std::complex<double> z) {
  if (z.imag() == 0.0) {
    const double lg = ln_gamma(z.real());
    return {lg, gamma_sign(z.real()) > 0 ? 0.0 : std::numbers::pi};
  }
  if (z.real() < 0.5) {
    return std::log(std::numbers::pi) - detail::log_sin_pi(z) -
           detail::lanczos_log_gamma(1.0 - z);
  }
  return detail::lanczos_log_gamma(z);
}

/// Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), a, b > 0.
inline double beta_fn(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta_fn: arguments must be positive");
  return std::exp(ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b));
}

namespace detail {

inline double chebyshev_eval(const double* c, int m, double x) {
  // Clenshaw recurrence on [-1, 1], first coefficient halved.
  double d = 0.0, dd = 0.0;
  const double y2 = 2.0 * x;
  for (int j = m - 1; j >= 1; --j) {
    const double sv = d;
    d = y2 * d - dd + c[j];
    dd = sv;
  }
  return x * d - dd + 0.5 * c[0];
}

// e^x K_nu(x) represented as mantissa * exp(log_scale) so that large orders at
// small arguments do not overflow.
struct ScaledBesselK {
  double mantissa;
  double log_scale;
};

// Temme's method: series for x < 2, Steed's continued fraction otherwise,
// followed by upward recurrence in the order (stable for K).
inline ScaledBesselK bessel_k_scaled_parts(double nu, double x) {
  constexpr double kEps = 1e-17;
  constexpr int kMaxIter = 100000;
  constexpr double kRescale = 1e280;
  static constexpr double c1[] = {-1.142022680371168e0, 6.5165112670737e-3,
                                  3.087090173086e-4,    -3.4706269649e-6,
                                  6.9437664e-9,         3.67795e-11,
                                  -1.356e-13};
  static constexpr double c2[] = {1.843740587300905e0,  -7.68528408447867e-2,
                                  1.2719271366546e-3,   -4.9717367042e-6,
                                  -3.31261198e-8,       2.423096e-10,
                                  -1.702e-13,           -1.49e-15};

  nu = std::abs(nu);
  const int nl = static_cast<int>(nu + 0.5);
  const double xmu = nu - nl;
  const double xmu2 = xmu * xmu;
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;

  double rkmu = 0.0;  // e^x K_xmu(x)
  double rk1 = 0.0;   // e^x K_{xmu+1}(x)
  if (x < 2.0) {
    const double x2 = 0.5 * x;
    const double pimu = std::numbers::pi * xmu;
    const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = xmu * d;
    const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    const double xx = 8.0 * xmu2 - 1.0;
    const double gam1 = chebyshev_eval(c1, 7, xx);
    const double gam2 = chebyshev_eval(c2, 8, xx);
    const double gampl = gam2 - xmu * gam1;  // 1/Gamma(1 + xmu)
    const double gammi = gam2 + xmu * gam1;  // 1/Gamma(1 - xmu)
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    for (int i = 1; i <= kMaxIter; ++i) {
      ff = (i * ff + p + q) / (i * static_cast<double>(i) - xmu2);
      c *= d / i;
      p /= (i - xmu);
      q /= (i + xmu);
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - i * ff);
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    const double ex = std::exp(x);
    rkmu = sum * ex;
    rk1 = sum1 * xi2 * ex;
  } else {
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25 - xmu2;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i <= kMaxIter; ++i) {
      a -= 2 * (i - 1);
      c = -a * c / i;
      const double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0;
      d = 1.0 / (b + a * d);
      delh = (b * d - 1.0) * delh;
      h += delh;
      const double dels = q * delh;
      s += dels;
      if (std::abs(dels / s) < kEps) break;
    }
    h = a1 * h;
    rkmu = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
    rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
  }

  double log_scale = 0.0;
  for (int i = 1; i <= nl; ++i) {
    const double next = (xmu + i) * xi2 * rk1 + rkmu;
    rkmu = rk1;
    rk1 = next;
    if (rk1 > kRescale) {
      rkmu /= kRescale;
      rk1 /= kRescale;
      log_scale += std::log(kRescale);
    }
  }
  return {rkmu, log_scale};
}

inline void check_bessel_argument(double x) {
  if (!(x > 0.0)) {
    std::ostringstream msg;
    msg << "bessel_k: argument must be positive, got " << x;
    throw DomainError(msg.str());
  }
}

}  // namespace detail

/// Modified Bessel function of the second kind K_nu(x), real order, x > 0.
/// K_{-nu} = K_nu. Underflows to 0 for very large x.
inline double bessel_k(double nu, double x) {
  detail::check_bessel_argument(x);
  const auto parts = detail::bessel_k_scaled_parts(nu, x);
  if (parts.log_scale == 0.0) return parts.mantissa * std::exp(-x);
  return parts.mantissa * std::exp(parts.log_scale - x);
}

/// e^x K_nu(x).
inline double bessel_k_scaled(double nu, double x) {
  detail::check_bessel_argument(x);
  const auto parts = detail::bessel_k_scaled_parts(nu, x);
  return parts.mantissa * std::exp(parts.log_scale);
}

/// log K_nu(x), finite wherever K is representable in log form.
inline double log_bessel_k(double nu, double x) {
  detail::check_bessel_argument(x);
  const auto parts = detail::bessel_k_scaled_parts(nu, x);
  return std::log(parts.mantissa) + parts.log_scale - x;
}

/// g(x) = integral_0^{pi/4} sin(theta)^x dtheta, x > -1.
inline double g_quarter(double x) {
  if (!(x > -1.0)) {
    std::ostringstream msg;
    msg << "g_quarter: integral diverges for x = " << x << " <= -1";
    throw DomainError(msg.str());
  }
  if (x == 0.0) return std::numbers::pi / 4.0;
  auto integrand = [x](double theta) {
    if (theta <= 0.0) return x > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::exp(x * std::log(std::sin(theta)));
  };
  const auto est = quad::tanh_sinh(integrand, 0.0, std::numbers::pi / 4.0, 1e-13);
  if (!(est.error <= 1e-10 * std::abs(est.value))) {
    throw AccuracyError("g_quarter: quadrature did not converge", est.value, est.error);
  }
  return est.value;
}

}  // namespace uvturb
