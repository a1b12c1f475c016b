#pragma once

// Extended-precision scalar for the series routes. The four residue families
// of the cascaded density cancel against each other by many orders of
// magnitude at large irradiance, so the sums run in binary128 when libquadmath
// is available and in x87 long double otherwise.

#include <cmath>

#if defined(UVTURB_USE_QUADMATH) && UVTURB_USE_QUADMATH
#include <quadmath.h>
#endif

namespace uvturb::xp {

#if defined(UVTURB_USE_QUADMATH) && UVTURB_USE_QUADMATH
using Real = __float128;
inline Real log(Real x) { return logq(x); }
inline Real exp(Real x) { return expq(x); }
inline Real sin(Real x) { return sinq(x); }
inline Real abs(Real x) { return fabsq(x); }
inline Real lgamma_abs(Real x) { return lgammaq(x); }
inline Real pi() { return 4 * atanq(1); }
inline bool isfinite(Real x) { return finiteq(x) != 0; }
#else
using Real = long double;
inline Real log(Real x) { return std::log(x); }
inline Real exp(Real x) { return std::exp(x); }
inline Real sin(Real x) { return std::sin(x); }
inline Real abs(Real x) { return std::fabs(x); }
inline Real lgamma_abs(Real x) { return std::lgamma(x); }
inline Real pi() { return 3.141592653589793238462643383279502884L; }
inline bool isfinite(Real x) { return std::isfinite(x); }
#endif

inline Real pow(Real base, Real e) { return exp(e * log(base)); }

}  // namespace uvturb::xp
