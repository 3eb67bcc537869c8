#pragma once

// Extended-precision real used for phase bookkeeping.
//
// Phases in these interferometers reach 1e18 rad (m V0 dt / hbar) while the
// observable differences are O(1) rad, so every absolute phase, branch center
// and wavenumber is carried in binary128 and only reduced to double after
// differences have been taken.

#include <quadmath.h>

#include <cmath>
#include <string>

namespace clockfisher {

using xreal = __float128;

namespace detail {
inline const xreal kPiQ = acosq(-1);
inline const xreal kTwoPiQ = 2 * kPiQ;
}  // namespace detail

inline double to_double(xreal v) { return static_cast<double>(v); }

/// Reduces a phase to (-pi, pi].
inline double wrap_phase(xreal phase) {
  xreal r = fmodq(phase, detail::kTwoPiQ);
  if (r > detail::kPiQ) r -= detail::kTwoPiQ;
  if (r <= -detail::kPiQ) r += detail::kTwoPiQ;
  return static_cast<double>(r);
}

inline xreal xabs(xreal v) { return v < 0 ? -v : v; }

inline std::string to_string(xreal v, int digits = 36) {
  char buf[64];
  quadmath_snprintf(buf, sizeof buf, "%.*Qg", digits, v);
  return buf;
}

}  // namespace clockfisher
