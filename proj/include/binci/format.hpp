#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace binci {

/// Half-away-from-zero rounding at the 4th decimal.
inline double round4(double v) { return std::round(v * 1e4) / 1e4; }

/// 10 significant digits, the default tabular formatting.
inline std::string fmt_sig10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

/// Fixed 4 decimals after half-away-from-zero rounding.
inline std::string fmt_fixed4(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4f", round4(v));
  return buf;
}

inline std::string fmt_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

}  // namespace binci
