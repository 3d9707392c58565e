#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace onlinetrial {

// Fixed six-decimal rendering used for all real values in CSV output.
inline std::string fixed6(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", x);
  return std::string(buffer);
}

// Round to four decimals with exact halves going up, the convention used for
// the published significance levels (0.00125 renders as 0.0013).
inline double round4_half_up(double x) {
  return std::floor(x * 1e4 + 0.5) / 1e4;
}

inline std::string fixed4(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.4f", round4_half_up(x));
  return std::string(buffer);
}

}  // namespace onlinetrial
