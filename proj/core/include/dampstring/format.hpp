#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace dampstring {

// Fixed 17 significant digits so that outputs round-trip and diff cleanly.
inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

} // namespace dampstring
