#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace hte {

// Error taxonomy mirrors the CLI exit codes: validation -> 1, I/O -> 2,
// numeric failure -> 3.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Shortest decimal string that round-trips a double. All report files are
// written through this so reruns with the same seed are byte-identical.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  double back = 0.0;
  // Prefer shorter forms when they round-trip exactly.
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[32];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, x);
    if (std::sscanf(shorter, "%lf", &back) == 1 && back == x) {
      return shorter;
    }
  }
  return buf;
}

}  // namespace hte
