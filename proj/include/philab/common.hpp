#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace philab {

/// Bad arguments, malformed configs, violated preconditions. CLI exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite intermediates, singular solves, Newton failures. CLI exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A hard assertion of a property suite failed. CLI exit code 1.
struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Full round-trip precision for doubles in CSV output.
inline std::string fmt_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace philab
