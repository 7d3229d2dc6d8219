#pragma once

#include <stdexcept>
#include <string>

namespace winnav {

// Usage / argument errors. CLI maps these to exit code 1.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& m) : std::runtime_error(m) {}
};

// Bad or stale data files, fingerprint mismatches. CLI exit code 2.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& m) : std::runtime_error(m) {}
};

// Failed runtime assertion (e.g. required ordering in --assert mode). Exit code 3.
struct AssertionError : std::runtime_error {
  explicit AssertionError(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace winnav
