#pragma once

#include <stdexcept>
#include <string>

namespace pulseforge {

// User-facing input problems: bad config files, bad flags, invalid targets.
// The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown (non-finite values, failed decompositions).
// The CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pulseforge
