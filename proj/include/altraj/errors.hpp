#pragma once

#include <stdexcept>
#include <string>

namespace altraj {

// Invalid user input: bad orders, nonpositive durations, malformed files,
// dimension mismatches. CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// A required feasible point does not exist or could not be constructed.
// CLI maps this to exit code 3.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown: singular systems, failed root brackets, divergent
// durations. CLI maps this to exit code 4.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace altraj
