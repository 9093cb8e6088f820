#pragma once

#include <stdexcept>
#include <string>

namespace perpcor {

// Bad inputs: schema violations, misaligned ids, infeasible constraints.
// The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Algorithm failed to converge or produced a non-finite result.
// The CLI maps these to exit code 1.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace perpcor
