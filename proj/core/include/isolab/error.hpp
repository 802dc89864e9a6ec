#pragma once

#include <stdexcept>
#include <string>

namespace isolab {

/// Bad input: malformed parameters, arity mismatches, invalid geometry.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to converge or lost resolution.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace isolab
