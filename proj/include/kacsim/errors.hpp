#pragma once

#include <stdexcept>
#include <string>

namespace kac {

// Rejected user input: bad parameters, malformed distributions, config errors.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine could not deliver a result at the required accuracy.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kac
