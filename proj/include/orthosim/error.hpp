#pragma once

#include <stdexcept>

namespace orthosim {

// Malformed dimensions, indices or parameters passed to a library operation.
class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when an exact simulation would exceed the desk-scale resource guard.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace orthosim
