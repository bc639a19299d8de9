#pragma once

#include <stdexcept>
#include <string>

namespace housegan {

/// Input violated a documented invariant (bad diagram, layout, shape, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A file or stream could not be read or did not match its format.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace housegan
