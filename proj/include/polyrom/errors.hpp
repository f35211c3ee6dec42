#pragma once

#include <stdexcept>
#include <string>

namespace polyrom {

// Thrown when an iterative method fails to reach its tolerance.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File system / serialization failures, including parse errors of mesh files.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid experiment configuration (bad key, missing value, inconsistent setup).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace polyrom
