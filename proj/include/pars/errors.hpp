#pragma once

#include <stdexcept>
#include <string>

namespace pars {

// Error categories. The CLI maps each category to a distinct exit code
// (config 2, io 3, numerical 4).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Trim solver did not converge: the requested flight condition is not
// attainable with this airframe.
struct TrimInfeasible : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace pars
