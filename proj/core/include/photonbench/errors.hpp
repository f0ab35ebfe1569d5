#pragma once

#include <stdexcept>
#include <string>

namespace photonbench {

/// Invalid configuration or argument supplied by the caller.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed, missing or insufficient input data (files, histograms, samples).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation that did not converge or produced an unphysical result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace photonbench
