#pragma once

#include <stdexcept>
#include <string>

namespace tdqmc {

/// Invalid configuration or parameters (CLI exit code 1).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Divergence, NaN/Inf or a failed solve (CLI exit code 2).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File system or serialization failure (CLI exit code 3).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tdqmc
