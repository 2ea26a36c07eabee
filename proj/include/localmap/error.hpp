#pragma once

#include <stdexcept>
#include <string>

namespace localmap {

// Malformed input files or command-line configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failures inside the model or a mapper (overflow, infeasible mapping, ...).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OverflowError : public ModelError {
 public:
  using ModelError::ModelError;
};

}  // namespace localmap
