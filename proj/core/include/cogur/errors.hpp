#pragma once

#include <stdexcept>
#include <string>

namespace cogur {

// Error taxonomy. Configuration and validation problems map to CLI exit
// code 1, numerical failures to exit code 2.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct config_error : error {
  using error::error;
};

// Rejected model data: inadmissible kernel, failed balance condition, ...
struct validation_error : error {
  using error::error;
};

struct unsupported_parameter_error : config_error {
  using config_error::config_error;
};

struct shape_error : error {
  using error::error;
};

struct grid_mismatch_error : error {
  using error::error;
};

struct resource_error : error {
  using error::error;
};

struct numerical_error : error {
  using error::error;
};

struct instability_error : numerical_error {
  using numerical_error::numerical_error;
};

}  // namespace cogur
