#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "cogur/galerkin.hpp"

namespace cogur {

/// Parsed value of one config key: string, number, boolean or number array.
using ConfigValue = std::variant<std::string, double, bool, std::vector<double>>;

/// Section -> key -> value, as read from the file.  The format is a strict
/// key-value document with [section] headers, '#' comments, quoted strings,
/// decimal numbers and flat numeric arrays.
using ConfigTree = std::map<std::string, std::map<std::string, ConfigValue>>;

ConfigTree parse_config_file(const std::string& path);
ConfigTree parse_config_text(const std::string& text, const std::string& origin);

/// Declarative run description resolved against the schema, defaults filled.
struct RunConfig {
  // [geometry]
  Backend backend = Backend::interval;
  double size = 1.0;
  int refine = 16;
  // [model]
  double alpha = 1.0, beta = 1.0, nu = 0.5, omega = 0.5;
  // [kernel_omega] / [kernel_gamma]
  MemoryKernel kernel_omega, kernel_gamma;
  // [nonlinearity]
  NonlinearitySpec nonlin;
  // [discretization]
  int n_modes = 4;
  double dt = 1e-2;
  double t_end = 1.0;
  Scheme scheme = Scheme::imex_euler;
  double s_max = 0.0;  // 0: derive from kernel decay
  // [initial]
  std::string u0_kind = "zero";  // zero | modal | constant | pair_constant
  std::vector<double> u0_coeffs;
  double u0_value = 0.0, v0_value = 0.0;
  std::string phi0_kind = "zero";  // zero | linear_in_s | modal_exp
  double phi0_scale = 1.0, phi0_rate = 1.0;
  std::vector<double> phi0_coeffs;
  // [output]
  std::string out_dir = "out";
  int stride = 1;
  std::vector<std::string> channels = {"energy_X2", "energy_M1", "dissipation",
                                       "V1_norm"};

  std::string canonical() const;  // deterministic serialization for hashing
};

/// Schema validation collects every offending key before throwing.
RunConfig resolve_config(const ConfigTree& tree);

RunConfig parse_config(const std::string& path);

/// Build the discrete objects (geometry, operator, basis, initial data).
/// Validators are the caller's business: run() invokes them unless forced.
SimConfig build_sim(const RunConfig& rc, bool force = false);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace cogur
