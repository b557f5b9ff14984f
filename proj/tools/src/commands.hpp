#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ksphere/pipeline.hpp"

namespace ksphere::cli {

enum ExitCode : int { kPass = 0, kInternal = 1, kValidation = 2, kInvariant = 3 };

/// Flags shared by every subcommand; unset values leave the config alone.
struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> t_max;
  std::optional<int> samples;
  std::optional<double> rtol;
  std::optional<double> atol;
  std::string model;          // JSON text or a path to a ModelSpec file
  std::string hamiltonian;    // path
  std::string seed_operator;  // Pauli string
  std::optional<int> random_dim;
};

RunConfig resolve_config(const CommonFlags& flags);

int cmd_lanczos(const RunConfig& config, bool include_basis, std::ostream& log);
int cmd_evolve(const RunConfig& config, std::ostream& log);
int cmd_geometry(const RunConfig& config, std::ostream& log);
int cmd_bounds(const RunConfig& config, bool grid, std::ostream& log);
int cmd_model(const RunConfig& config, std::ostream& log);
int cmd_verify(const RunConfig& config, std::ostream& log);

}  // namespace ksphere::cli
