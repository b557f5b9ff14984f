#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ksphere/io.hpp"

namespace ksphere {

struct Tolerances {
  double rtol = kDefaultOdeRtol;
  double atol = kDefaultOdeAtol;
  double term_tol = 1e-12;
  double tail_tol = 1e-12;
  double eps_occupation = 1e-12;
};

/// Checks understood by the verification harness.
inline const std::vector<std::string> kCheckGroups = {"speed", "geometry", "hall",
                                                      "bounds", "invariants", "moments"};

struct RunConfig {
  enum class Input { None, Hamiltonian, Model, Random, Chain };

  Input input = Input::None;
  io::json hamiltonian;          // Input::Hamiltonian
  ModelSpec model;               // Input::Model
  int random_dim = 4;            // Input::Random
  std::vector<double> chain_b;   // Input::Chain
  io::json seed_operator;        // null, a Pauli string, or a dense matrix
  int dim_max = kDefaultDimMax;

  double t_max = 10.0;
  int samples = 201;
  std::vector<double> times;     // explicit grid; overrides t_max/samples

  Tolerances tol;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
  std::optional<std::vector<std::string>> checks;  // unset means all groups
  bool zoo = false;
  bool inject_bug = false;

  /// Throws ValidationError when t_max <= 0, samples < 2, or the grid is
  /// not increasing from 0.
  void validate() const;
  std::vector<double> time_grid() const;
  /// Canonical JSON used for hashing; output locations are excluded.
  io::json canonical() const;
  std::string hash() const;
};

/// Parses the config file layout; relative "hamiltonian_file" paths resolve
/// against base_dir.
RunConfig parse_run_config(const io::json& j, const std::filesystem::path& base_dir = ".");

/// A chain ready for evolution, with its dense realization when one exists.
struct System {
  std::string name;
  LanczosChain chain;
  std::optional<Liouvillian> liouvillian;
  std::optional<OperatorState> seed;  // normalized
  std::optional<ModelSpec> model;
  double horizon = 0.0;               // validity of a truncated chain
  bool truncated = false;
  double tail_mass = 0.0;
  double doubling_gap = 0.0;
};

System prepare_system(const RunConfig& config, double horizon);

}  // namespace ksphere
