#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ksphere/bounds.hpp"
#include "ksphere/geometry.hpp"
#include "ksphere/models.hpp"

namespace ksphere::io {

using json = nlohmann::json;

inline constexpr std::string_view kToolName = "ksphere";
std::string_view tool_version();

/// 64-bit FNV-1a, printed as 16 hex digits.
std::uint64_t fnv1a(std::string_view data);
std::string hex_hash(std::uint64_t h);

/// Stamp embedded in every emitted file.
struct Provenance {
  std::string command;
  std::string config_hash;
};

json meta_json(const Provenance& p);
/// "# ksphere <version> <command> config=<hash>"
std::string csv_comment(const Provenance& p);

/// {"dim": d, "re": [[...]], "im": [[...]]} or
/// {"qubits": n, "terms": [[coeff, "XZ.."], ...]}. "im" may be omitted.
HermitianMatrix hamiltonian_from_json(const json& j, int dim_max = kDefaultDimMax);
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

/// A Pauli string such as "XI" or a dense {"dim","re","im"} matrix.
OperatorState operator_from_json(const json& j, int dim);

json chain_to_json(const LanczosChain& chain, bool include_basis = false);
/// Coefficient-only chain from {"b": [...]}.
LanczosChain chain_from_json(const json& j);

ModelSpec model_from_json(const json& j);
json model_to_json(const ModelSpec& spec);

std::string trajectory_csv(const AmplitudeTrajectory& traj, const Provenance& p);
json trajectory_diagnostics(const AmplitudeTrajectory& traj, const LanczosChain& chain);

json geometry_to_json(const GeometryReport& r);
std::string geometry_csv(const GeometryReport& r, const Provenance& p);

json hall_to_json(const HallReport& r);

json bounds_to_json(const BoundsReport& r);
std::string bounds_csv(const BoundsReport& r, const Provenance& p);
/// Dense (n, t) margin grid: header n, then one column per time.
std::string envelope_grid_csv(const TailEnvelopeReport& r, const Provenance& p);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);
void write_json_file(const std::filesystem::path& path, const json& j);

/// Round-trippable fixed formatting used by all CSV writers.
std::string format_number(double x);

}  // namespace ksphere::io
