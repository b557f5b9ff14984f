#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>

#include "ksphere/error.hpp"
#include "ksphere/io.hpp"
#include "ksphere/pipeline.hpp"

using namespace ksphere;
using io::json;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("ksphere_io_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("dense Hamiltonian JSON") {
  const json j = json::parse(R"({"dim": 2, "re": [[1, 0.5], [0.5, -1]], "im": [[0, -0.25], [0.25, 0]]})");
  const HermitianMatrix h = io::hamiltonian_from_json(j);
  CHECK(h.dim() == 2);
  CHECK(h.entries()(0, 1) == Complex(0.5, -0.25));
  CHECK(h.entries()(1, 0) == Complex(0.5, 0.25));

  const json real = json::parse(R"({"re": [[0, 1], [1, 0]]})");
  CHECK(io::hamiltonian_from_json(real).entries()(0, 1) == Complex(1.0, 0.0));

  const std::string bad = error_of([] {
    io::hamiltonian_from_json(json::parse(R"({"re": [[0, 1.3], [1, 0]]})"));
  });
  CHECK(bad.find("not Hermitian") != std::string::npos);
  CHECK(bad.find("0.3") != std::string::npos);
  CHECK_THROWS_AS(io::hamiltonian_from_json(json::parse(R"({"re": [[0, 1], [1]]})")), ValidationError);
  CHECK_THROWS_AS(io::hamiltonian_from_json(json::parse(R"({"im": [[0]]})")), ValidationError);

  const json big = io::matrix_to_json(ComplexMatrix::Identity(8, 8));
  const std::string cap = error_of([&] { io::hamiltonian_from_json(big, 4); });
  CHECK(cap.find("dim_max = 4") != std::string::npos);
}

TEST_CASE("Pauli Hamiltonian JSON") {
  const json j = json::parse(R"({"qubits": 2, "terms": [[1.0, "ZI"], [0.5, "XX"]]})");
  const HermitianMatrix h = io::hamiltonian_from_json(j);
  const ComplexMatrix expect = pauli_string_matrix("ZI") + 0.5 * pauli_string_matrix("XX");
  CHECK((h.entries() - expect).norm() < 1e-15);
  CHECK_THROWS_AS(io::hamiltonian_from_json(json::parse(R"({"qubits": 2, "terms": [[1.0, "Z"]]})")),
                  ValidationError);
  CHECK_THROWS_AS(io::hamiltonian_from_json(json::parse(R"({"qubits": 1, "terms": [[1.0, "Q"]]})")),
                  ValidationError);
  CHECK_THROWS_AS(io::hamiltonian_from_json(json::parse(R"({"qubits": 1, "terms": [1.0]})")),
                  ValidationError);
}

TEST_CASE("matrix and operator round trips") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  ComplexMatrix m(3, 3);
  for (Eigen::Index i = 0; i < 9; ++i) m(i) = Complex(g(rng), g(rng));
  const ComplexMatrix back = io::matrix_from_json(json::parse(io::matrix_to_json(m).dump()));
  CHECK((back - m).norm() == 0.0);

  CHECK(io::operator_from_json("XZ", 4).dim() == 4);
  CHECK_THROWS_AS(io::operator_from_json("X", 4), ValidationError);
}

TEST_CASE("chain and model round trips") {
  const LanczosChain c = LanczosChain::from_coefficients({0.5, 1.25, 2.0});
  const json j = io::chain_to_json(c);
  CHECK(j.at("D") == 4);
  CHECK_FALSE(j.contains("flag"));
  CHECK(io::chain_from_json(json::parse(j.dump())).coefficients == c.coefficients);
  CHECK(io::chain_to_json(LanczosChain::from_coefficients({})).at("flag") == "stationary operator");
  CHECK_THROWS_AS(io::chain_from_json(json::parse(R"({"b": [1, -1]})")), ValidationError);
  CHECK_THROWS_AS(io::chain_from_json(json::parse(R"({"a": [1]})")), ValidationError);

  for (const ModelSpec& s : {ModelSpec::qubit_z(2.0), ModelSpec::qubit_transverse(1.0, 0.5),
                             ModelSpec::constant_b(0.3), ModelSpec::meixner(1.0, 2.5),
                             ModelSpec::coherent(0.75)}) {
    const ModelSpec r = io::model_from_json(io::model_to_json(s));
    CHECK(r.describe() == s.describe());
  }
  CHECK_THROWS_AS(io::model_from_json(json::parse(R"({"family": "meixner", "eta": -1})")), ValidationError);
  CHECK_THROWS_AS(io::model_from_json(json::parse(R"({"alpha": 1})")), ValidationError);
}

TEST_CASE("number formatting round trips") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0})
    CHECK(std::stod(io::format_number(x)) == x);
  CHECK(io::format_number(std::nan("")) == "nan");
  CHECK(io::format_number(-INFINITY) == "-inf");
}

TEST_CASE("trajectory CSV layout") {
  const LanczosChain c = LanczosChain::from_coefficients({1.0});
  const std::vector<double> grid = uniform_grid(1.0, 3);
  const AmplitudeTrajectory traj = evolve_spectral(c, grid);
  const std::string csv = io::trajectory_csv(traj, {"evolve", "abc"});
  CHECK(csv.rfind("# ksphere 0.3.0 evolve config=abc\n", 0) == 0);
  CHECK(csv.find("\nt,phi_0,phi_1\n") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  const json diag = io::trajectory_diagnostics(traj, c);
  CHECK(diag.at("D") == 2);
  CHECK(diag.at("speed_deviation_max").get<double>() < 1e-12);
}

TEST_CASE("hashes are deterministic") {
  CHECK(io::hex_hash(io::fnv1a("")) == "cbf29ce484222325");
  CHECK(io::hex_hash(io::fnv1a("a")) == "af63dc4c8601ec8c");
  RunConfig a, b;
  a.input = b.input = RunConfig::Input::Chain;
  a.chain_b = b.chain_b = {1.0, 2.0};
  b.out_dir = "/elsewhere";
  CHECK(a.hash() == b.hash());
  b.t_max = 11.0;
  CHECK(a.hash() != b.hash());
}

TEST_CASE("run config parsing") {
  const auto dir = scratch_dir("config");
  {
    std::ofstream(dir / "h.json") << R"({"qubits": 1, "terms": [[0.5, "Z"]]})";
  }
  const json j = json::parse(R"({
    "input": {"hamiltonian_file": "h.json"},
    "seed_operator": "X",
    "time_grid": {"t_max": 5, "samples": 11},
    "tolerances": {"rtol": 1e-9},
    "checks": ["speed", "hall"],
    "seed": 7
  })");
  const RunConfig c = parse_run_config(j, dir);
  CHECK(c.input == RunConfig::Input::Hamiltonian);
  CHECK(c.t_max == 5.0);
  CHECK(c.time_grid().size() == 11);
  CHECK(c.tol.rtol == 1e-9);
  CHECK(c.seed == 7);
  REQUIRE(c.checks);
  CHECK(c.checks->size() == 2);
  CHECK_NOTHROW(c.validate());
  const System s = prepare_system(c, c.t_max);
  CHECK(s.chain.dim == 2);
  CHECK(std::abs(s.chain.b1() - 1.0) < 1e-12);

  RunConfig bad = c;
  bad.t_max = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = c;
  bad.times = {0.0, 0.5, 0.5};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = c;
  bad.checks = std::vector<std::string>{"torsion"};
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  CHECK_THROWS_AS(parse_run_config(json::parse(R"({"input": {}})")), ValidationError);
  CHECK_THROWS_AS(parse_run_config(json::parse(R"({"time_grid": {"t_max": "long"}})")), ValidationError);
  RunConfig none;
  CHECK_THROWS_AS(prepare_system(none, 1.0), ValidationError);
}

TEST_CASE("model and random inputs") {
  const RunConfig m = parse_run_config(json::parse(R"({"input": {"model": {"family": "coherent", "alpha": 1}}})"));
  const System s = prepare_system(m, 3.0);
  CHECK(s.truncated);
  CHECK(s.tail_mass < 1e-12);
  CHECK(s.chain.b(4) == doctest::Approx(2.0));

  const RunConfig r = parse_run_config(json::parse(R"({"input": {"random": {"dim": 3}}, "seed": 11})"));
  const System x = prepare_system(r, 1.0);
  const System y = prepare_system(r, 1.0);
  CHECK(x.chain.coefficients == y.chain.coefficients);
  CHECK(x.chain.dim <= 7);  // d^2 - d + 1
}

TEST_CASE("file helpers") {
  const auto dir = scratch_dir("files");
  io::write_json_file(dir / "a.json", json{{"x", 1}});
  CHECK(io::read_json_file(dir / "a.json").at("x") == 1);
  CHECK_THROWS_AS(io::read_json_file(dir / "missing.json"), ValidationError);
  io::write_text_file(dir / "b.txt", "not json");
  CHECK_THROWS_AS(io::read_json_file(dir / "b.txt"), ValidationError);
}

}  // TEST_SUITE
