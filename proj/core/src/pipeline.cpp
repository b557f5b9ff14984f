#include "ksphere/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "ksphere/error.hpp"
#include "ksphere/random.hpp"

namespace ksphere {

void RunConfig::validate() const {
  if (times.empty()) {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("t_max must be > 0");
    if (samples < 2) throw ValidationError("samples must be >= 2");
  } else {
    if (times.size() < 2) throw ValidationError("explicit time grid needs at least 2 points");
    if (times.front() != 0.0) throw ValidationError("explicit time grid must start at 0");
    for (std::size_t k = 1; k < times.size(); ++k)
      if (!(times[k] > times[k - 1])) throw ValidationError("time grid must be strictly increasing");
  }
  if (!(tol.rtol > 0.0) || !(tol.atol > 0.0)) throw ValidationError("rtol and atol must be > 0");
  if (!(tol.term_tol > 0.0)) throw ValidationError("term_tol must be > 0");
  if (!(tol.tail_tol > 0.0)) throw ValidationError("tail_tol must be > 0");
  if (input == Input::Random && (random_dim < 2 || random_dim > dim_max))
    throw ValidationError("random dimension must lie in [2, dim_max]");
  if (checks)
    for (const auto& c : *checks)
      if (std::find(kCheckGroups.begin(), kCheckGroups.end(), c) == kCheckGroups.end())
        throw ValidationError("unknown check \"" + c + "\"");
}

std::vector<double> RunConfig::time_grid() const {
  return times.empty() ? uniform_grid(t_max, samples) : times;
}

io::json RunConfig::canonical() const {
  io::json j;
  switch (input) {
    case Input::None: j["input"] = nullptr; break;
    case Input::Hamiltonian: j["input"] = {{"hamiltonian", hamiltonian}}; break;
    case Input::Model: j["input"] = {{"model", io::model_to_json(model)}}; break;
    case Input::Random: j["input"] = {{"random", {{"dim", random_dim}}}}; break;
    case Input::Chain: j["input"] = {{"chain", {{"b", chain_b}}}}; break;
  }
  j["seed_operator"] = seed_operator;
  j["dim_max"] = dim_max;
  if (times.empty())
    j["time_grid"] = {{"t_max", t_max}, {"samples", samples}};
  else
    j["time_grid"] = {{"times", times}};
  j["tolerances"] = {{"rtol", tol.rtol}, {"atol", tol.atol}, {"term_tol", tol.term_tol},
                     {"tail_tol", tol.tail_tol}, {"eps_occupation", tol.eps_occupation}};
  j["seed"] = seed;
  j["checks"] = checks ? io::json(*checks) : io::json(kCheckGroups);
  j["zoo"] = zoo;
  j["inject_bug"] = inject_bug;
  return j;
}

std::string RunConfig::hash() const { return io::hex_hash(io::fnv1a(canonical().dump())); }

RunConfig parse_run_config(const io::json& j, const std::filesystem::path& base_dir) {
  RunConfig c;
  try {
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    if (j.contains("input")) {
      const auto& in = j.at("input");
      if (in.contains("hamiltonian")) {
        c.input = RunConfig::Input::Hamiltonian;
        c.hamiltonian = in.at("hamiltonian");
      } else if (in.contains("hamiltonian_file")) {
        c.input = RunConfig::Input::Hamiltonian;
        std::filesystem::path p = in.at("hamiltonian_file").get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        c.hamiltonian = io::read_json_file(p);
      } else if (in.contains("model")) {
        c.input = RunConfig::Input::Model;
        c.model = io::model_from_json(in.at("model"));
      } else if (in.contains("family")) {
        c.input = RunConfig::Input::Model;
        c.model = io::model_from_json(in);
      } else if (in.contains("random")) {
        c.input = RunConfig::Input::Random;
        c.random_dim = in.at("random").value("dim", c.random_dim);
      } else if (in.contains("chain")) {
        c.input = RunConfig::Input::Chain;
        c.chain_b = in.at("chain").at("b").get<std::vector<double>>();
      } else {
        throw ValidationError("input needs one of hamiltonian, hamiltonian_file, model, random, chain");
      }
    }
    if (j.contains("seed_operator")) c.seed_operator = j.at("seed_operator");
    c.dim_max = j.value("dim_max", c.dim_max);
    if (j.contains("time_grid")) {
      const auto& g = j.at("time_grid");
      if (g.contains("times")) c.times = g.at("times").get<std::vector<double>>();
      c.t_max = g.value("t_max", c.t_max);
      c.samples = g.value("samples", c.samples);
    }
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      c.tol.rtol = t.value("rtol", c.tol.rtol);
      c.tol.atol = t.value("atol", c.tol.atol);
      c.tol.term_tol = t.value("term_tol", c.tol.term_tol);
      c.tol.tail_tol = t.value("tail_tol", c.tol.tail_tol);
      c.tol.eps_occupation = t.value("eps_occupation", c.tol.eps_occupation);
    }
    if (j.contains("outputs")) c.out_dir = j.at("outputs").get<std::string>();
    c.seed = j.value("seed", c.seed);
    if (j.contains("checks")) c.checks = j.at("checks").get<std::vector<std::string>>();
    c.zoo = j.value("zoo", c.zoo);
    c.inject_bug = j.value("inject_bug", c.inject_bug);
  } catch (const io::json::exception& e) {
    throw ValidationError(std::string("malformed config: ") + e.what());
  }
  return c;
}

namespace {

System dense_system(std::string name, HermitianMatrix h, OperatorState seed,
                    const Tolerances& tol) {
  System s;
  s.name = std::move(name);
  Liouvillian l(std::move(h));
  s.chain = build_chain(l, seed, {tol.term_tol, 0});
  s.seed = seed.normalized();
  s.liouvillian = std::move(l);
  return s;
}

}  // namespace

System prepare_system(const RunConfig& config, double horizon) {
  switch (config.input) {
    case RunConfig::Input::None:
      throw ValidationError("no input given (hamiltonian, model, random or chain)");
    case RunConfig::Input::Hamiltonian: {
      HermitianMatrix h = io::hamiltonian_from_json(config.hamiltonian, config.dim_max);
      if (config.seed_operator.is_null())
        throw ValidationError("a seed_operator is required with a Hamiltonian input");
      OperatorState seed = io::operator_from_json(config.seed_operator, h.dim());
      return dense_system("hamiltonian", std::move(h), std::move(seed), config.tol);
    }
    case RunConfig::Input::Random: {
      Rng rng(config.seed);
      HermitianMatrix h = random_hermitian(config.random_dim, rng);
      OperatorState seed = config.seed_operator.is_null()
                               ? random_traceless_hermitian(config.random_dim, rng)
                               : io::operator_from_json(config.seed_operator, config.random_dim);
      return dense_system("random(d=" + std::to_string(config.random_dim) + ", seed=" +
                              std::to_string(config.seed) + ")",
                          std::move(h), std::move(seed), config.tol);
    }
    case RunConfig::Input::Chain: {
      System s;
      s.name = "chain";
      s.chain = LanczosChain::from_coefficients(config.chain_b);
      return s;
    }
    case RunConfig::Input::Model: {
      const ModelSpec& spec = config.model;
      if (spec.finite_chain()) {
        QubitRealization q = model_hamiltonian(spec);
        System s = dense_system(spec.describe(), std::move(q.hamiltonian), std::move(q.seed),
                                config.tol);
        s.model = spec;
        return s;
      }
      TruncatedChain tc = model_chain(spec, horizon, config.tol.tail_tol);
      System s;
      s.name = spec.describe();
      s.chain = std::move(tc.chain);
      s.model = spec;
      s.horizon = horizon;
      s.truncated = !tc.exact;
      s.tail_mass = tc.tail_mass;
      s.doubling_gap = tc.doubling_gap;
      return s;
    }
  }
  throw ValidationError("unsupported input");
}

}  // namespace ksphere
