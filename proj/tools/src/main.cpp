#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ksphere/error.hpp"
#include "ksphere/io.hpp"

namespace {

using ksphere::cli::CommonFlags;

void add_common(CLI::App* cmd, CommonFlags& f) {
  auto env = [](const char* name) { return std::string("KSPHERE_") + name; };
  cmd->add_option("--config", f.config, "Run config JSON")->envname(env("CONFIG"));
  cmd->add_option("--out", f.out, "Output directory")->envname(env("OUT"));
  cmd->add_option("--seed", f.seed, "Random seed")->envname(env("SEED"));
  cmd->add_option("--t-max", f.t_max, "End of the uniform time grid")->envname(env("T_MAX"));
  cmd->add_option("--samples", f.samples, "Number of time samples")->envname(env("SAMPLES"));
  cmd->add_option("--rtol", f.rtol, "ODE relative tolerance")->envname(env("RTOL"));
  cmd->add_option("--atol", f.atol, "ODE absolute tolerance")->envname(env("ATOL"));
  cmd->add_option("--model", f.model, "ModelSpec JSON text or file")->envname(env("MODEL"));
  cmd->add_option("--hamiltonian", f.hamiltonian, "Hamiltonian JSON file")
      ->envname(env("HAMILTONIAN"));
  cmd->add_option("--seed-operator", f.seed_operator, "Seed as a Pauli string, e.g. XI")
      ->envname(env("SEED_OPERATOR"));
  cmd->add_option("--random-dim", f.random_dim, "Random Hermitian Hamiltonian of this dimension")
      ->envname(env("RANDOM_DIM"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Krylov-chain operator growth: chains, dynamics, geometry and bounds"};
  app.set_version_flag("--version", std::string(ksphere::io::tool_version()));
  app.require_subcommand(1);

  CommonFlags flags;
  bool basis = false, grid = false, zoo = false, inject_bug = false;
  std::vector<std::string> checks;

  auto* lanczos = app.add_subcommand("lanczos", "Build the Lanczos chain of a seed operator");
  add_common(lanczos, flags);
  lanczos->add_flag("--basis", basis, "Include the Krylov basis in chain.json");

  auto* evolve = app.add_subcommand("evolve", "Evolve the Krylov amplitudes");
  add_common(evolve, flags);

  auto* geometry = app.add_subcommand("geometry", "Speed, curvature, torsion and Hall check");
  add_common(geometry, flags);

  auto* bounds = app.add_subcommand("bounds", "Tail envelope, fronts, complexity and moments");
  add_common(bounds, flags);
  bounds->add_flag("--grid", grid, "Also write the (n, t) envelope margin grid");

  auto* model = app.add_subcommand("model", "Closed-form amplitudes of a solvable family");
  add_common(model, flags);

  auto* verify = app.add_subcommand("verify", "Run the identity and bound checks");
  add_common(verify, flags);
  verify->add_flag("--zoo", zoo, "Sweep the built-in model zoo")->envname("KSPHERE_ZOO");
  verify->add_flag("--inject-bug", inject_bug, "Flip the sign of A(1,0) to self-test the harness")
      ->envname("KSPHERE_INJECT_BUG");
  auto* checks_opt = verify->add_option("--checks", checks, "Subset of check groups")
                         ->delimiter(',')
                         ->envname("KSPHERE_CHECKS");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ksphere::cli::kValidation;
  }

  using namespace ksphere;
  try {
    RunConfig config = cli::resolve_config(flags);
    if (*verify) {
      if (zoo) config.zoo = true;
      if (inject_bug) config.inject_bug = true;
      if (checks_opt->count() > 0) config.checks = checks;
      // A single "none" entry or an explicitly empty list means no checks.
      if (config.checks && config.checks->size() == 1 && config.checks->front().empty())
        config.checks = std::vector<std::string>{};
      config.validate();
      return cli::cmd_verify(config, std::cout);
    }
    if (*lanczos) return cli::cmd_lanczos(config, basis, std::cout);
    if (*evolve) return cli::cmd_evolve(config, std::cout);
    if (*geometry) return cli::cmd_geometry(config, std::cout);
    if (*bounds) return cli::cmd_bounds(config, grid, std::cout);
    if (*model) return cli::cmd_model(config, std::cout);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kValidation;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return cli::kInvariant;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return cli::kInternal;
  }
  return cli::kInternal;
}
