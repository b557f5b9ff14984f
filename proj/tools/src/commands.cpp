#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "ksphere/error.hpp"
#include "ksphere/verify.hpp"

namespace ksphere::cli {

namespace fs = std::filesystem;
using io::json;

RunConfig resolve_config(const CommonFlags& flags) {
  RunConfig c;
  if (!flags.config.empty()) {
    const fs::path path = flags.config;
    c = parse_run_config(io::read_json_file(path), path.parent_path());
  }
  if (!flags.out.empty()) c.out_dir = flags.out;
  if (flags.seed) c.seed = *flags.seed;
  if (flags.t_max) {
    c.t_max = *flags.t_max;
    c.times.clear();
  }
  if (flags.samples) {
    c.samples = *flags.samples;
    c.times.clear();
  }
  if (flags.rtol) c.tol.rtol = *flags.rtol;
  if (flags.atol) c.tol.atol = *flags.atol;
  if (!flags.model.empty()) {
    json j;
    if (fs::exists(flags.model)) {
      j = io::read_json_file(flags.model);
    } else {
      try {
        j = json::parse(flags.model);
      } catch (const json::parse_error& e) {
        throw ValidationError("--model is neither a file nor valid JSON: " + std::string(e.what()));
      }
    }
    c.input = RunConfig::Input::Model;
    c.model = io::model_from_json(j);
  }
  if (!flags.hamiltonian.empty()) {
    c.input = RunConfig::Input::Hamiltonian;
    c.hamiltonian = io::read_json_file(flags.hamiltonian);
  }
  if (flags.random_dim) {
    c.input = RunConfig::Input::Random;
    c.random_dim = *flags.random_dim;
  }
  if (!flags.seed_operator.empty()) c.seed_operator = flags.seed_operator;
  c.validate();
  return c;
}

namespace {

fs::path output_dir(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec || !fs::is_directory(c.out_dir))
    throw ValidationError("output directory " + c.out_dir.string() + " is not writable");
  return c.out_dir;
}

io::Provenance provenance(const RunConfig& c, const char* command) {
  return {command, c.hash()};
}

json with_meta(json body, const io::Provenance& p) {
  body["meta"] = io::meta_json(p);
  return body;
}

double grid_end(const RunConfig& c) { return c.time_grid().back(); }

json truncation_json(const System& s) {
  return {{"truncated", s.truncated},
          {"levels", s.chain.dim},
          {"horizon", s.horizon},
          {"tail_mass", s.tail_mass},
          {"doubling_gap", s.doubling_gap}};
}

}  // namespace

int cmd_lanczos(const RunConfig& config, bool include_basis, std::ostream& log) {
  const auto p = provenance(config, "lanczos");
  const System s = prepare_system(config, grid_end(config));
  json j = io::chain_to_json(s.chain, include_basis);
  j["system"] = s.name;
  j["dimension_cap"] = s.liouvillian ? json(s.liouvillian->dim() * s.liouvillian->dim() -
                                            s.liouvillian->dim() + 1)
                                     : json(nullptr);
  if (s.truncated) j["truncation"] = truncation_json(s);
  const fs::path out = output_dir(config) / "chain.json";
  io::write_json_file(out, with_meta(std::move(j), p));
  log << s.name << ": D = " << s.chain.dim;
  if (s.chain.stationary) log << " (stationary operator)";
  log << " -> " << out.string() << '\n';
  return kPass;
}

int cmd_evolve(const RunConfig& config, std::ostream& log) {
  const auto p = provenance(config, "evolve");
  const std::vector<double> times = config.time_grid();
  const System s = prepare_system(config, times.back());
  const AmplitudeTrajectory ode = evolve_ode(s.chain, times, config.tol.rtol, config.tol.atol);
  json diag = io::trajectory_diagnostics(ode, s.chain);
  diag["system"] = s.name;
  diag["truncation"] = truncation_json(s);
  if (s.chain.dim <= TruncationOptions{}.spectral_limit) {
    const AmplitudeTrajectory spec = evolve_spectral(s.chain, times);
    diag["method_agreement_max"] = (ode.phi - spec.phi).cwiseAbs().maxCoeff();
    diag["spectral"] = io::trajectory_diagnostics(spec, s.chain);
  } else {
    diag["method_agreement_max"] = nullptr;
  }
  const fs::path dir = output_dir(config);
  io::write_text_file(dir / "trajectory.csv", io::trajectory_csv(ode, p));
  io::write_json_file(dir / "trajectory.json", with_meta(std::move(diag), p));
  log << s.name << ": " << ode.samples() << " samples, D = " << ode.dim() << " -> "
      << (dir / "trajectory.csv").string() << '\n';
  return kPass;
}

int cmd_geometry(const RunConfig& config, std::ostream& log) {
  const auto p = provenance(config, "geometry");
  const std::vector<double> times = config.time_grid();
  const System s = prepare_system(config, times.back());
  const AmplitudeTrajectory traj = evolve_ode(s.chain, times, config.tol.rtol, config.tol.atol);
  const GeometryReport g = geometry_report(traj, s.chain);
  json j = io::geometry_to_json(g);
  j["system"] = s.name;
  if (s.chain.b1() > 0.0) j["hall"] = io::hall_to_json(hall_check(traj, s.chain, config.tol.eps_occupation));
  const fs::path dir = output_dir(config);
  io::write_json_file(dir / "geometry.json", with_meta(std::move(j), p));
  io::write_text_file(dir / "geometry.csv", io::geometry_csv(g, p));
  log << s.name << ": speed " << g.b1 << ", curvature " << g.curvature.closed_form << " -> "
      << (dir / "geometry.json").string() << '\n';
  return kPass;
}

int cmd_bounds(const RunConfig& config, bool grid, std::ostream& log) {
  const auto p = provenance(config, "bounds");
  const std::vector<double> times = config.time_grid();
  const System s = prepare_system(config, times.back());
  const AmplitudeTrajectory traj = evolve_ode(s.chain, times, config.tol.rtol, config.tol.atol);
  const BoundsReport r = bounds_report(traj, s.chain, grid);
  json j = io::bounds_to_json(r);
  j["system"] = s.name;
  j["truncation"] = truncation_json(s);
  json moments = json::array();
  for (const auto& m : moment_conservation(traj, s.chain))
    moments.push_back({{"order", m.order}, {"drift", m.drift},
                       {"liouvillian_moment", m.order % 2 == 0 ? json(m.liouvillian_moment) : json(nullptr)}});
  j["moments"] = std::move(moments);
  const fs::path dir = output_dir(config);
  io::write_json_file(dir / "bounds.json", with_meta(std::move(j), p));
  io::write_text_file(dir / "bounds.csv", io::bounds_csv(r, p));
  if (grid) io::write_text_file(dir / "envelope_grid.csv", io::envelope_grid_csv(r.tail, p));
  log << s.name << ": v_op " << r.v_op << ", min tail margin " << r.tail_margin_min << " -> "
      << (dir / "bounds.json").string() << '\n';
  return kPass;
}

int cmd_model(const RunConfig& config, std::ostream& log) {
  if (config.input != RunConfig::Input::Model)
    throw ValidationError("model needs a model spec (--model or input.model)");
  const auto p = provenance(config, "model");
  const ModelSpec& spec = config.model;
  const std::vector<double> times = config.time_grid();
  std::vector<ModelAmplitudes> amps;
  Eigen::Index width = 0;
  for (double t : times) {
    amps.push_back(model_amplitudes(spec, t, config.tol.tail_tol));
    width = std::max(width, amps.back().phi.size());
  }
  json samples = json::array();
  std::string csv = io::csv_comment(p) + "t";
  for (Eigen::Index n = 0; n < width; ++n) csv += ",phi_" + std::to_string(n);
  csv += '\n';
  for (const auto& a : amps) {
    json s = {{"t", a.t}, {"levels", a.phi.size()}, {"tail_mass", a.tail_mass},
              {"norm", a.phi.squaredNorm()}, {"closed_form", a.closed_form}};
    if ((spec.family == ModelFamily::Meixner || spec.family == ModelFamily::Coherent) && a.t > 0) {
      const PeakPrediction pk = model_peak_prediction(spec, a.t);
      s["peak_saddle"] = pk.saddle;
      s["peak_asymptote"] = pk.asymptote;
      if (pk.flagged) s["peak_note"] = pk.note;
    }
    samples.push_back(std::move(s));
    csv += io::format_number(a.t);
    for (Eigen::Index n = 0; n < width; ++n) {
      csv += ',';
      csv += io::format_number(n < a.phi.size() ? a.phi(n) : 0.0);
    }
    csv += '\n';
  }
  json j = {{"model", io::model_to_json(spec)}, {"samples", std::move(samples)}};
  json b = json::array();
  for (int n = 1; n <= 8; ++n) b.push_back(model_coefficients(spec, n));
  j["b_first"] = std::move(b);
  const fs::path dir = output_dir(config);
  io::write_json_file(dir / "model.json", with_meta(std::move(j), p));
  io::write_text_file(dir / "model.csv", csv);
  log << spec.describe() << ": " << times.size() << " samples -> " << (dir / "model.csv").string()
      << '\n';
  return kPass;
}

int cmd_verify(const RunConfig& config, std::ostream& log) {
  VerifyOptions opts;
  const std::vector<std::string> groups = config.checks.value_or(kCheckGroups);
  opts.groups = {groups.begin(), groups.end()};
  opts.tol = config.tol;
  opts.samples = config.samples;
  opts.inject_bug = config.inject_bug;
  if (opts.groups.empty()) {
    log << "no checks selected\n";
    return kPass;
  }

  std::vector<ZooEntry> entries;
  if (config.zoo) {
    entries = model_zoo(config.seed);
  } else {
    entries.push_back({config, grid_end(config)});
  }
  std::vector<CheckResult> results;
  for (auto& e : entries) {
    e.config.tol = config.tol;
    double t_max = e.t_max;
    System s = prepare_system(e.config, t_max > 0 ? t_max : 1.0);
    if (t_max <= 0.0) t_max = s.chain.b1() > 0 ? 10.0 / s.chain.b1() : 1.0;
    auto r = verify_system(s, t_max, opts);
    results.insert(results.end(), r.begin(), r.end());
  }
  const VerifySummary summary = summarize(std::move(results));
  const auto p = provenance(config, "verify");
  io::write_json_file(output_dir(config) / "verify.json", with_meta(summary_to_json(summary), p));
  log << summary_table(summary);
  return summary.ok() ? kPass : kInvariant;
}

}  // namespace ksphere::cli
