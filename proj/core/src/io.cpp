#include "ksphere/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ksphere/error.hpp"

namespace ksphere::io {

std::string_view tool_version() { return "0.3.0"; }

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex_hash(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json meta_json(const Provenance& p) {
  return {{"tool", kToolName}, {"version", tool_version()},
          {"command", p.command}, {"config_hash", p.config_hash}};
}

std::string csv_comment(const Provenance& p) {
  std::string s = "# ";
  s += kToolName;
  s += ' ';
  s += tool_version();
  s += ' ' + p.command + " config=" + p.config_hash + '\n';
  return s;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::vector<double>> rows_of(const json& j, const char* key) {
  if (!j.contains(key)) return {};
  if (!j.at(key).is_array()) throw ValidationError(std::string("\"") + key + "\" must be an array of rows");
  return j.at(key).get<std::vector<std::vector<double>>>();
}

json number_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(std::isfinite(x) ? json(x) : json(nullptr));
  return a;
}

template <class T>
json int_array(const std::vector<T>& v) {
  json a = json::array();
  for (T x : v) a.push_back(x);
  return a;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("re"))
    throw ValidationError("dense matrix needs an object with \"re\" (and optional \"im\")");
  const auto re = rows_of(j, "re");
  const auto im = rows_of(j, "im");
  const std::size_t d = j.contains("dim") ? j.at("dim").get<std::size_t>() : re.size();
  if (d == 0 || re.size() != d) throw ValidationError("\"re\" must have dim rows");
  if (!im.empty() && im.size() != d) throw ValidationError("\"im\" must have dim rows");
  ComplexMatrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < d; ++r) {
    if (re[r].size() != d || (!im.empty() && im[r].size() != d))
      throw ValidationError("matrix rows must have dim entries");
    for (std::size_t c = 0; c < d; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          Complex(re[r][c], im.empty() ? 0.0 : im[r][c]);
  }
  return m;
}

json matrix_to_json(const ComplexMatrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rr = json::array(), ri = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

HermitianMatrix hamiltonian_from_json(const json& j, int dim_max) {
  try {
    if (j.contains("qubits")) {
      PauliStringSum sum;
      sum.num_qubits = j.at("qubits").get<int>();
      for (const auto& term : j.at("terms")) {
        if (!term.is_array() || term.size() != 2)
          throw ValidationError("Pauli term must be [coefficient, \"string\"]");
        sum.terms.push_back({term[0].get<double>(), term[1].get<std::string>()});
      }
      return realize_pauli_sum(sum, dim_max);
    }
    ComplexMatrix m = matrix_from_json(j);
    if (m.rows() > dim_max)
      throw ValidationError("Hamiltonian dimension " + std::to_string(m.rows()) +
                            " exceeds dim_max = " + std::to_string(dim_max));
    return HermitianMatrix(std::move(m));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed Hamiltonian JSON: ") + e.what());
  }
}

OperatorState operator_from_json(const json& j, int dim) {
  try {
    OperatorState o = j.is_string() ? pauli_operator(j.get<std::string>())
                                    : OperatorState(matrix_from_json(j));
    if (o.dim() != dim)
      throw ValidationError("seed operator has dimension " + std::to_string(o.dim()) +
                            ", Hamiltonian has " + std::to_string(dim));
    return o;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed seed operator: ") + e.what());
  }
}

json chain_to_json(const LanczosChain& chain, bool include_basis) {
  json j = {{"D", chain.dim},
            {"b", number_array(chain.coefficients)},
            {"ortho_residual", chain.ortho_residual},
            {"tridiag_residual", chain.tridiag_residual},
            {"stationary", chain.stationary}};
  if (chain.stationary) j["flag"] = "stationary operator";
  if (include_basis) {
    json basis = json::array();
    for (const auto& k : chain.basis) basis.push_back(matrix_to_json(k.entries()));
    j["basis"] = std::move(basis);
  }
  return j;
}

LanczosChain chain_from_json(const json& j) {
  try {
    return LanczosChain::from_coefficients(j.at("b").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed chain JSON: ") + e.what());
  }
}

ModelSpec model_from_json(const json& j) {
  try {
    ModelSpec s;
    s.family = parse_family(j.at("family").get<std::string>());
    s.omega = j.value("omega", s.omega);
    s.h = j.value("h", s.h);
    s.b = j.value("b", s.b);
    s.alpha = j.value("alpha", s.alpha);
    s.eta = j.value("eta", s.eta);
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed model spec: ") + e.what());
  }
}

json model_to_json(const ModelSpec& s) {
  json j = {{"family", family_name(s.family)}};
  switch (s.family) {
    case ModelFamily::QubitZ: j["omega"] = s.omega; break;
    case ModelFamily::QubitTransverse: j["omega"] = s.omega; j["h"] = s.h; break;
    case ModelFamily::ConstantB: j["b"] = s.b; break;
    case ModelFamily::Meixner: j["alpha"] = s.alpha; j["eta"] = s.eta; break;
    case ModelFamily::Coherent: j["alpha"] = s.alpha; break;
  }
  return j;
}

std::string trajectory_csv(const AmplitudeTrajectory& traj, const Provenance& p) {
  std::string out = csv_comment(p);
  out += "t";
  for (int n = 0; n < traj.dim(); ++n) out += ",phi_" + std::to_string(n);
  out += '\n';
  for (int k = 0; k < traj.samples(); ++k) {
    out += format_number(traj.times[static_cast<std::size_t>(k)]);
    for (int n = 0; n < traj.dim(); ++n) {
      out += ',';
      out += format_number(traj.phi(n, k));
    }
    out += '\n';
  }
  return out;
}

json trajectory_diagnostics(const AmplitudeTrajectory& traj, const LanczosChain& chain) {
  const std::vector<double> v = krylov_speed(traj);
  double dev = 0.0;
  for (double s : v) dev = std::max(dev, std::abs(s - chain.b1()));
  return {{"method", traj.method},
          {"D", traj.dim()},
          {"samples", traj.samples()},
          {"norm_drift_max", traj.max_norm_drift()},
          {"speed_deviation_max", dev},
          {"speed_deviation_relative", chain.b1() > 0 ? dev / chain.b1() : dev},
          {"imag_residual_max", traj.max_imag_residual}};
}

json geometry_to_json(const GeometryReport& r) {
  return {{"times", number_array(r.times)},
          {"speed_series", number_array(r.speed_series)},
          {"b1", r.b1},
          {"arc_length", r.arc_length},
          {"arc_length_expected", r.arc_length_expected},
          {"curvature_series", number_array(r.curvature.series)},
          {"curvature_closed_form", finite_or_null(r.curvature.closed_form)},
          {"curvature_defined", r.curvature.defined},
          {"torsion_series", number_array(r.torsion.series)},
          {"torsion_closed_form", finite_or_null(r.torsion.closed_form)},
          {"torsion_closed_form_gram", finite_or_null(r.torsion.closed_form_gram)},
          {"torsion_defined", r.torsion.defined},
          {"torsion_note", r.torsion.note},
          {"geodesic_residual_series", number_array(r.geodesic_residual_series)},
          {"theta_series", number_array(r.return_amplitude.theta)},
          {"bound_margin_times", number_array(r.return_amplitude.times)},
          {"bound_margin_series", number_array(r.return_amplitude.margin)},
          {"bound_margin_min", r.return_amplitude.min_margin},
          {"arccos_clip_max", r.return_amplitude.max_clip},
          {"acceleration_norm_sq_series", number_array(r.acceleration_norm_sq_series)},
          {"acceleration_norm_sq_expected", r.acceleration_norm_sq_expected}};
}

std::string geometry_csv(const GeometryReport& r, const Provenance& p) {
  std::string out = csv_comment(p);
  out += "t,speed,curvature,torsion,geodesic_residual,acceleration_norm_sq\n";
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    out += format_number(r.times[k]) + ',' + format_number(r.speed_series[k]) + ',' +
           format_number(r.curvature.series.empty() ? std::nan("") : r.curvature.series[k]) + ',' +
           format_number(r.torsion.series.empty() ? std::nan("") : r.torsion.series[k]) + ',' +
           format_number(r.geodesic_residual_series[k]) + ',' +
           format_number(r.acceleration_norm_sq_series[k]) + '\n';
  }
  return out;
}

json hall_to_json(const HallReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"t", s.t},
                       {"mean_generator", s.mean_generator},
                       {"delta_L_nc", s.delta_L_nc},
                       {"delta_functional", finite_or_null(s.delta_functional)},
                       {"raw_inverse_sq", s.raw_inverse_sq},
                       {"closed_inverse_sq", s.closed_inverse_sq},
                       {"product", finite_or_null(s.product)},
                       {"classical_part_norm", s.classical_part_norm},
                       {"raw_vs_closed_gap", s.raw_vs_closed_gap},
                       {"skipped_levels", s.skipped_levels}});
  return {{"samples", std::move(samples)},
          {"max_product_deviation", finite_or_null(r.max_product_deviation)},
          {"max_classical_part", r.max_classical_part},
          {"max_gap", r.max_gap}};
}

json bounds_to_json(const BoundsReport& r) {
  return {{"times", number_array(r.times)},
          {"v_op", r.v_op},
          {"tail_margin_min", finite_or_null(r.tail_margin_min)},
          {"tail_argmin_level", r.tail.argmin_level},
          {"tail_argmin_time", r.tail.argmin_time},
          {"stirling_onset_constant", stirling_onset_constant()},
          {"envelope_onset_over_vt", number_array(r.tail.envelope_onset)},
          {"observed_onset_over_vt", number_array(r.tail.observed_onset)},
          {"front_geometric", int_array(r.front_geometric)},
          {"front_peak", int_array(r.front_peak)},
          {"complexity_series", number_array(r.complexity.complexity)},
          {"complexity_variance", number_array(r.complexity.spread)},
          {"complexity_rate", number_array(r.complexity.rate)},
          {"growth_rate_margin", r.growth_rate_margin},
          {"growth_rate_scaled_margin", r.growth_rate_scaled_margin},
          {"complexity_ratio_series", number_array(r.complexity_ratio_series)}};
}

std::string bounds_csv(const BoundsReport& r, const Provenance& p) {
  std::string out = csv_comment(p);
  out += "t,complexity,complexity_variance,complexity_rate,front_geometric,front_peak,complexity_ratio\n";
  for (std::size_t k = 0; k < r.times.size(); ++k)
    out += format_number(r.times[k]) + ',' + format_number(r.complexity.complexity[k]) + ',' +
           format_number(r.complexity.spread[k]) + ',' + format_number(r.complexity.rate[k]) + ',' +
           std::to_string(r.front_geometric[k]) + ',' + std::to_string(r.front_peak[k]) + ',' +
           format_number(r.complexity_ratio_series[k]) + '\n';
  return out;
}

std::string envelope_grid_csv(const TailEnvelopeReport& r, const Provenance& p) {
  std::string out = csv_comment(p);
  out += "n";
  for (double t : r.times) out += ",t=" + format_number(t);
  out += '\n';
  for (Eigen::Index n = 0; n < r.margin.rows(); ++n) {
    out += std::to_string(n);
    for (Eigen::Index k = 0; k < r.margin.cols(); ++k) out += ',' + format_number(r.margin(n, k));
    out += '\n';
  }
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << content;
  if (!out) throw NumericalError("write failed for " + path.string());
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  write_text_file(path, j.dump(2) + '\n');
}

}  // namespace ksphere::io
