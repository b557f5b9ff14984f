#include "ksphere/models.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "ksphere/error.hpp"

namespace ksphere {

std::string_view family_name(ModelFamily family) {
  switch (family) {
    case ModelFamily::QubitZ: return "qubit_z";
    case ModelFamily::QubitTransverse: return "qubit_transverse";
    case ModelFamily::ConstantB: return "constant_b";
    case ModelFamily::Meixner: return "meixner";
    case ModelFamily::Coherent: return "coherent";
  }
  return "unknown";
}

ModelFamily parse_family(std::string_view name) {
  for (ModelFamily f : {ModelFamily::QubitZ, ModelFamily::QubitTransverse,
                        ModelFamily::ConstantB, ModelFamily::Meixner, ModelFamily::Coherent})
    if (family_name(f) == name) return f;
  throw ValidationError("unknown model family \"" + std::string(name) + "\"");
}

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

void ModelSpec::validate() const {
  switch (family) {
    case ModelFamily::QubitZ:
      require(std::isfinite(omega) && omega > 0.0, "qubit_z: omega must be > 0");
      break;
    case ModelFamily::QubitTransverse:
      require(std::isfinite(omega) && omega > 0.0, "qubit_transverse: omega must be > 0");
      require(std::isfinite(h) && h >= 0.0, "qubit_transverse: h must be >= 0");
      break;
    case ModelFamily::ConstantB:
      require(std::isfinite(b) && b > 0.0, "constant_b: b must be > 0");
      break;
    case ModelFamily::Meixner:
      require(std::isfinite(alpha) && alpha > 0.0, "meixner: alpha must be > 0");
      require(std::isfinite(eta) && eta > 0.0, "meixner: eta must be > 0");
      break;
    case ModelFamily::Coherent:
      require(std::isfinite(alpha) && alpha > 0.0, "coherent: alpha must be > 0");
      break;
  }
}

std::string ModelSpec::describe() const {
  std::ostringstream s;
  s << family_name(family);
  switch (family) {
    case ModelFamily::QubitZ: s << "(omega=" << omega << ")"; break;
    case ModelFamily::QubitTransverse: s << "(omega=" << omega << ", h=" << h << ")"; break;
    case ModelFamily::ConstantB: s << "(b=" << b << ")"; break;
    case ModelFamily::Meixner: s << "(alpha=" << alpha << ", eta=" << eta << ")"; break;
    case ModelFamily::Coherent: s << "(alpha=" << alpha << ")"; break;
  }
  return s.str();
}

double model_coefficients(const ModelSpec& spec, int n) {
  if (n < 1) throw ValidationError("model_coefficients: n must be >= 1");
  switch (spec.family) {
    case ModelFamily::QubitZ: return n == 1 ? spec.omega : 0.0;
    case ModelFamily::QubitTransverse:
      if (n == 1) return spec.omega;
      if (n == 2) return spec.h;
      return 0.0;
    case ModelFamily::ConstantB: return spec.b;
    case ModelFamily::Meixner: return spec.alpha * std::sqrt(n * (n - 1.0 + spec.eta));
    case ModelFamily::Coherent: return spec.alpha * std::sqrt(static_cast<double>(n));
  }
  return 0.0;
}

CoefficientRule coefficient_rule(const ModelSpec& spec) {
  spec.validate();
  return [spec](int n) { return model_coefficients(spec, n); };
}

TruncatedChain model_chain(const ModelSpec& spec, double horizon, double tail_tol,
                           const TruncationOptions& options) {
  spec.validate();
  if (spec.finite_chain()) {
    std::vector<double> b;
    for (int n = 1; model_coefficients(spec, n) > 0.0; ++n) b.push_back(model_coefficients(spec, n));
    TruncatedChain out;
    out.chain = LanczosChain::from_coefficients(std::move(b));
    out.levels = out.chain.dim;
    out.exact = true;
    return out;
  }
  return truncated_chain(coefficient_rule(spec), tail_tol, horizon, options);
}

QubitRealization model_hamiltonian(const ModelSpec& spec) {
  spec.validate();
  if (!spec.finite_chain())
    throw ValidationError(std::string(family_name(spec.family)) +
                          " has no finite Hamiltonian realization");
  PauliStringSum sum{1, {{0.5 * spec.omega, "Z"}}};
  if (spec.family == ModelFamily::QubitTransverse && spec.h != 0.0)
    sum.terms.push_back({0.5 * spec.h, "X"});
  return {realize_pauli_sum(sum), pauli_operator("X")};
}

double model_log_amplitude(const ModelSpec& spec, int n, double t) {
  switch (spec.family) {
    case ModelFamily::Meixner: {
      const double x = spec.alpha * t;
      const double eta = spec.eta;
      // sech^eta with log cosh x = x + log1p(exp(-2x)) - log 2 for large x.
      const double log_cosh = x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
      const double log_pochhammer = std::lgamma(eta + n) - std::lgamma(eta);
      return 0.5 * (log_pochhammer - std::lgamma(n + 1.0)) + n * std::log(std::tanh(x)) -
             eta * log_cosh;
    }
    case ModelFamily::Coherent: {
      const double x = spec.alpha * t;
      return -0.5 * x * x + n * std::log(x) - 0.5 * std::lgamma(n + 1.0);
    }
    default:
      throw ValidationError("model_log_amplitude: closed form only for meixner and coherent");
  }
}

namespace {

// Generates closed-form amplitudes until the remaining mass is below tail_tol.
// Past the mode the squared-amplitude ratio p_{n+1}/p_n decreases (coherent,
// meixner with eta >= 1) or increases towards tanh^2 (eta < 1); either way the
// tail is bounded by a geometric series in max(ratio, limit).
ModelAmplitudes series_amplitudes(const ModelSpec& spec, double t, double tail_tol, int cap) {
  ModelAmplitudes out;
  out.t = t;
  std::vector<double> values;
  if (t == 0.0) {
    values.push_back(1.0);
  } else {
    const double x = spec.alpha * t;
    const double limit = spec.family == ModelFamily::Meixner ? std::pow(std::tanh(x), 2) : 0.0;
    for (int n = 0;; ++n) {
      if (n >= cap) throw TruncationError("model amplitudes exceeded the level cap", n, 1.0);
      const double phi = std::exp(model_log_amplitude(spec, n, t));
      values.push_back(phi);
      const double ratio = std::exp(2.0 * (model_log_amplitude(spec, n + 1, t) -
                                           model_log_amplitude(spec, n, t)));
      const double r = std::max(ratio, limit);
      if (r < 1.0 && ratio < 1.0) {
        const double tail = phi * phi * r / (1.0 - r);
        if (tail < tail_tol) {
          out.tail_mass = tail;
          break;
        }
      }
    }
  }
  out.phi = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  out.magnitudes = out.phi.cwiseAbs();
  return out;
}

}  // namespace

ModelAmplitudes model_amplitudes(const ModelSpec& spec, double t, double tail_tol, int cap) {
  spec.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("model_amplitudes: t must be >= 0");
  ModelAmplitudes out;
  out.t = t;
  switch (spec.family) {
    case ModelFamily::QubitZ: {
      const double w = spec.omega * t;
      out.phi = Eigen::Vector2d(std::cos(w), std::sin(w));
      break;
    }
    case ModelFamily::QubitTransverse: {
      const double w = spec.omega, h = spec.h;
      const double big = std::sqrt(w * w + h * h);
      const double c = std::cos(big * t);
      if (h == 0.0) {
        out.phi = Eigen::Vector2d(c, std::sin(big * t));
      } else {
        out.phi = Eigen::Vector3d(c + (h * h) / (big * big) * (1.0 - c),
                                  (w / big) * std::sin(big * t),
                                  (h * w) / (big * big) * (1.0 - c));
      }
      break;
    }
    case ModelFamily::ConstantB: {
      TruncatedChain tc = truncated_chain(coefficient_rule(spec), tail_tol, t);
      const double times[] = {0.0, t};
      AmplitudeTrajectory traj = evolve_spectral(tc.chain, std::span(times, t > 0.0 ? 2 : 1));
      out.phi = traj.phi.col(traj.samples() - 1);
      out.tail_mass = tc.tail_mass;
      out.closed_form = false;
      break;
    }
    case ModelFamily::Meixner:
    case ModelFamily::Coherent:
      return series_amplitudes(spec, t, tail_tol, cap);
  }
  out.magnitudes = out.phi.cwiseAbs();
  return out;
}

PeakPrediction model_peak_prediction(const ModelSpec& spec, double t) {
  spec.validate();
  if (!(t > 0.0)) throw ValidationError("model_peak_prediction: t must be > 0");
  PeakPrediction p;
  const double x = spec.alpha * t;
  switch (spec.family) {
    case ModelFamily::Coherent:
      p.saddle = p.asymptote = x * x;
      return p;
    case ModelFamily::Meixner: {
      const double eta = spec.eta;
      p.saddle = -(eta - 1.0) / (2.0 * std::log(std::tanh(x)));
      p.asymptote = (eta - 1.0) / 4.0 * std::exp(2.0 * x);
      if (eta <= 1.0) {
        p.flagged = true;
        p.note = "eta <= 1: saddle is non-positive; the distribution decreases monotonically in n";
      }
      return p;
    }
    default:
      throw ValidationError("model_peak_prediction: only meixner and coherent have a prediction");
  }
}

}  // namespace ksphere
