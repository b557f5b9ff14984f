#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "ksphere/dynamics.hpp"
#include "ksphere/operator_space.hpp"

namespace ksphere {

enum class ModelFamily { QubitZ, QubitTransverse, ConstantB, Meixner, Coherent };

std::string_view family_name(ModelFamily family);
ModelFamily parse_family(std::string_view name);

/// Exactly solvable chain families. Unused parameters are ignored.
struct ModelSpec {
  ModelFamily family = ModelFamily::QubitZ;
  double omega = 1.0;  // qubit_z, qubit_transverse
  double h = 0.0;      // qubit_transverse
  double b = 1.0;      // constant_b
  double alpha = 1.0;  // meixner, coherent
  double eta = 1.0;    // meixner

  static ModelSpec qubit_z(double omega) { return {ModelFamily::QubitZ, omega}; }
  static ModelSpec qubit_transverse(double omega, double h) {
    return {ModelFamily::QubitTransverse, omega, h};
  }
  static ModelSpec constant_b(double b) {
    ModelSpec s;
    s.family = ModelFamily::ConstantB;
    s.b = b;
    return s;
  }
  static ModelSpec meixner(double alpha, double eta) {
    ModelSpec s;
    s.family = ModelFamily::Meixner;
    s.alpha = alpha;
    s.eta = eta;
    return s;
  }
  static ModelSpec coherent(double alpha) {
    ModelSpec s;
    s.family = ModelFamily::Coherent;
    s.alpha = alpha;
    return s;
  }

  /// Throws ValidationError on non-positive parameters.
  void validate() const;
  bool finite_chain() const {
    return family == ModelFamily::QubitZ || family == ModelFamily::QubitTransverse;
  }
  std::string describe() const;
};

/// b_n for n >= 1; qubit families return 0 past their last level.
double model_coefficients(const ModelSpec& spec, int n);
CoefficientRule coefficient_rule(const ModelSpec& spec);

/// Exact chain for the qubit families; a doubling-checked truncation valid on
/// [0, horizon] for the semi-infinite ones.
TruncatedChain model_chain(const ModelSpec& spec, double horizon,
                           double tail_tol = 1e-12,
                           const TruncationOptions& options = {});

struct QubitRealization {
  HermitianMatrix hamiltonian;
  OperatorState seed;  // sigma_x
};

/// H = (omega/2) sigma_z [+ (h/2) sigma_x] with seed sigma_x.
QubitRealization model_hamiltonian(const ModelSpec& spec);

struct ModelAmplitudes {
  double t = 0.0;
  /// Real amplitudes in the convention O(t) = sum_n i^n phi_n K_n. For the
  /// meixner and coherent families the explicit i^n of their printed closed
  /// forms is stripped, leaving non-negative values.
  Eigen::VectorXd phi;
  Eigen::VectorXd magnitudes;  // |phi_n|
  double tail_mass = 0.0;      // estimated weight beyond the returned levels
  bool closed_form = true;     // false for constant_b (spectral evolution)
};

ModelAmplitudes model_amplitudes(const ModelSpec& spec, double t,
                                 double tail_tol = 1e-14, int cap = 2'000'000);

/// log phi_n for the meixner and coherent closed forms, n >= 0, t > 0.
double model_log_amplitude(const ModelSpec& spec, int n, double t);

struct PeakPrediction {
  double saddle = 0.0;     // finite-t prediction
  double asymptote = 0.0;  // large-t form
  bool flagged = false;
  std::string note;
};

PeakPrediction model_peak_prediction(const ModelSpec& spec, double t);

}  // namespace ksphere
