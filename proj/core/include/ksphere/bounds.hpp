#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ksphere/dynamics.hpp"

namespace ksphere {

/// v_op = max_n (b_n + b_{n+1}) with b_0 = b_D = 0; row-sum bound on ||L||.
double operator_norm_velocity(const LanczosChain& chain);

/// log of the tail envelope (v t)^n / n! * e^{v t}, evaluated with lgamma.
double log_tail_envelope(int n, double v_op, double t);

/// Stirling form -n log(n / (v t)) + n + v t of the same envelope.
double log_tail_envelope_stirling(int n, double v_op, double t);

/// Root of c (log c - 1) = 1: the envelope's Stirling form drops below one
/// once n > c * v t.
double stirling_onset_constant();

struct TailEnvelopeReport {
  double v_op = 0.0;
  double min_margin = 0.0;  // min over (n, t > 0) of log envelope - log|phi_n|
  int argmin_level = 0;
  double argmin_time = 0.0;
  std::vector<double> times;            // t > 0 columns that were evaluated
  std::vector<double> envelope_onset;   // per t: first n with Stirling exponent < 0, over v t
  std::vector<double> observed_onset;   // per t: last n with |phi_n| >= 1e-8, over v t
  Eigen::MatrixXd margin;               // D x times.size(); filled only when requested
};

TailEnvelopeReport tail_envelope_check(const AmplitudeTrajectory& traj,
                                       const LanczosChain& chain,
                                       bool keep_grid = false);

/// Same check against an explicit amplitude vector at one time.
double tail_margin(const Eigen::VectorXd& phi, double v_op, double t);

struct GeometricFront {
  std::int64_t front = 0;
  bool capped = false;   // a zero coefficient or the iteration cap stopped the sum
  std::string warning;
};

/// Largest n with sum_{m=1}^{n} 1/b_m <= t by direct partial summation.
GeometricFront geometric_front(const LanczosChain& chain, double t);
GeometricFront geometric_front(const CoefficientRule& rule, double t,
                               std::int64_t max_levels = 100'000'000);

/// argmax_n phi_n^2 per sample; ties go to the smaller n.
std::vector<int> peak_front(const AmplitudeTrajectory& traj);

struct ComplexityResult {
  std::vector<double> complexity;  // C = sum n phi_n^2
  std::vector<double> spread;      // Delta C
  std::vector<double> rate;        // dC/dt = 2 sum n phi_n phi_n'
};

ComplexityResult krylov_complexity(const AmplitudeTrajectory& traj);

struct GrowthRateResult {
  std::vector<double> margin;  // 2 b1 Delta C - |dC/dt|
  std::vector<double> scale;   // b1 (1 + Delta C), the tolerance scale
  double min_margin = 0.0;
  double min_scaled_margin = 0.0;  // min margin / scale
  double max_abs_scaled_margin = 0.0;
};

GrowthRateResult growth_rate_bound_check(const AmplitudeTrajectory& traj,
                                         const LanczosChain& chain);

struct FrontRatioResult {
  std::vector<double> ratio;        // C / front_geometric
  std::vector<std::int64_t> front;  // front_geometric per sample
  std::vector<bool> flagged;        // front = 0 with C > 0
  double max_ratio = 0.0;
};

FrontRatioResult complexity_front_ratio(const AmplitudeTrajectory& traj,
                                        const LanczosChain& chain);

struct MomentSeries {
  int order = 0;
  std::vector<double> values;       // Phi^T A^k Phi
  double liouvillian_moment = 0.0;  // (-1)^{k/2} Phi^T A^k Phi at t_0, even k
  double drift = 0.0;               // even: max |v - v_0| / max(|v_0|, tiny); odd: max |v|
};

std::vector<MomentSeries> moment_conservation(const AmplitudeTrajectory& traj,
                                              const LanczosChain& chain,
                                              const std::vector<int>& orders = {1, 2, 3, 4, 5, 6});

struct InvariantSpec {
  enum class Kind { Polynomial, Canonical, Diagonal };
  Kind kind = Kind::Polynomial;
  /// Polynomial: I = sum_k coefficients[k] (A^2)^k.
  /// Canonical: one coefficient per 2x2 rotation block in ascending rate;
  ///            an extra trailing entry applies to the null space (else 0).
  /// Diagonal: I = diag(coefficients); not conserved in general.
  std::vector<double> coefficients;

  static InvariantSpec polynomial(std::vector<double> c) { return {Kind::Polynomial, std::move(c)}; }
  static InvariantSpec canonical(std::vector<double> c) { return {Kind::Canonical, std::move(c)}; }
  static InvariantSpec diagonal(std::vector<double> c) { return {Kind::Diagonal, std::move(c)}; }
  static InvariantSpec complexity(int dim);
};

struct QuadraticInvariant {
  Eigen::MatrixXd matrix;
  double commutator_norm = 0.0;   // ||A I - I A||_F
  double relative_commutator = 0.0;  // commutator_norm / (||A|| ||I||)
  std::vector<double> value_series;
  double drift = 0.0;             // max |v - v_0| / max(|v_0|, tiny)
  int rotation_blocks = 0;
  bool merged_blocks = false;     // near-degenerate rates were merged
  std::string note;

  bool commutes(double tol = 1e-10) const { return relative_commutator <= tol; }
};

QuadraticInvariant build_commuting_invariant(const LanczosChain& chain,
                                             const InvariantSpec& spec);

/// Fills value_series and drift.
void evaluate_invariant(QuadraticInvariant& invariant,
                        const AmplitudeTrajectory& traj);

struct BoundsReport {
  std::vector<double> times;
  double v_op = 0.0;
  double tail_margin_min = 0.0;
  std::vector<std::int64_t> front_geometric;
  std::vector<int> front_peak;
  ComplexityResult complexity;
  double growth_rate_margin = 0.0;  // min over t of 2 b1 Delta C - |dC/dt|
  double growth_rate_scaled_margin = 0.0;
  std::vector<double> complexity_ratio_series;
  TailEnvelopeReport tail;
};

BoundsReport bounds_report(const AmplitudeTrajectory& traj,
                           const LanczosChain& chain, bool keep_grid = false);

}  // namespace ksphere
