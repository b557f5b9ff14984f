#pragma once

#include <vector>

#include "ksphere/dynamics.hpp"

namespace ksphere {

/// v_K(t) = |Phi'(t)| per sample.
std::vector<double> krylov_speed(const AmplitudeTrajectory& traj);

/// Integral of |Phi'| over [t0, t1] by composite Simpson quadrature on the
/// sample grid (endpoint speeds interpolated when t0, t1 fall between samples).
double arc_length(const AmplitudeTrajectory& traj, double t0, double t1);

struct CurvatureResult {
  std::vector<double> series;  // Gram form |v|^2 |a|^2 - (v.a)^2 over |v|^6, square-rooted
  double closed_form = 0.0;    // sqrt(1 + b2^2 / b1^2)
  bool defined = true;         // false when b1 = 0
};

CurvatureResult frenet_curvature(const AmplitudeTrajectory& traj,
                                 const LanczosChain& chain);

struct TorsionResult {
  std::vector<double> series;  // sqrt(det G) / (|v|^2 |a|^2 - (v.a)^2), magnitude only
  /// b2 b3 / (b1^2 sqrt(b1^2 + b2^2)), the commonly quoted closed form.
  double closed_form = 0.0;
  /// b2 b3 / (b1 sqrt(b1^2 + b2^2)), what the Gram definition evaluates to.
  /// Equals closed_form only when b1 = 1.
  double closed_form_gram = 0.0;
  bool defined = true;
  std::string note;
};

TorsionResult frenet_torsion(const AmplitudeTrajectory& traj,
                             const LanczosChain& chain);

/// |Phi'' + b1^2 Phi| per sample; zero iff the motion is a great circle.
std::vector<double> geodesic_residual(const AmplitudeTrajectory& traj,
                                      const LanczosChain& chain);

struct ReturnAmplitudeResult {
  std::vector<double> times;    // samples with 0 <= b1 t <= pi/2
  std::vector<double> margin;   // phi_0(t) - cos(b1 t)
  std::vector<double> theta;    // angle between Phi and e_0: atan2(|phi_{n>=1}|, clamp(phi_0))
  std::vector<double> theta_excess;  // theta - b1 t
  double max_clip = 0.0;        // largest |phi_0| - 1 clipped before arccos
  double min_margin = 0.0;
};

ReturnAmplitudeResult return_amplitude_check(const AmplitudeTrajectory& traj,
                                             const LanczosChain& chain);

/// |Phi''|^2, expected b1^2 (b1^2 + b2^2) at every sample.
std::vector<double> acceleration_norm_sq(const AmplitudeTrajectory& traj);

struct HallSample {
  double t = 0.0;
  double mean_generator = 0.0;    // <L>
  double delta_L_nc = 0.0;        // spread of L - L_cl
  double speed = 0.0;             // |A Phi|
  double delta_functional = 0.0;  // delta_L from the raw ratio
  double raw_inverse_sq = 0.0;    // sum over levels of <K_n|i[L,rho]|K_n>^2 / <K_n|rho|K_n>
  double closed_inverse_sq = 0.0; // 4 sum phi_n'^2
  double product = 0.0;           // delta_functional * delta_L_nc
  double classical_part_norm = 0.0;  // max_n |<K_n|{L,rho}/2|K_n>| / phi_n^2
  double raw_vs_closed_gap = 0.0;
  int skipped_levels = 0;
};

struct HallReport {
  std::vector<HallSample> samples;
  double max_product_deviation = 0.0;  // max |product - 1/2|
  double max_classical_part = 0.0;
  double max_gap = 0.0;
};

inline constexpr double kDefaultEpsOccupation = 1e-12;

/// Exact uncertainty relation in the Krylov frame, evaluated literally from
/// the Krylov-basis density matrix rho = |O(t))(O(t)| at every sample.
HallReport hall_check(const AmplitudeTrajectory& traj, const LanczosChain& chain,
                      double eps_occupation = kDefaultEpsOccupation);

struct GeometryReport {
  std::vector<double> times;
  std::vector<double> speed_series;
  double b1 = 0.0;
  double arc_length = 0.0;           // over the whole trajectory
  double arc_length_expected = 0.0;  // b1 (t_end - t_0)
  CurvatureResult curvature;
  TorsionResult torsion;
  std::vector<double> geodesic_residual_series;
  ReturnAmplitudeResult return_amplitude;
  std::vector<double> acceleration_norm_sq_series;
  double acceleration_norm_sq_expected = 0.0;
};

GeometryReport geometry_report(const AmplitudeTrajectory& traj,
                               const LanczosChain& chain);

}  // namespace ksphere
