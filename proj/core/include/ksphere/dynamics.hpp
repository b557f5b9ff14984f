#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ksphere/lanczos.hpp"

namespace ksphere {

/// Real tridiagonal generator of Phi' = A Phi. For a Lanczos chain
/// A(n, n-1) = b_n and A(n, n+1) = -b_{n+1}, so A is skew-symmetric.
class HoppingMatrix {
 public:
  explicit HoppingMatrix(std::vector<double> b);

  int dim() const noexcept { return static_cast<int>(lower_.size()) + 1; }

  /// A(n, n-1), n = 1..D-1.
  double lower(int n) const { return lower_[static_cast<std::size_t>(n - 1)]; }
  /// A(n-1, n), n = 1..D-1.
  double upper(int n) const { return upper_[static_cast<std::size_t>(n - 1)]; }

  void apply(const double* in, double* out) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd dense() const;

  bool is_skew() const;

  /// Copy with the sign of A(n, n-1) flipped; breaks skew-symmetry.
  /// Used by the verification harness self-test.
  HoppingMatrix with_flipped_lower(int n) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

HoppingMatrix hopping_matrix(const LanczosChain& chain);

/// Symmetric Lanczos matrix L with L(n, n-1) = L(n-1, n) = b_n.
Eigen::MatrixXd lanczos_matrix(const LanczosChain& chain);

/// max |A + i S^{-1} L S| with S = diag(1, -i, (-i)^2, ...). Zero to rounding;
/// this is the form of the similarity consistent with kHeisenbergSign = +1.
double similarity_residual(const LanczosChain& chain);

struct AmplitudeTrajectory {
  std::vector<double> times;
  // D x T, one column per sample.
  Eigen::MatrixXd phi;
  Eigen::MatrixXd dphi;
  Eigen::MatrixXd d2phi;
  Eigen::MatrixXd d3phi;
  std::vector<double> norm_drift;  // |sum phi_n^2 - 1|
  std::string method;
  double max_imag_residual = 0.0;  // spectral method only

  int dim() const noexcept { return static_cast<int>(phi.rows()); }
  int samples() const noexcept { return static_cast<int>(phi.cols()); }
  double max_norm_drift() const;
};

/// Fills dphi, d2phi, d3phi = A Phi, A^2 Phi, A^3 Phi and norm_drift.
void fill_derivatives(AmplitudeTrajectory& traj, const HoppingMatrix& a);

inline constexpr double kDefaultOdeRtol = 1e-10;
inline constexpr double kDefaultOdeAtol = 1e-12;

/// Adaptive Dormand-Prince 5(4) integration of Phi' = A Phi from e_0,
/// with dense output at the requested times (increasing, starting at 0).
AmplitudeTrajectory evolve_ode(const LanczosChain& chain,
                               std::span<const double> times,
                               double rtol = kDefaultOdeRtol,
                               double atol = kDefaultOdeAtol);

AmplitudeTrajectory evolve_ode(const HoppingMatrix& a,
                               std::span<const double> times,
                               double rtol = kDefaultOdeRtol,
                               double atol = kDefaultOdeAtol);

/// phi_n(t) = i^{-n} (exp(i L t))_{n0} from the eigendecomposition of the
/// symmetric tridiagonal L. Throws InvariantViolation if any discarded
/// imaginary part exceeds 1e-10.
AmplitudeTrajectory evolve_spectral(const LanczosChain& chain,
                                    std::span<const double> times);

/// Coefficient rule n -> b_n for n >= 1. A zero ends the chain.
using CoefficientRule = std::function<double(int)>;

struct TruncationOptions {
  int cap = 20000;            // hard limit on accepted levels
  int initial_levels = 16;
  int horizon_samples = 65;   // uniform samples on [0, horizon]
  double buffer_fraction = 0.1;
  int spectral_limit = 4096;  // larger chains are checked with a tight ODE run
};

struct TruncatedChain {
  LanczosChain chain;
  int levels = 1;
  double tail_mass = 0.0;     // max over the horizon of the buffer mass
  double doubling_gap = 0.0;  // max |Phi_N - Phi_2N| on the common support
  bool exact = false;         // the rule itself terminated the chain
};

/// Finite truncation of a semi-infinite chain, valid on [0, horizon]: the
/// buffer (last 10% of levels) carries mass below tail_tol and the doubled
/// chain agrees on the common support within 10 * tail_tol.
TruncatedChain truncated_chain(const CoefficientRule& rule, double tail_tol,
                               double horizon,
                               const TruncationOptions& options = {});

std::vector<double> uniform_grid(double t_max, int samples);

}  // namespace ksphere
