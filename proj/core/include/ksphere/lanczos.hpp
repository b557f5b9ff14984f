#pragma once

#include <vector>

#include "ksphere/operator_space.hpp"

namespace ksphere {

struct LanczosOptions {
  /// Stop when the next candidate norm falls below term_tol * b_1.
  double term_tol = 1e-12;
  /// Cap on the Krylov dimension; 0 means d^2.
  int max_dim = 0;
};

/// Lanczos coefficients b_1..b_{D-1} and, when built from a Hamiltonian,
/// the orthonormal Krylov basis |K_0>..|K_{D-1}> with quality diagnostics.
struct LanczosChain {
  int dim = 1;
  std::vector<double> coefficients;
  std::vector<OperatorState> basis;  // empty for coefficient-only chains

  double ortho_residual = 0.0;   // max |<K_m|K_n> - delta_mn|
  double tridiag_residual = 0.0; // max ||L K_n - b_{n+1} K_{n+1} - b_n K_{n-1}||
  double max_diagonal = 0.0;     // max |<K_n|L|K_n>|, zero for (anti-)Hermitian seeds
  bool stationary = false;       // seed commutes with H

  /// Coefficient-only chain of dimension b.size() + 1.
  static LanczosChain from_coefficients(std::vector<double> b);

  /// b_n with the boundary conventions b_0 = 0 and b_n = 0 for n >= D.
  double b(int n) const noexcept {
    return (n >= 1 && n < dim) ? coefficients[static_cast<std::size_t>(n - 1)]
                               : 0.0;
  }
  double b1() const noexcept { return b(1); }
};

/// Lanczos recursion on L = [H, .] from `seed`, with two full
/// Gram-Schmidt passes against every earlier basis vector.
LanczosChain build_chain(const Liouvillian& liouvillian,
                         const OperatorState& seed,
                         const LanczosOptions& options = {});

std::vector<double> coefficient_profile(const LanczosChain& chain);

}  // namespace ksphere
