#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ksphere {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Largest Hilbert-space dimension accepted anywhere in the library.
inline constexpr int kDefaultDimMax = 64;

/// Relative Hermiticity tolerance: max|H - H^dagger| <= tol * max|H|.
inline constexpr double kDefaultHermiticityTol = 1e-12;

/// Time-sign convention of Heisenberg evolution:
///   O(t) = exp(+i s H t) O exp(-i s H t),   s = kHeisenbergSign,
/// which solves dO/dt = i s [H, O]. With s = +1 the Krylov projection
/// (K_n|O(t)) = i^n phi_n(t) satisfies phi_n' = b_n phi_{n-1} - b_{n+1} phi_{n+1}.
/// Pinned by the finite-difference test in test_operator_space.cpp.
inline constexpr int kHeisenbergSign = +1;

/// Dense Hermitian Hamiltonian; validated once at construction.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(ComplexMatrix entries,
                           double rel_tol = kDefaultHermiticityTol);

  int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  const ComplexMatrix& entries() const noexcept { return entries_; }

  /// max_ij |M_ij - conj(M_ji)|.
  static double hermiticity_violation(const ComplexMatrix& m);

 private:
  ComplexMatrix entries_;
};

/// An operator O viewed as a vector |O) of the trace-inner-product space.
class OperatorState {
 public:
  OperatorState() = default;
  explicit OperatorState(ComplexMatrix entries);

  static OperatorState zero(int dim);
  static OperatorState identity(int dim);

  int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  const ComplexMatrix& entries() const noexcept { return entries_; }

  /// sqrt(Tr(O^dagger O)).
  double norm() const;
  /// Throws ValidationError for the zero operator.
  OperatorState normalized() const;

  OperatorState operator+(const OperatorState& other) const;
  OperatorState operator-(const OperatorState& other) const;
  OperatorState operator*(Complex scale) const;

 private:
  ComplexMatrix entries_;
};

/// (a|b) = Tr(a^dagger b); unnormalized trace.
Complex inner_product(const OperatorState& a, const OperatorState& b);

/// Superoperator L O = [H, O].
class Liouvillian {
 public:
  explicit Liouvillian(HermitianMatrix hamiltonian);

  const HermitianMatrix& hamiltonian() const noexcept { return hamiltonian_; }
  int dim() const noexcept { return hamiltonian_.dim(); }

  OperatorState apply(const OperatorState& o) const;

  /// Upper bound on the superoperator norm: 2 * ||H||_F.
  double norm_bound() const;

 private:
  HermitianMatrix hamiltonian_;
};

OperatorState apply_liouvillian(const Liouvillian& liouvillian,
                                const OperatorState& o);

/// Exact Heisenberg evolution from a single eigendecomposition of H.
/// Reuse one propagator when evolving at many times.
class HeisenbergPropagator {
 public:
  explicit HeisenbergPropagator(const Liouvillian& liouvillian);

  OperatorState evolve(const OperatorState& o, double t) const;

 private:
  Eigen::VectorXd energies_;
  ComplexMatrix eigenvectors_;
};

OperatorState heisenberg_oracle(const Liouvillian& liouvillian,
                                const OperatorState& o, double t);

struct PauliTerm {
  double coefficient = 0.0;
  std::string ops;  // over {I, X, Y, Z}; leftmost character is the most significant qubit
};

struct PauliStringSum {
  int num_qubits = 0;
  std::vector<PauliTerm> terms;
};

/// Dense Kronecker realization of a single Pauli string.
ComplexMatrix pauli_string_matrix(std::string_view ops);

HermitianMatrix realize_pauli_sum(const PauliStringSum& sum,
                                  int dim_max = kDefaultDimMax);

/// Unit-coefficient Pauli string as an operator state (seed helper).
OperatorState pauli_operator(std::string_view ops);

}  // namespace ksphere
