#include "ksphere/operator_space.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ksphere/error.hpp"

namespace ksphere {

namespace {

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw ValidationError(msg.str());
  }
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
        return false;
  return true;
}

}  // namespace

HermitianMatrix::HermitianMatrix(ComplexMatrix entries, double rel_tol)
    : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols())
    throw ValidationError("Hamiltonian must be a non-empty square matrix");
  if (!all_finite(entries_))
    throw ValidationError("Hamiltonian has non-finite entries");
  const double scale = entries_.cwiseAbs().maxCoeff();
  const double violation = hermiticity_violation(entries_);
  if (violation > rel_tol * scale) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "Hamiltonian is not Hermitian: max |H - H^dagger| = " << violation
        << " exceeds tolerance " << rel_tol * scale;
    throw ValidationError(msg.str());
  }
  // Symmetrize away the admitted rounding so downstream algebra sees an
  // exactly Hermitian matrix.
  entries_ = (0.5 * (entries_ + entries_.adjoint())).eval();
}

double HermitianMatrix::hermiticity_violation(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

OperatorState::OperatorState(ComplexMatrix entries)
    : entries_(std::move(entries)) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols())
    throw ValidationError("operator must be a non-empty square matrix");
  if (!all_finite(entries_))
    throw ValidationError("operator has non-finite entries");
}

OperatorState OperatorState::zero(int dim) {
  return OperatorState(ComplexMatrix::Zero(dim, dim));
}

OperatorState OperatorState::identity(int dim) {
  return OperatorState(ComplexMatrix::Identity(dim, dim));
}

double OperatorState::norm() const { return entries_.norm(); }

OperatorState OperatorState::normalized() const {
  const double n = norm();
  if (n == 0.0) throw ValidationError("cannot normalize the zero operator");
  return OperatorState(entries_ / n);
}

OperatorState OperatorState::operator+(const OperatorState& other) const {
  require_same_dim(dim(), other.dim(), "operator sum");
  return OperatorState(entries_ + other.entries_);
}

OperatorState OperatorState::operator-(const OperatorState& other) const {
  require_same_dim(dim(), other.dim(), "operator difference");
  return OperatorState(entries_ - other.entries_);
}

OperatorState OperatorState::operator*(Complex scale) const {
  return OperatorState(entries_ * scale);
}

Complex inner_product(const OperatorState& a, const OperatorState& b) {
  require_same_dim(a.dim(), b.dim(), "inner_product");
  // Tr(A^dagger B) = sum_ij conj(A_ij) B_ij
  return a.entries().conjugate().cwiseProduct(b.entries()).sum();
}

Liouvillian::Liouvillian(HermitianMatrix hamiltonian)
    : hamiltonian_(std::move(hamiltonian)) {}

OperatorState Liouvillian::apply(const OperatorState& o) const {
  require_same_dim(dim(), o.dim(), "apply_liouvillian");
  const ComplexMatrix& h = hamiltonian_.entries();
  return OperatorState(h * o.entries() - o.entries() * h);
}

double Liouvillian::norm_bound() const {
  return 2.0 * hamiltonian_.entries().norm();
}

OperatorState apply_liouvillian(const Liouvillian& liouvillian,
                                const OperatorState& o) {
  return liouvillian.apply(o);
}

HeisenbergPropagator::HeisenbergPropagator(const Liouvillian& liouvillian) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
      liouvillian.hamiltonian().entries());
  if (solver.info() != Eigen::Success)
    throw NumericalError("Hermitian eigensolver failed on the Hamiltonian");
  energies_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

OperatorState HeisenbergPropagator::evolve(const OperatorState& o,
                                           double t) const {
  require_same_dim(static_cast<int>(energies_.size()), o.dim(),
                   "heisenberg_oracle");
  if (!std::isfinite(t)) throw ValidationError("evolution time must be finite");
  const double s = static_cast<double>(kHeisenbergSign);
  // In the eigenbasis: O_ij(t) = exp(i s t (E_i - E_j)) O_ij.
  ComplexMatrix m = eigenvectors_.adjoint() * o.entries() * eigenvectors_;
  const Eigen::Index d = m.rows();
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i)
      m(i, j) *= std::polar(1.0, s * t * (energies_(i) - energies_(j)));
  return OperatorState(eigenvectors_ * m * eigenvectors_.adjoint());
}

OperatorState heisenberg_oracle(const Liouvillian& liouvillian,
                                const OperatorState& o, double t) {
  return HeisenbergPropagator(liouvillian).evolve(o, t);
}

ComplexMatrix pauli_string_matrix(std::string_view ops) {
  if (ops.empty()) throw ValidationError("empty Pauli string");
  const Complex i{0.0, 1.0};
  ComplexMatrix result = ComplexMatrix::Identity(1, 1);
  for (char c : ops) {
    ComplexMatrix p(2, 2);
    switch (c) {
      case 'I': p << 1, 0, 0, 1; break;
      case 'X': p << 0, 1, 1, 0; break;
      case 'Y': p << 0, -i, i, 0; break;
      case 'Z': p << 1, 0, 0, -1; break;
      default:
        throw ValidationError(std::string("invalid Pauli character '") + c +
                              "' in \"" + std::string(ops) + "\"");
    }
    ComplexMatrix next(result.rows() * 2, result.cols() * 2);
    for (Eigen::Index r = 0; r < result.rows(); ++r)
      for (Eigen::Index q = 0; q < result.cols(); ++q)
        next.block(2 * r, 2 * q, 2, 2) = result(r, q) * p;
    result = std::move(next);
  }
  return result;
}

HermitianMatrix realize_pauli_sum(const PauliStringSum& sum, int dim_max) {
  if (sum.num_qubits <= 0)
    throw ValidationError("Pauli sum needs a positive number of qubits");
  if (sum.num_qubits > 30 || (1 << sum.num_qubits) > dim_max) {
    std::ostringstream msg;
    msg << "Pauli sum on " << sum.num_qubits
        << " qubits exceeds the dimension limit dim_max = " << dim_max;
    throw ValidationError(msg.str());
  }
  const int d = 1 << sum.num_qubits;
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  for (const auto& term : sum.terms) {
    if (static_cast<int>(term.ops.size()) != sum.num_qubits) {
      std::ostringstream msg;
      msg << "Pauli string \"" << term.ops << "\" has length "
          << term.ops.size() << ", expected " << sum.num_qubits;
      throw ValidationError(msg.str());
    }
    if (!std::isfinite(term.coefficient))
      throw ValidationError("non-finite Pauli coefficient");
    h += term.coefficient * pauli_string_matrix(term.ops);
  }
  return HermitianMatrix(std::move(h));
}

OperatorState pauli_operator(std::string_view ops) {
  return OperatorState(pauli_string_matrix(ops));
}

}  // namespace ksphere
