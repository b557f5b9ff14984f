#include "ksphere/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ksphere/error.hpp"

namespace ksphere {

LanczosChain LanczosChain::from_coefficients(std::vector<double> b) {
  for (double v : b)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ValidationError("Lanczos coefficients must be finite and >= 0");
  LanczosChain chain;
  chain.dim = static_cast<int>(b.size()) + 1;
  chain.coefficients = std::move(b);
  chain.stationary = chain.coefficients.empty();
  return chain;
}

namespace {

// Krylov vectors are kept as flattened d^2 columns so the reorthogonalization
// passes are plain matrix-vector products.
using Column = Eigen::VectorXcd;

Column flatten(const OperatorState& o) {
  return Eigen::Map<const Column>(o.entries().data(), o.entries().size());
}

OperatorState unflatten(const Column& v, int d) {
  return OperatorState(Eigen::Map<const ComplexMatrix>(v.data(), d, d));
}

}  // namespace

LanczosChain build_chain(const Liouvillian& liouvillian,
                         const OperatorState& seed,
                         const LanczosOptions& options) {
  const int d = liouvillian.dim();
  if (seed.dim() != d) {
    std::ostringstream msg;
    msg << "build_chain: seed dimension " << seed.dim()
        << " does not match Hamiltonian dimension " << d;
    throw ValidationError(msg.str());
  }
  if (!(options.term_tol > 0.0))
    throw ValidationError("build_chain: term_tol must be positive");
  if (seed.norm() == 0.0) throw ValidationError("build_chain: zero seed");

  const int space_dim = d * d;
  const int max_dim =
      options.max_dim > 0 ? std::min(options.max_dim, space_dim) : space_dim;

  // Run the recursion in the energy eigenbasis, where L is the diagonal map
  // O_ij -> (E_i - E_j) O_ij. The i = j frequencies are exact zeros, so
  // rounding cannot leak weight into kernel directions outside the Krylov
  // space (with a dense commutator such leaks surface as a spurious level
  // with b ~ 1e-11).
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(liouvillian.hamiltonian().entries());
  if (eig.info() != Eigen::Success)
    throw NumericalError("build_chain: Hermitian eigensolver failed on the Hamiltonian");
  const ComplexMatrix& v = eig.eigenvectors();
  Eigen::VectorXd freq(space_dim);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i)
      freq(i + j * d) = i == j ? 0.0 : eig.eigenvalues()(i) - eig.eigenvalues()(j);

  Eigen::MatrixXcd q(space_dim, max_dim);
  std::vector<double> b;
  std::vector<double> diagonal;

  {
    const ComplexMatrix rotated = v.adjoint() * seed.normalized().entries() * v;
    q.col(0) = Eigen::Map<const Column>(rotated.data(), space_dim);
    q.col(0).normalize();
  }
  const double stationary_threshold =
      options.term_tol * std::max(liouvillian.norm_bound(), 1e-300);

  int n_basis = 1;
  while (true) {
    const int n = n_basis - 1;
    Column w = freq.cwiseProduct(q.col(n));
    diagonal.push_back(std::abs(q.col(n).dot(w)));
    // Two classical Gram-Schmidt passes against the whole basis.
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXcd overlaps = q.leftCols(n_basis).adjoint() * w;
      w.noalias() -= q.leftCols(n_basis) * overlaps;
    }
    const double beta = w.norm();
    const double threshold =
        b.empty() ? stationary_threshold : options.term_tol * b.front();
    if (beta < threshold || n_basis >= max_dim) break;
    b.push_back(beta);
    q.col(n_basis) = w / beta;
    ++n_basis;
  }

  // Back to the computational basis: K_n = V Q_n V^dagger.
  for (int k = 0; k < n_basis; ++k) {
    const Eigen::Map<const ComplexMatrix> qk(q.col(k).data(), d, d);
    const ComplexMatrix back = v * qk * v.adjoint();
    q.col(k) = Eigen::Map<const Column>(back.data(), space_dim);
  }

  LanczosChain chain;
  chain.dim = n_basis;
  chain.coefficients = std::move(b);
  chain.stationary = chain.coefficients.empty();
  chain.max_diagonal =
      diagonal.empty() ? 0.0 : *std::max_element(diagonal.begin(), diagonal.end());

  const double bmax =
      chain.coefficients.empty()
          ? 0.0
          : *std::max_element(chain.coefficients.begin(), chain.coefficients.end());
  if (chain.max_diagonal > 1e-8 * std::max(bmax, liouvillian.norm_bound())) {
    std::ostringstream msg;
    msg << "build_chain: seed produces nonzero diagonal Lanczos coefficients "
           "(max |<K_n|L|K_n>| = "
        << chain.max_diagonal
        << "); the chain is not of the off-diagonal form, use a Hermitian or "
           "anti-Hermitian seed";
    throw ValidationError(msg.str());
  }

  const auto basis = q.leftCols(n_basis);
  chain.ortho_residual =
      (basis.adjoint() * basis -
       Eigen::MatrixXcd::Identity(n_basis, n_basis))
          .cwiseAbs()
          .maxCoeff();

  chain.basis.reserve(static_cast<std::size_t>(n_basis));
  for (int k = 0; k < n_basis; ++k) chain.basis.push_back(unflatten(q.col(k), d));

  double residual = 0.0;
  for (int k = 0; k < n_basis; ++k) {
    Column r = flatten(liouvillian.apply(chain.basis[static_cast<std::size_t>(k)]));
    if (k + 1 < n_basis) r -= chain.b(k + 1) * q.col(k + 1);
    if (k >= 1) r -= chain.b(k) * q.col(k - 1);
    residual = std::max(residual, r.norm());
  }
  chain.tridiag_residual = residual;
  return chain;
}

std::vector<double> coefficient_profile(const LanczosChain& chain) {
  return chain.coefficients;
}

}  // namespace ksphere
