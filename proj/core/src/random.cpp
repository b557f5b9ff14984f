#include "ksphere/random.hpp"

#include <vector>

namespace ksphere {

namespace {

ComplexMatrix gaussian_matrix(int dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix m(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

}  // namespace

HermitianMatrix random_hermitian(int dim, Rng& rng) {
  const ComplexMatrix m = gaussian_matrix(dim, rng);
  return HermitianMatrix(0.5 * (m + m.adjoint()));
}

OperatorState random_traceless_hermitian(int dim, Rng& rng) {
  ComplexMatrix m = random_hermitian(dim, rng).entries();
  const Complex trace = m.trace() / static_cast<double>(dim);
  m.diagonal().array() -= trace;
  return OperatorState(std::move(m));
}

std::vector<double> random_coefficients(int count, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> b(static_cast<std::size_t>(count));
  for (double& x : b) x = u(rng);
  return b;
}

}  // namespace ksphere
