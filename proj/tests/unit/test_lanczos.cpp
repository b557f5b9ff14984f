#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "ksphere/dynamics.hpp"
#include "ksphere/error.hpp"
#include "ksphere/lanczos.hpp"
#include "ksphere/random.hpp"

using namespace ksphere;

namespace {

Liouvillian qubit(double omega, double h) {
  PauliStringSum sum{1, {{0.5 * omega, "Z"}}};
  if (h != 0.0) sum.terms.push_back({0.5 * h, "X"});
  return Liouvillian(realize_pauli_sum(sum));
}

}  // namespace

TEST_SUITE("lanczos") {

TEST_CASE("two-level chain") {
  const LanczosChain c = build_chain(qubit(1.0, 0.0), pauli_operator("X"));
  REQUIRE(c.dim == 2);
  CHECK(std::abs(c.coefficients[0] - 1.0) < 1e-14);
  CHECK_FALSE(c.stationary);
  // K_0 ~ sigma_x, K_1 ~ sigma_y up to a phase.
  const OperatorState x = pauli_operator("X").normalized();
  const OperatorState y = pauli_operator("Y").normalized();
  CHECK(std::abs(std::abs(inner_product(x, c.basis[0])) - 1.0) < 1e-14);
  CHECK(std::abs(std::abs(inner_product(y, c.basis[1])) - 1.0) < 1e-14);
  CHECK(coefficient_profile(c).size() == 1);
}

TEST_CASE("transverse qubit closes after three levels") {
  for (auto [w, h] : {std::pair{1.0, 1.0}, {2.0, 0.5}, {0.3, 1.7}}) {
    const LanczosChain c = build_chain(qubit(w, h), pauli_operator("X"));
    REQUIRE(c.dim == 3);
    CHECK(std::abs(c.b(1) - w) < 1e-12);
    CHECK(std::abs(c.b(2) - h) < 1e-12);
    CHECK(c.b(3) == 0.0);
    CHECK(c.b(0) == 0.0);
  }
}

TEST_CASE("stationary seed") {
  const Liouvillian l = qubit(1.0, 1.0);
  const LanczosChain c = build_chain(l, OperatorState(l.hamiltonian().entries()));
  CHECK(c.dim == 1);
  CHECK(c.stationary);
  CHECK(c.coefficients.empty());
  CHECK(coefficient_profile(c).empty());
  CHECK(c.basis.size() == 1);
}

TEST_CASE("rejected inputs") {
  const Liouvillian l = qubit(1.0, 0.0);
  CHECK_THROWS_AS(build_chain(l, OperatorState::zero(2)), ValidationError);
  CHECK_THROWS_AS(build_chain(l, pauli_operator("X"), {0.0, 0}), ValidationError);
  CHECK_THROWS_AS(build_chain(l, OperatorState::identity(3)), ValidationError);
  CHECK_THROWS_AS(LanczosChain::from_coefficients({1.0, -0.5}), ValidationError);
}

TEST_CASE("random chains: orthonormality, closure and the dimension cap") {
  Rng rng(1234);
  for (int trial = 0; trial < 24; ++trial) {
    const int d = 2 + trial % 6;
    const Liouvillian l(random_hermitian(d, rng));
    const LanczosChain c = build_chain(l, random_traceless_hermitian(d, rng));
    CHECK(c.dim <= d * d - d + 1);
    CHECK(c.ortho_residual <= 1e-10);
    const double bmax = *std::max_element(c.coefficients.begin(), c.coefficients.end());
    CHECK(c.tridiag_residual <= 1e-8 * bmax);
    for (double b : c.coefficients) CHECK(b >= 0.0);

    // Independent recomputation of both residuals from the stored basis.
    double ortho = 0.0, closure = 0.0;
    for (int m = 0; m < c.dim; ++m) {
      for (int n = 0; n < c.dim; ++n)
        ortho = std::max(ortho, std::abs(inner_product(c.basis[m], c.basis[n]) - (m == n ? 1.0 : 0.0)));
      OperatorState r = l.apply(c.basis[m]);
      if (m + 1 < c.dim) r = r - c.basis[m + 1] * c.b(m + 1);
      if (m > 0) r = r - c.basis[m - 1] * c.b(m);
      closure = std::max(closure, r.norm());
    }
    CHECK(ortho <= 1e-10);
    CHECK(closure <= 1e-8 * bmax);
  }
}

TEST_CASE("d = 4 example stays under 13 levels") {
  Rng rng(7);
  const Liouvillian l(random_hermitian(4, rng));
  const LanczosChain c = build_chain(l, random_traceless_hermitian(4, rng));
  CHECK(c.dim <= 13);
  CHECK(c.tridiag_residual < 1e-8);
}

TEST_CASE("b1 squared is the second Liouvillian moment of the seed") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const int d = 2 + trial % 5;
    const Liouvillian l(random_hermitian(d, rng));
    const OperatorState seed = random_traceless_hermitian(d, rng).normalized();
    const LanczosChain c = build_chain(l, seed);
    const OperatorState lo = l.apply(seed);
    CHECK(std::abs(c.b1() * c.b1() - inner_product(lo, lo).real()) < 1e-10);
  }
}

TEST_CASE("tridiagonal moments match the Liouvillian moments") {
  // (O|L^{2k}|O) = ||L^k O||^2 against (T^{2k})_{00} of the Lanczos matrix.
  Rng rng(17);
  for (int d : {2, 3, 4}) {
    const Liouvillian l(random_hermitian(d, rng));
    const OperatorState seed = random_traceless_hermitian(d, rng).normalized();
    const LanczosChain c = build_chain(l, seed);
    const Eigen::MatrixXd t = lanczos_matrix(c);
    OperatorState power = seed;
    Eigen::MatrixXd tpow = Eigen::MatrixXd::Identity(c.dim, c.dim);
    for (int k = 1; k <= 3; ++k) {
      power = l.apply(power);
      tpow = tpow * t;
      const double direct = power.norm() * power.norm();
      const double tri = (tpow.transpose() * tpow)(0, 0);
      CHECK(std::abs(direct - tri) <= 1e-9 * std::max(1.0, direct));
    }
  }
}

TEST_CASE("Lanczos spectrum is a subset of the energy differences") {
  Rng rng(23);
  const HermitianMatrix h = random_hermitian(4, rng);
  const LanczosChain c = build_chain(Liouvillian(h), random_traceless_hermitian(4, rng));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eh(h.entries());
  const Eigen::VectorXd e = eh.eigenvalues();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> et(lanczos_matrix(c));
  for (Eigen::Index k = 0; k < et.eigenvalues().size(); ++k) {
    double best = 1e300;
    for (Eigen::Index i = 0; i < e.size(); ++i)
      for (Eigen::Index j = 0; j < e.size(); ++j)
        best = std::min(best, std::abs(et.eigenvalues()(k) - (e(i) - e(j))));
    CHECK(best < 1e-9);
  }
}

TEST_CASE("rescaling H rescales every coefficient") {
  Rng rng(31);
  const HermitianMatrix h = random_hermitian(3, rng);
  const OperatorState seed = random_traceless_hermitian(3, rng);
  const LanczosChain c1 = build_chain(Liouvillian(h), seed);
  for (double scale : {0.5, 3.0}) {
    const LanczosChain c2 = build_chain(Liouvillian(HermitianMatrix(scale * h.entries())), seed);
    REQUIRE(c2.dim == c1.dim);
    for (int n = 1; n < c1.dim; ++n) CHECK(std::abs(c2.b(n) - scale * c1.b(n)) < 1e-10 * scale);
  }
}

TEST_CASE("max_dim caps the recursion") {
  Rng rng(2);
  const Liouvillian l(random_hermitian(5, rng));
  const LanczosChain c = build_chain(l, random_traceless_hermitian(5, rng), {1e-12, 4});
  CHECK(c.dim == 4);
  CHECK(c.coefficients.size() == 3);
}

}  // TEST_SUITE
