#include <doctest.h>

#include <cmath>

#include "ksphere/error.hpp"
#include "ksphere/lanczos.hpp"
#include "ksphere/models.hpp"

using namespace ksphere;

namespace {

double max_gap(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index n = std::max(a.size(), b.size());
  double gap = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = i < a.size() ? a(i) : 0.0;
    const double y = i < b.size() ? b(i) : 0.0;
    gap = std::max(gap, std::abs(x - y));
  }
  return gap;
}

// Meixner amplitudes by the ratio phi_{n+1} / phi_n = sqrt((eta + n) / (n + 1)) tanh.
Eigen::VectorXd meixner_oracle(double alpha, double eta, double t, int levels) {
  Eigen::VectorXd v(levels);
  v(0) = std::pow(1.0 / std::cosh(alpha * t), eta);
  for (int n = 0; n + 1 < levels; ++n)
    v(n + 1) = v(n) * std::sqrt((eta + n) / (n + 1.0)) * std::tanh(alpha * t);
  return v;
}

Eigen::VectorXd coherent_oracle(double alpha, double t, int levels) {
  Eigen::VectorXd v(levels);
  const double x = alpha * t;
  v(0) = std::exp(-0.5 * x * x);
  for (int n = 0; n + 1 < levels; ++n) v(n + 1) = v(n) * x / std::sqrt(n + 1.0);
  return v;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("coefficient examples") {
  CHECK(model_coefficients(ModelSpec::qubit_z(2.0), 1) == 2.0);
  CHECK(model_coefficients(ModelSpec::qubit_z(2.0), 2) == 0.0);
  CHECK(model_coefficients(ModelSpec::qubit_transverse(1.0, 0.5), 2) == 0.5);
  CHECK(model_coefficients(ModelSpec::constant_b(0.7), 9) == 0.7);
  CHECK(model_coefficients(ModelSpec::meixner(1.0, 2.0), 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(model_coefficients(ModelSpec::meixner(1.0, 2.0), 2) == doctest::Approx(std::sqrt(6.0)));
  CHECK(model_coefficients(ModelSpec::coherent(2.0), 4) == doctest::Approx(4.0));
  CHECK_THROWS_AS(model_coefficients(ModelSpec::coherent(1.0), 0), ValidationError);
}

TEST_CASE("family names and validation") {
  for (auto f : {ModelFamily::QubitZ, ModelFamily::QubitTransverse, ModelFamily::ConstantB,
                 ModelFamily::Meixner, ModelFamily::Coherent})
    CHECK(parse_family(family_name(f)) == f);
  CHECK_THROWS_AS(parse_family("sho"), ValidationError);
  CHECK_THROWS_AS(ModelSpec::meixner(-1.0, 2.0).validate(), ValidationError);
  CHECK_THROWS_AS(ModelSpec::qubit_z(0.0).validate(), ValidationError);
  CHECK_THROWS_AS(ModelSpec::coherent(std::nan("")).validate(), ValidationError);
  CHECK_NOTHROW(ModelSpec::qubit_transverse(1.0, 0.0).validate());
  CHECK(ModelSpec::meixner(1.0, 2.0).describe() == "meixner(alpha=1, eta=2)");
  CHECK_THROWS_AS(model_hamiltonian(ModelSpec::coherent(1.0)), ValidationError);
  CHECK_THROWS_AS(model_log_amplitude(ModelSpec::qubit_z(1.0), 1, 1.0), ValidationError);
}

TEST_CASE("qubit closed forms against chain evolution") {
  for (const ModelSpec& spec : {ModelSpec::qubit_z(1.3), ModelSpec::qubit_transverse(1.0, 1.0),
                                ModelSpec::qubit_transverse(0.3, 1.7)}) {
    const TruncatedChain tc = model_chain(spec, 10.0);
    CHECK(tc.exact);
    const std::vector<double> grid = uniform_grid(10.0, 41);
    const AmplitudeTrajectory traj = evolve_spectral(tc.chain, grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
      CHECK(max_gap(traj.phi.col(static_cast<Eigen::Index>(k)), model_amplitudes(spec, grid[k]).phi) < 1e-12);
  }
}

TEST_CASE("qubit realization reproduces the chain") {
  const ModelSpec spec = ModelSpec::qubit_transverse(2.0, 0.5);
  const QubitRealization q = model_hamiltonian(spec);
  const LanczosChain c = build_chain(Liouvillian(q.hamiltonian), q.seed.normalized());
  REQUIRE(c.dim == 3);
  CHECK(std::abs(c.b(1) - 2.0) < 1e-12);
  CHECK(std::abs(c.b(2) - 0.5) < 1e-12);

  const LanczosChain z = build_chain(Liouvillian(model_hamiltonian(ModelSpec::qubit_z(1.5)).hamiltonian),
                                     pauli_operator("X").normalized());
  CHECK(z.dim == 2);
  CHECK(std::abs(z.b1() - 1.5) < 1e-12);
}

TEST_CASE("meixner closed form") {
  const ModelSpec spec = ModelSpec::meixner(1.0, 2.0);
  for (double t : {0.0, 0.3, 1.0, 2.0}) {
    const ModelAmplitudes m = model_amplitudes(spec, t);
    CHECK(max_gap(m.phi, meixner_oracle(1.0, 2.0, t, static_cast<int>(m.phi.size()))) < 1e-12);
    CHECK(std::abs(m.phi.squaredNorm() + m.tail_mass - 1.0) < 1e-12);
    CHECK(m.tail_mass < 1e-14);
    CHECK((m.phi.array() >= 0.0).all());
  }
  // eta below 1 approaches the geometric limit from below.
  const ModelAmplitudes low = model_amplitudes(ModelSpec::meixner(0.5, 0.5), 3.0);
  CHECK(std::abs(low.phi.squaredNorm() - 1.0) < 1e-12);
}

TEST_CASE("coherent closed form") {
  for (double t : {0.0, 1.0, 4.0}) {
    const ModelAmplitudes m = model_amplitudes(ModelSpec::coherent(1.0), t);
    CHECK(max_gap(m.phi, coherent_oracle(1.0, t, static_cast<int>(m.phi.size()))) < 1e-12);
    CHECK(std::abs(m.phi.squaredNorm() - 1.0) < 1e-12);
  }
  CHECK(model_log_amplitude(ModelSpec::coherent(1.0), 0, 2.0) == doctest::Approx(-2.0));
}

TEST_CASE("truncated chains agree with the closed forms") {
  struct Case { ModelSpec spec; double horizon; };
  for (const Case& c : {Case{ModelSpec::meixner(1.0, 2.0), 2.0}, Case{ModelSpec::meixner(0.5, 3.0), 3.0},
                        Case{ModelSpec::coherent(1.0), 6.0}, Case{ModelSpec::coherent(0.5), 8.0}}) {
    const TruncatedChain tc = model_chain(c.spec, c.horizon);
    CHECK_FALSE(tc.exact);
    CHECK(tc.tail_mass < 1e-12);
    const std::vector<double> grid = uniform_grid(c.horizon, 9);
    const AmplitudeTrajectory traj = evolve_spectral(tc.chain, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      // The series stops once the remaining mass is below its tail_tol, so
      // compare on the common support and bound the omitted weight.
      const ModelAmplitudes m = model_amplitudes(c.spec, grid[k]);
      const Eigen::VectorXd phi = traj.phi.col(static_cast<Eigen::Index>(k));
      const Eigen::Index common = std::min(phi.size(), m.phi.size());
      CHECK(max_gap(phi.head(common), m.phi.head(common)) < 1e-8);
      CHECK(phi.tail(phi.size() - common).squaredNorm() <= 10.0 * m.tail_mass + 1e-15);
    }
  }
}

TEST_CASE("constant chain against the Bessel form") {
  const double b = 0.8, t = 5.0;
  const ModelAmplitudes m = model_amplitudes(ModelSpec::constant_b(b), t);
  CHECK_FALSE(m.closed_form);
  for (int n = 0; n < 30; ++n) {
    const double oracle = (n + 1.0) * std::cyl_bessel_j(n + 1.0, 2.0 * b * t) / (b * t);
    CHECK(std::abs(m.phi(n) - oracle) < 1e-10);
  }
}

TEST_CASE("peak predictions") {
  CHECK(model_peak_prediction(ModelSpec::coherent(2.0), 1.5).saddle == doctest::Approx(9.0));
  const PeakPrediction p = model_peak_prediction(ModelSpec::meixner(1.0, 3.0), 2.0);
  CHECK(p.saddle == doctest::Approx(-1.0 / std::log(std::tanh(2.0))));
  CHECK(p.asymptote == doctest::Approx(0.5 * std::exp(4.0)));
  CHECK_FALSE(p.flagged);
  CHECK(model_peak_prediction(ModelSpec::meixner(1.0, 1.0), 2.0).flagged);
  CHECK_THROWS_AS(model_peak_prediction(ModelSpec::coherent(1.0), 0.0), ValidationError);

  // Saddle against the observed argmax of the closed form.
  for (double eta : {2.0, 3.0})
    for (double x : {2.0, 3.0, 4.0}) {
      const ModelSpec spec = ModelSpec::meixner(1.0, eta);
      Eigen::Index argmax = 0;
      model_amplitudes(spec, x).phi.maxCoeff(&argmax);
      const double saddle = model_peak_prediction(spec, x).saddle;
      CHECK(std::abs(static_cast<double>(argmax) - saddle) <= eta);
    }
}

}  // TEST_SUITE
