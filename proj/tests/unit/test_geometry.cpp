#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ksphere/error.hpp"
#include "ksphere/geometry.hpp"
#include "ksphere/models.hpp"
#include "ksphere/random.hpp"

using namespace ksphere;

namespace {

AmplitudeTrajectory spectral(const std::vector<double>& b, double t_max, int samples = 101) {
  return evolve_spectral(LanczosChain::from_coefficients(b), uniform_grid(t_max, samples));
}

double max_dev(const std::vector<double>& v, double target) {
  double w = 0.0;
  for (double x : v) w = std::max(w, std::abs(x - target));
  return w;
}

// Frenet frame by Gram-Schmidt: kappa = |a_perp| / |v|^2,
// tau = |j_perp| / (|v| |a_perp|).
struct FrenetOracle {
  double kappa, tau;
};

FrenetOracle frenet_by_projection(const Eigen::VectorXd& v, const Eigen::VectorXd& a,
                                  const Eigen::VectorXd& j) {
  const Eigen::VectorXd tv = v.normalized();
  const Eigen::VectorXd a_perp = a - a.dot(tv) * tv;
  const Eigen::VectorXd n = a_perp.normalized();
  const Eigen::VectorXd j_perp = j - j.dot(tv) * tv - j.dot(n) * n;
  return {a_perp.norm() / v.squaredNorm(), j_perp.norm() / (v.norm() * a_perp.norm())};
}

Eigen::MatrixXd dense_generator(const std::vector<double>& b) {
  const int d = static_cast<int>(b.size()) + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (int n = 1; n < d; ++n) {
    a(n, n - 1) = b[n - 1];
    a(n - 1, n) = -b[n - 1];
  }
  return a;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("speed examples") {
  CHECK(max_dev(krylov_speed(spectral({1.0}, 7.0)), 1.0) < 1e-12);
  CHECK(max_dev(krylov_speed(spectral({1.0, 1.0}, 5.0)), 1.0) < 1e-12);
  const TruncatedChain tc = model_chain(ModelSpec::meixner(1.0, 2.0), 2.0);
  CHECK(std::abs(tc.chain.b1() - std::sqrt(2.0)) < 1e-15);
  const AmplitudeTrajectory m = evolve_ode(tc.chain, uniform_grid(2.0, 41));
  CHECK(max_dev(krylov_speed(m), std::sqrt(2.0)) < 1e-8);
  CHECK(std::abs(arc_length(m, 0.0, 2.0) - 2.0 * std::sqrt(2.0)) < 1e-8 * 2.0 * std::sqrt(2.0));
}

TEST_CASE("arc length") {
  const AmplitudeTrajectory r = spectral({1.0}, std::numbers::pi, 64);
  CHECK(std::abs(arc_length(r, 0.0, std::numbers::pi) - std::numbers::pi) < 1e-12);
  CHECK(arc_length(r, 1.3, 1.3) == 0.0);
  // Endpoints between samples.
  CHECK(std::abs(arc_length(r, 0.1, 2.9) - 2.8) < 1e-12);
  CHECK_THROWS_AS(arc_length(r, 2.0, 1.0), ValidationError);
  CHECK_THROWS_AS(arc_length(r, 0.0, 4.0), ValidationError);
}

TEST_CASE("curvature examples") {
  const LanczosChain c1 = LanczosChain::from_coefficients({1.0});
  CurvatureResult k = frenet_curvature(spectral({1.0}, 5.0), c1);
  CHECK(max_dev(k.series, 1.0) < 1e-12);
  CHECK(k.closed_form == 1.0);
  k = frenet_curvature(spectral({1.0, 1.0}, 5.0), LanczosChain::from_coefficients({1.0, 1.0}));
  CHECK(max_dev(k.series, std::sqrt(2.0)) < 1e-12);
  k = frenet_curvature(spectral({2.0, 1.0}, 5.0), LanczosChain::from_coefficients({2.0, 1.0}));
  CHECK(std::abs(k.closed_form - std::sqrt(5.0) / 2.0) < 1e-15);
  CHECK(max_dev(k.series, std::sqrt(5.0) / 2.0) < 1e-12);
  const LanczosChain stationary = LanczosChain::from_coefficients({});
  CHECK_FALSE(frenet_curvature(spectral({}, 1.0, 3), stationary).defined);
}

TEST_CASE("Frenet values agree with a projection oracle at t = 0") {
  Rng rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<double> b = random_coefficients(3 + trial % 4, rng);
    const LanczosChain c = LanczosChain::from_coefficients(b);
    const Eigen::MatrixXd a = dense_generator(b);
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(c.dim);
    e0(0) = 1.0;
    const FrenetOracle o = frenet_by_projection(a * e0, a * a * e0, a * a * a * e0);
    const AmplitudeTrajectory traj = spectral(b, 3.0, 31);
    const CurvatureResult k = frenet_curvature(traj, c);
    const TorsionResult tau = frenet_torsion(traj, c);
    CHECK(std::abs(k.series.front() - o.kappa) < 1e-12 * o.kappa);
    CHECK(std::abs(k.closed_form - o.kappa) < 1e-12 * o.kappa);
    CHECK(std::abs(tau.series.front() - o.tau) < 1e-10 * o.tau);
    CHECK(std::abs(tau.closed_form_gram - o.tau) < 1e-12 * o.tau);
    // Constant along the trajectory.
    CHECK(max_dev(k.series, o.kappa) < 1e-7 * o.kappa);
    CHECK(max_dev(tau.series, o.tau) < 1e-6 * o.tau);
  }
}

TEST_CASE("torsion examples") {
  TorsionResult t = frenet_torsion(spectral({1.0, 1.0}, 4.0), LanczosChain::from_coefficients({1.0, 1.0}));
  CHECK(t.defined);
  CHECK(t.closed_form == 0.0);
  CHECK(max_dev(t.series, 0.0) < 1e-6);

  const std::vector<double> ones(12, 1.0);
  t = frenet_torsion(spectral(ones, 0.5, 11), LanczosChain::from_coefficients(ones));
  CHECK(std::abs(t.closed_form - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(t.series.front() - 1.0 / std::sqrt(2.0)) < 1e-10);

  t = frenet_torsion(spectral({1.0}, 1.0), LanczosChain::from_coefficients({1.0}));
  CHECK_FALSE(t.defined);

  // The quoted closed form carries an extra 1/b1 relative to the Gram value.
  const std::vector<double> b = {2.0, 1.0, 3.0};
  t = frenet_torsion(spectral(b, 2.0), LanczosChain::from_coefficients(b));
  CHECK(std::abs(t.closed_form_gram - 3.0 / (2.0 * std::sqrt(5.0))) < 1e-15);
  CHECK(std::abs(t.closed_form - 3.0 / (4.0 * std::sqrt(5.0))) < 1e-15);
  CHECK(max_dev(t.series, t.closed_form_gram) < 1e-6 * t.closed_form_gram);
}

TEST_CASE("acceleration norm") {
  Rng rng(19);
  const std::vector<double> b = random_coefficients(6, rng);
  const AmplitudeTrajectory traj = spectral(b, 10.0);
  const double expected = b[0] * b[0] * (b[0] * b[0] + b[1] * b[1]);
  CHECK(max_dev(acceleration_norm_sq(traj), expected) < 1e-8 * expected);
}

TEST_CASE("geodesic residual") {
  const std::vector<double> r1 = geodesic_residual(spectral({1.0}, 10.0), LanczosChain::from_coefficients({1.0}));
  CHECK(max_dev(r1, 0.0) < 1e-10);
  const std::vector<double> r2 =
      geodesic_residual(spectral({1.0, 1.0}, 1.0), LanczosChain::from_coefficients({1.0, 1.0}));
  CHECK(std::abs(r2.front() - 1.0) < 1e-12);
  const std::vector<double> r3 =
      geodesic_residual(spectral({2.0, 3.0}, 1.0), LanczosChain::from_coefficients({2.0, 3.0}));
  CHECK(std::abs(r3.front() - 6.0) < 1e-12);
}

TEST_CASE("return amplitude bound") {
  const LanczosChain c1 = LanczosChain::from_coefficients({1.0});
  ReturnAmplitudeResult r = return_amplitude_check(spectral({1.0}, 3.0, 301), c1);
  CHECK(r.times.back() <= std::numbers::pi / 2);
  CHECK(r.times.back() > 1.5);
  CHECK(max_dev(r.margin, 0.0) < 1e-12);
  CHECK(r.margin.front() == doctest::Approx(0.0).epsilon(1e-15));

  const double times[] = {0.0, 0.5};
  const LanczosChain c2 = LanczosChain::from_coefficients({1.0, 1.0});
  r = return_amplitude_check(evolve_spectral(c2, times), c2);
  const double om = std::sqrt(2.0);
  const double phi0 = std::cos(om * 0.5) + 0.5 * (1 - std::cos(om * 0.5));
  CHECK(phi0 - std::cos(0.5) > 0.0);
  CHECK(std::abs(r.margin[1] - (phi0 - std::cos(0.5))) < 1e-12);
  CHECK(r.margin[0] == doctest::Approx(0.0));

  // theta never exceeds the arc length.
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const std::vector<double> b = random_coefficients(5, rng);
    const LanczosChain c = LanczosChain::from_coefficients(b);
    const AmplitudeTrajectory traj = spectral(b, 2.0 / b[0], 201);
    r = return_amplitude_check(traj, c);
    CHECK(r.min_margin >= -1e-9);
    CHECK(r.max_clip <= 1e-9);
    for (std::size_t k = 0; k < r.times.size(); ++k) {
      CHECK(r.theta_excess[k] <= 1e-9);
      CHECK(r.theta[k] <= arc_length(traj, 0.0, r.times[k]) + 1e-9);
    }
  }
}

TEST_CASE("Hall equality") {
  Rng rng(51);
  for (int trial = 0; trial < 6; ++trial) {
    const std::vector<double> b = random_coefficients(2 + trial, rng);
    const LanczosChain c = LanczosChain::from_coefficients(b);
    const HallReport h = hall_check(spectral(b, 5.0, 20), c);
    CHECK(h.max_product_deviation < 1e-8);
    CHECK(h.max_classical_part < 1e-10);
    for (const auto& s : h.samples) {
      CHECK(std::abs(s.delta_L_nc - c.b1()) < 1e-10 * c.b1());
      CHECK(std::abs(s.mean_generator) < 1e-14);
    }
  }
  const std::vector<double> tq = {1.0, 1.0};
  const double t03[] = {0.0, 0.3};
  const HallReport q = hall_check(evolve_spectral(LanczosChain::from_coefficients(tq), t03),
                                  LanczosChain::from_coefficients(tq));
  CHECK(std::abs(q.samples[1].delta_L_nc - 1.0) < 1e-12);

  const std::vector<double> ones(40, 1.0);
  const double t1[] = {0.0, 1.0};
  const HallReport cb = hall_check(evolve_spectral(LanczosChain::from_coefficients(ones), t1),
                                   LanczosChain::from_coefficients(ones));
  CHECK(cb.samples[1].raw_vs_closed_gap < 1e-8);
  CHECK(cb.samples[1].skipped_levels > 0);
}

TEST_CASE("Hall raw ratio against the dense density matrix") {
  Rng rng(60);
  const std::vector<double> b = random_coefficients(5, rng);
  const LanczosChain c = LanczosChain::from_coefficients(b);
  const double times[] = {0.0, 0.7, 1.9};
  const AmplitudeTrajectory traj = evolve_spectral(c, times);
  const HallReport h = hall_check(traj, c);
  const Eigen::MatrixXcd l = lanczos_matrix(c).cast<Complex>();
  const Complex i{0.0, 1.0};
  for (int k = 1; k < 3; ++k) {
    Eigen::VectorXcd ck(c.dim);
    for (int n = 0; n < c.dim; ++n) ck(n) = std::pow(i, n) * traj.phi(n, k);
    const Eigen::MatrixXcd rho = ck * ck.adjoint();
    const Eigen::MatrixXcd comm = i * (l * rho - rho * l);
    const Eigen::MatrixXcd anti = 0.5 * (l * rho + rho * l);
    double raw = 0.0, classical = 0.0;
    for (int n = 0; n < c.dim; ++n) {
      raw += std::norm(comm(n, n)) / rho(n, n).real();
      classical = std::max(classical, std::abs(anti(n, n)) / rho(n, n).real());
    }
    const double mean = (rho * l).trace().real();
    const double second = (rho * l * l).trace().real();
    CHECK(std::abs(h.samples[k].raw_inverse_sq - raw) < 1e-10 * raw);
    CHECK(classical < 1e-12);
    CHECK(std::abs(h.samples[k].delta_L_nc - std::sqrt(second - mean * mean)) < 1e-12);
  }
}

TEST_CASE("Hall spread at the Liouvillian level") {
  Rng rng(70);
  const Liouvillian l(random_hermitian(3, rng));
  const OperatorState seed = random_traceless_hermitian(3, rng).normalized();
  const LanczosChain c = build_chain(l, seed);
  for (double t : {0.4, 1.3}) {
    const OperatorState o = heisenberg_oracle(l, seed, t);
    const OperatorState lo = l.apply(o);
    const double mean = inner_product(o, lo).real();
    const double second = inner_product(lo, lo).real();
    CHECK(std::abs(mean) < 1e-12);
    CHECK(std::abs(std::sqrt(second - mean * mean) - c.b1()) < 1e-10);
  }
}

}  // TEST_SUITE
