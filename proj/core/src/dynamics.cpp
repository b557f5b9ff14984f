#include "ksphere/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <boost/numeric/odeint.hpp>
#include <lapacke.h>

#include "ksphere/error.hpp"

namespace ksphere {

HoppingMatrix::HoppingMatrix(std::vector<double> b) : lower_(b), upper_(std::move(b)) {
  for (double& u : upper_) u = -u;
}

void HoppingMatrix::apply(const double* in, double* out) const {
  const int d = dim();
  if (d == 1) {
    out[0] = 0.0;
    return;
  }
  out[0] = upper_[0] * in[1];
  for (int n = 1; n + 1 < d; ++n)
    out[n] = lower_[n - 1] * in[n - 1] + upper_[n] * in[n + 1];
  out[d - 1] = lower_[d - 2] * in[d - 2];
}

Eigen::VectorXd HoppingMatrix::apply(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(v.size());
  apply(v.data(), out.data());
  return out;
}

Eigen::MatrixXd HoppingMatrix::dense() const {
  const int d = dim();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (int n = 1; n < d; ++n) {
    a(n, n - 1) = lower(n);
    a(n - 1, n) = upper(n);
  }
  return a;
}

bool HoppingMatrix::is_skew() const {
  for (std::size_t k = 0; k < lower_.size(); ++k)
    if (lower_[k] != -upper_[k]) return false;
  return true;
}

HoppingMatrix HoppingMatrix::with_flipped_lower(int n) const {
  if (n < 1 || n >= dim()) throw ValidationError("with_flipped_lower: index out of range");
  HoppingMatrix copy = *this;
  copy.lower_[static_cast<std::size_t>(n - 1)] *= -1.0;
  return copy;
}

HoppingMatrix hopping_matrix(const LanczosChain& chain) {
  return HoppingMatrix(chain.coefficients);
}

Eigen::MatrixXd lanczos_matrix(const LanczosChain& chain) {
  const int d = chain.dim;
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(d, d);
  for (int n = 1; n < d; ++n) l(n, n - 1) = l(n - 1, n) = chain.b(n);
  return l;
}

double similarity_residual(const LanczosChain& chain) {
  const int d = chain.dim;
  const Complex minus_i{0.0, -1.0};
  Eigen::VectorXcd s(d);
  s(0) = 1.0;
  for (int n = 1; n < d; ++n) s(n) = s(n - 1) * minus_i;
  const Eigen::MatrixXcd l = lanczos_matrix(chain).cast<Complex>();
  const Eigen::MatrixXcd similar =
      s.cwiseInverse().asDiagonal() * l * s.asDiagonal();
  const Eigen::MatrixXcd residual =
      hopping_matrix(chain).dense().cast<Complex>() + Complex{0.0, 1.0} * similar;
  return residual.cwiseAbs().maxCoeff();
}

double AmplitudeTrajectory::max_norm_drift() const {
  return norm_drift.empty() ? 0.0
                            : *std::max_element(norm_drift.begin(), norm_drift.end());
}

void fill_derivatives(AmplitudeTrajectory& traj, const HoppingMatrix& a) {
  const int d = traj.dim();
  const int t = traj.samples();
  traj.dphi.resize(d, t);
  traj.d2phi.resize(d, t);
  traj.d3phi.resize(d, t);
  traj.norm_drift.resize(static_cast<std::size_t>(t));
  for (int k = 0; k < t; ++k) {
    a.apply(traj.phi.col(k).data(), traj.dphi.col(k).data());
    a.apply(traj.dphi.col(k).data(), traj.d2phi.col(k).data());
    a.apply(traj.d2phi.col(k).data(), traj.d3phi.col(k).data());
    traj.norm_drift[static_cast<std::size_t>(k)] =
        std::abs(traj.phi.col(k).squaredNorm() - 1.0);
  }
}

namespace {

void validate_times(std::span<const double> times) {
  if (times.empty()) throw ValidationError("time grid is empty");
  if (times.front() != 0.0) throw ValidationError("time grid must start at 0");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1]) || !std::isfinite(times[k]))
      throw ValidationError("time grid must be finite and strictly increasing");
}

}  // namespace

AmplitudeTrajectory evolve_ode(const LanczosChain& chain,
                               std::span<const double> times, double rtol,
                               double atol) {
  return evolve_ode(hopping_matrix(chain), times, rtol, atol);
}

AmplitudeTrajectory evolve_ode(const HoppingMatrix& a,
                               std::span<const double> times, double rtol,
                               double atol) {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<double>;

  validate_times(times);
  if (!(rtol > 0.0) || !(atol > 0.0))
    throw ValidationError("evolve_ode: tolerances must be positive");

  const int d = a.dim();
  AmplitudeTrajectory traj;
  traj.method = "ode-dopri5";
  traj.times.assign(times.begin(), times.end());
  traj.phi = Eigen::MatrixXd::Zero(d, static_cast<Eigen::Index>(times.size()));

  State x(static_cast<std::size_t>(d), 0.0);
  x[0] = 1.0;

  if (d == 1 || times.size() == 1) {
    traj.phi.row(0).setOnes();
  } else {
    auto system = [&a](const State& y, State& dydt, double) {
      a.apply(y.data(), dydt.data());
    };
    std::size_t next = 0;
    double last_good = 0.0;
    auto observer = [&](const State& y, double t) {
      traj.phi.col(static_cast<Eigen::Index>(next)) =
          Eigen::Map<const Eigen::VectorXd>(y.data(), d);
      last_good = t;
      ++next;
    };
    // Initial step from the stability scale of the generator.
    double bmax = 0.0;
    for (int n = 1; n < d; ++n) bmax = std::max(bmax, std::abs(a.lower(n)));
    const double dt0 = 0.1 / std::max(bmax, 1e-12);
    auto stepper = odeint::make_dense_output(
        atol, rtol, odeint::runge_kutta_dopri5<State>());
    try {
      odeint::integrate_times(stepper, system, x, times.begin(), times.end(),
                              dt0, observer,
                              odeint::max_step_checker(100'000'000));
    } catch (const odeint::odeint_error& e) {
      std::ostringstream msg;
      msg << "evolve_ode: step-size control failed (" << e.what()
          << "); last good time " << last_good;
      throw StepUnderflowError(msg.str(), last_good);
    }
  }
  fill_derivatives(traj, a);
  return traj;
}

namespace {

struct TridiagonalEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

// Symmetric tridiagonal with zero diagonal; MRRR from LAPACK.
TridiagonalEigen tridiagonal_eigen(const LanczosChain& chain) {
  const int d = chain.dim;
  std::vector<double> diag(static_cast<std::size_t>(d), 0.0);
  std::vector<double> off(static_cast<std::size_t>(d), 0.0);
  for (int n = 1; n < d; ++n) off[static_cast<std::size_t>(n - 1)] = chain.b(n);
  TridiagonalEigen out;
  out.values.resize(d);
  out.vectors.resize(d, d);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(d));
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  const lapack_int info = LAPACKE_dstemr(
      LAPACK_COL_MAJOR, 'V', 'A', d, diag.data(), off.data(), 0.0, 0.0, 0, 0,
      &found, out.values.data(), out.vectors.data(), d, d, support.data(),
      &tryrac);
  if (info != 0 || found != d) {
    std::ostringstream msg;
    msg << "tridiagonal eigensolver failed (info = " << info << ", found "
        << found << " of " << d << " eigenpairs)";
    throw NumericalError(msg.str());
  }
  return out;
}

}  // namespace

AmplitudeTrajectory evolve_spectral(const LanczosChain& chain,
                                    std::span<const double> times) {
  validate_times(times);
  const int d = chain.dim;
  const auto t_count = static_cast<Eigen::Index>(times.size());

  AmplitudeTrajectory traj;
  traj.method = "spectral";
  traj.times.assign(times.begin(), times.end());
  traj.phi = Eigen::MatrixXd::Zero(d, t_count);

  if (d == 1) {
    traj.phi.row(0).setOnes();
  } else {
    const TridiagonalEigen eig = tridiagonal_eigen(chain);
    const Eigen::VectorXd weight = eig.vectors.row(0).transpose();
    Eigen::MatrixXd c(d, t_count);
    Eigen::MatrixXd s(d, t_count);
    for (Eigen::Index k = 0; k < t_count; ++k)
      for (int j = 0; j < d; ++j) {
        const double angle = eig.values(j) * times[static_cast<std::size_t>(k)];
        c(j, k) = weight(j) * std::cos(angle);
        s(j, k) = weight(j) * std::sin(angle);
      }
    // (exp(iLt))_{n0} = re + i im
    const Eigen::MatrixXd re = eig.vectors * c;
    const Eigen::MatrixXd im = eig.vectors * s;
    double residual = 0.0;
    for (Eigen::Index k = 0; k < t_count; ++k)
      for (int n = 0; n < d; ++n) {
        // multiply by i^{-n}
        double real_part = 0.0, imag_part = 0.0;
        switch (n % 4) {
          case 0: real_part = re(n, k); imag_part = im(n, k); break;
          case 1: real_part = im(n, k); imag_part = -re(n, k); break;
          case 2: real_part = -re(n, k); imag_part = -im(n, k); break;
          default: real_part = -im(n, k); imag_part = re(n, k); break;
        }
        traj.phi(n, k) = real_part;
        residual = std::max(residual, std::abs(imag_part));
      }
    traj.max_imag_residual = residual;
    if (residual > 1e-10) {
      std::ostringstream msg;
      msg << "evolve_spectral: imaginary residual " << residual
          << " of i^{-n} (exp(iLt))_{n0} exceeds 1e-10";
      throw InvariantViolation(msg.str());
    }
  }
  fill_derivatives(traj, hopping_matrix(chain));
  return traj;
}

std::vector<double> uniform_grid(double t_max, int samples) {
  if (!(t_max >= 0.0) || !std::isfinite(t_max))
    throw ValidationError("uniform_grid: t_max must be finite and >= 0");
  if (t_max == 0.0 && samples >= 1) return {0.0};
  if (samples < 2) throw ValidationError("uniform_grid: need at least two samples for t_max > 0");
  std::vector<double> grid(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k)
    grid[static_cast<std::size_t>(k)] = t_max * k / (samples - 1);
  grid.back() = t_max;
  return grid;
}

namespace {

// Builds the first `levels` levels of the rule; stops early at a zero.
LanczosChain chain_from_rule(const CoefficientRule& rule, int levels, bool& exact) {
  std::vector<double> b;
  exact = false;
  for (int n = 1; n < levels; ++n) {
    const double v = rule(n);
    if (!std::isfinite(v) || v < 0.0) {
      std::ostringstream msg;
      msg << "coefficient rule returned invalid b_" << n << " = " << v;
      throw ValidationError(msg.str());
    }
    if (v == 0.0) {
      exact = true;
      break;
    }
    b.push_back(v);
  }
  return LanczosChain::from_coefficients(std::move(b));
}

}  // namespace

TruncatedChain truncated_chain(const CoefficientRule& rule, double tail_tol,
                               double horizon, const TruncationOptions& options) {
  if (!(tail_tol > 0.0)) throw ValidationError("truncated_chain: tail_tol must be positive");
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw ValidationError("truncated_chain: horizon must be finite and >= 0");

  TruncatedChain result;
  if (horizon == 0.0) {
    result.chain = LanczosChain::from_coefficients({});
    result.levels = 1;
    return result;
  }

  const std::vector<double> grid = uniform_grid(horizon, std::max(options.horizon_samples, 2));
  std::map<int, Eigen::MatrixXd> cache;
  bool exact = false;

  auto run = [&](int levels) -> const Eigen::MatrixXd& {
    auto it = cache.find(levels);
    if (it != cache.end()) return it->second;
    bool ex = false;
    const LanczosChain chain = chain_from_rule(rule, levels, ex);
    AmplitudeTrajectory traj = chain.dim <= options.spectral_limit
                                   ? evolve_spectral(chain, grid)
                                   : evolve_ode(chain, grid, 1e-13, 1e-15);
    return cache.emplace(levels, std::move(traj.phi)).first->second;
  };

  auto buffer_mass = [&](const Eigen::MatrixXd& phi) {
    const int d = static_cast<int>(phi.rows());
    const int buffer = std::max(1, static_cast<int>(std::ceil(options.buffer_fraction * d)));
    return phi.bottomRows(buffer).colwise().squaredNorm().maxCoeff();
  };

  int levels = std::max(options.initial_levels, 2);
  double mass = 0.0;
  while (true) {
    bool ex = false;
    const LanczosChain probe = chain_from_rule(rule, levels, ex);
    if (ex) {
      // The rule terminates by itself: the chain is finite and exact.
      result.chain = probe;
      result.levels = probe.dim;
      result.exact = true;
      return result;
    }
    if (levels > options.cap) {
      std::ostringstream msg;
      msg << "truncated_chain: " << levels << " levels exceed the cap "
          << options.cap << " (achieved buffer mass " << mass << ")";
      throw TruncationError(msg.str(), levels / 2, mass);
    }
    const Eigen::MatrixXd& phi = run(levels);
    mass = buffer_mass(phi);
    if (mass > tail_tol) {
      cache.erase(levels);
      levels *= 2;
      continue;
    }
    const Eigen::MatrixXd& doubled = run(2 * levels);
    const double gap = (cache.at(levels) - doubled.topRows(levels)).cwiseAbs().maxCoeff();
    if (gap < 10.0 * tail_tol) {
      result.chain = chain_from_rule(rule, levels, exact);
      result.levels = levels;
      result.tail_mass = mass;
      result.doubling_gap = gap;
      return result;
    }
    cache.erase(levels);
    levels *= 2;
  }
}

}  // namespace ksphere
