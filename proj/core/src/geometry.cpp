#include "ksphere/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ksphere/error.hpp"

namespace ksphere {

std::vector<double> krylov_speed(const AmplitudeTrajectory& traj) {
  std::vector<double> v(static_cast<std::size_t>(traj.samples()));
  for (int k = 0; k < traj.samples(); ++k)
    v[static_cast<std::size_t>(k)] = traj.dphi.col(k).norm();
  return v;
}

namespace {

// Simpson on a possibly non-uniform grid, trapezoid on a leftover interval.
double simpson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double total = 0.0;
  std::size_t i = 0;
  for (; i + 2 < n; i += 2) {
    const double h0 = x[i + 1] - x[i];
    const double h1 = x[i + 2] - x[i + 1];
    const double h = h0 + h1;
    if (h0 <= 0.0 || h1 <= 0.0) {
      total += 0.5 * h0 * (y[i] + y[i + 1]) + 0.5 * h1 * (y[i + 1] + y[i + 2]);
      continue;
    }
    total += h / 6.0 *
             ((2.0 - h1 / h0) * y[i] + (h * h / (h0 * h1)) * y[i + 1] +
              (2.0 - h0 / h1) * y[i + 2]);
  }
  if (i + 1 < n) total += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return total;
}

double interpolate(const std::vector<double>& x, const std::vector<double>& y,
                   double at) {
  const auto it = std::lower_bound(x.begin(), x.end(), at);
  if (it == x.begin()) return y.front();
  if (it == x.end()) return y.back();
  const auto j = static_cast<std::size_t>(it - x.begin());
  if (x[j] == at) return y[j];
  const double w = (at - x[j - 1]) / (x[j] - x[j - 1]);
  return (1.0 - w) * y[j - 1] + w * y[j];
}

// b_n for the closed forms; absent levels count as zero.
struct LeadingCoefficients {
  double b1, b2, b3;
};

LeadingCoefficients leading(const LanczosChain& chain) {
  return {chain.b(1), chain.b(2), chain.b(3)};
}

}  // namespace

double arc_length(const AmplitudeTrajectory& traj, double t0, double t1) {
  if (traj.times.empty()) throw ValidationError("arc_length: empty trajectory");
  if (!(t0 <= t1) || t0 < traj.times.front() || t1 > traj.times.back())
    throw ValidationError("arc_length: [t0, t1] outside the trajectory range");
  if (t0 == t1) return 0.0;
  const std::vector<double> speed = krylov_speed(traj);
  std::vector<double> x{t0};
  std::vector<double> y{interpolate(traj.times, speed, t0)};
  for (std::size_t k = 0; k < traj.times.size(); ++k)
    if (traj.times[k] > t0 && traj.times[k] < t1) {
      x.push_back(traj.times[k]);
      y.push_back(speed[k]);
    }
  x.push_back(t1);
  y.push_back(interpolate(traj.times, speed, t1));
  return simpson(x, y);
}

CurvatureResult frenet_curvature(const AmplitudeTrajectory& traj,
                                 const LanczosChain& chain) {
  CurvatureResult out;
  const auto [b1, b2, b3] = leading(chain);
  (void)b3;
  if (b1 == 0.0) {
    out.defined = false;
    return out;
  }
  out.closed_form = std::sqrt(1.0 + (b2 * b2) / (b1 * b1));
  out.series.resize(static_cast<std::size_t>(traj.samples()));
  for (int k = 0; k < traj.samples(); ++k) {
    const auto v = traj.dphi.col(k);
    const auto a = traj.d2phi.col(k);
    const double vv = v.squaredNorm();
    const double aa = a.squaredNorm();
    const double va = v.dot(a);
    const double cross_sq = std::max(vv * aa - va * va, 0.0);
    out.series[static_cast<std::size_t>(k)] = std::sqrt(cross_sq) / std::pow(vv, 1.5);
  }
  return out;
}

TorsionResult frenet_torsion(const AmplitudeTrajectory& traj,
                             const LanczosChain& chain) {
  TorsionResult out;
  const auto [b1, b2, b3] = leading(chain);
  if (chain.dim < 3) {
    out.defined = false;
    out.note = "torsion undefined: motion confined to a plane (D < 3)";
    return out;
  }
  if (b1 == 0.0) {
    out.defined = false;
    out.note = "torsion undefined: b1 = 0";
    return out;
  }
  const double root = std::sqrt(b1 * b1 + b2 * b2);
  out.closed_form = b2 * b3 / (b1 * b1 * root);
  out.closed_form_gram = b2 * b3 / (b1 * root);
  out.series.resize(static_cast<std::size_t>(traj.samples()));
  for (int k = 0; k < traj.samples(); ++k) {
    const auto v1 = traj.dphi.col(k);
    const auto v2 = traj.d2phi.col(k);
    const auto v3 = traj.d3phi.col(k);
    Eigen::Matrix3d g;
    g << v1.dot(v1), v1.dot(v2), v1.dot(v3),
         v2.dot(v1), v2.dot(v2), v2.dot(v3),
         v3.dot(v1), v3.dot(v2), v3.dot(v3);
    const double cross_sq = g(0, 0) * g(1, 1) - g(0, 1) * g(0, 1);
    if (!(cross_sq > 0.0)) {
      out.defined = false;
      out.note = "torsion undefined: degenerate Gram matrix (zero curvature)";
      out.series[static_cast<std::size_t>(k)] = std::nan("");
      continue;
    }
    out.series[static_cast<std::size_t>(k)] =
        std::sqrt(std::max(g.determinant(), 0.0)) / cross_sq;
  }
  return out;
}

std::vector<double> geodesic_residual(const AmplitudeTrajectory& traj,
                                      const LanczosChain& chain) {
  const double b1sq = chain.b1() * chain.b1();
  std::vector<double> out(static_cast<std::size_t>(traj.samples()));
  for (int k = 0; k < traj.samples(); ++k)
    out[static_cast<std::size_t>(k)] =
        (traj.d2phi.col(k) + b1sq * traj.phi.col(k)).norm();
  return out;
}

ReturnAmplitudeResult return_amplitude_check(const AmplitudeTrajectory& traj,
                                             const LanczosChain& chain) {
  ReturnAmplitudeResult out;
  const double b1 = chain.b1();
  double min_margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < traj.samples(); ++k) {
    const double t = traj.times[static_cast<std::size_t>(k)];
    const double angle = b1 * t;
    if (angle > std::numbers::pi / 2) break;
    const double phi0 = traj.phi(0, k);
    const double margin = phi0 - std::cos(angle);
    const double clipped = std::clamp(phi0, -1.0, 1.0);
    out.max_clip = std::max(out.max_clip, std::abs(phi0 - clipped));
    // Same angle as acos(phi0) on the unit sphere, without the sqrt(eps)
    // loss near phi0 = 1.
    const double rest = traj.phi.col(k).tail(traj.dim() - 1).norm();
    const double theta = std::atan2(rest, clipped);
    out.times.push_back(t);
    out.margin.push_back(margin);
    out.theta.push_back(theta);
    out.theta_excess.push_back(theta - angle);
    min_margin = std::min(min_margin, margin);
  }
  out.min_margin = out.margin.empty() ? 0.0 : min_margin;
  return out;
}

std::vector<double> acceleration_norm_sq(const AmplitudeTrajectory& traj) {
  std::vector<double> out(static_cast<std::size_t>(traj.samples()));
  for (int k = 0; k < traj.samples(); ++k)
    out[static_cast<std::size_t>(k)] = traj.d2phi.col(k).squaredNorm();
  return out;
}

HallReport hall_check(const AmplitudeTrajectory& traj, const LanczosChain& chain,
                      double eps_occupation) {
  HallReport report;
  const int d = traj.dim();
  if (d != chain.dim) throw ValidationError("hall_check: trajectory and chain dimensions differ");
  const Complex i{0.0, 1.0};

  // c_n = i^n phi_n: Krylov-basis components of |O(t)).
  Eigen::VectorXcd phase(d);
  phase(0) = 1.0;
  for (int n = 1; n < d; ++n) phase(n) = phase(n - 1) * i;

  for (int k = 0; k < traj.samples(); ++k) {
    HallSample s;
    s.t = traj.times[static_cast<std::size_t>(k)];
    const Eigen::VectorXd phi = traj.phi.col(k);
    const Eigen::VectorXd dphi = traj.dphi.col(k);
    const Eigen::VectorXcd c = phase.cwiseProduct(phi.cast<Complex>());

    // Tridiagonal L acting on c.
    auto apply_l = [&](const Eigen::VectorXcd& v) {
      Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d);
      for (int n = 0; n < d; ++n) {
        if (n >= 1) out(n) += chain.b(n) * v(n - 1);
        if (n + 1 < d) out(n) += chain.b(n + 1) * v(n + 1);
      }
      return out;
    };
    const Eigen::VectorXcd lc = apply_l(c);

    // Diagonals in the Krylov basis, rho_mn = c_m conj(c_n):
    //   (L rho)_nn = sum_m L_nm c_m conj(c_n),  (rho L)_nn = conj((L rho)_nn).
    double raw = 0.0;
    Eigen::VectorXd classical = Eigen::VectorXd::Zero(d);
    for (int n = 0; n < d; ++n) {
      const Complex l_rho = lc(n) * std::conj(c(n));
      const Complex rho_l = std::conj(l_rho);
      const double occupation = std::norm(c(n));
      const double anticommutator = 0.5 * (l_rho + rho_l).real();
      const double commutator = (i * (l_rho - rho_l)).real();
      if (occupation < eps_occupation) {
        ++s.skipped_levels;
        raw += 4.0 * dphi(n) * dphi(n);
        continue;
      }
      classical(n) = anticommutator / occupation;
      raw += commutator * commutator / occupation;
    }
    s.classical_part_norm = classical.cwiseAbs().maxCoeff();

    // Nonclassical generator L_nc = L - L_cl.
    const Eigen::VectorXcd lnc_c = lc - classical.cast<Complex>().cwiseProduct(c);
    s.mean_generator = c.dot(lc).real();
    const double mean_nc = c.dot(lnc_c).real();
    s.delta_L_nc = std::sqrt(std::max(lnc_c.squaredNorm() - mean_nc * mean_nc, 0.0));
    s.speed = dphi.norm();
    s.raw_inverse_sq = raw;
    s.closed_inverse_sq = 4.0 * dphi.squaredNorm();
    s.raw_vs_closed_gap = std::abs(raw - s.closed_inverse_sq);
    s.delta_functional = raw > 0.0 ? 1.0 / std::sqrt(raw) : std::numeric_limits<double>::infinity();
    s.product = s.delta_functional * s.delta_L_nc;

    report.max_product_deviation =
        std::max(report.max_product_deviation, std::abs(s.product - 0.5));
    report.max_classical_part = std::max(report.max_classical_part, s.classical_part_norm);
    report.max_gap = std::max(report.max_gap, s.raw_vs_closed_gap);
    report.samples.push_back(s);
  }
  return report;
}

GeometryReport geometry_report(const AmplitudeTrajectory& traj,
                               const LanczosChain& chain) {
  GeometryReport r;
  r.times = traj.times;
  r.speed_series = krylov_speed(traj);
  r.b1 = chain.b1();
  r.arc_length = arc_length(traj, traj.times.front(), traj.times.back());
  r.arc_length_expected = r.b1 * (traj.times.back() - traj.times.front());
  r.curvature = frenet_curvature(traj, chain);
  r.torsion = frenet_torsion(traj, chain);
  r.geodesic_residual_series = geodesic_residual(traj, chain);
  r.return_amplitude = return_amplitude_check(traj, chain);
  r.acceleration_norm_sq_series = acceleration_norm_sq(traj);
  r.acceleration_norm_sq_expected =
      r.b1 * r.b1 * (r.b1 * r.b1 + chain.b(2) * chain.b(2));
  return r;
}

}  // namespace ksphere
