#include "ksphere/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "ksphere/error.hpp"

namespace ksphere {

double operator_norm_velocity(const LanczosChain& chain) {
  double v = 0.0;
  for (int n = 0; n < chain.dim; ++n) v = std::max(v, chain.b(n) + chain.b(n + 1));
  return v;
}

double log_tail_envelope(int n, double v_op, double t) {
  const double x = v_op * t;
  if (n == 0) return x;
  return n * std::log(x) - std::lgamma(n + 1.0) + x;
}

double log_tail_envelope_stirling(int n, double v_op, double t) {
  const double x = v_op * t;
  if (n == 0) return x;
  return -n * std::log(n / x) + n + x;
}

double stirling_onset_constant() {
  // Newton on f(c) = c (log c - 1) - 1.
  double c = 3.6;
  for (int k = 0; k < 50; ++k) {
    const double f = c * (std::log(c) - 1.0) - 1.0;
    const double df = std::log(c);
    c -= f / df;
  }
  return c;
}

double tail_margin(const Eigen::VectorXd& phi, double v_op, double t) {
  double worst = std::numeric_limits<double>::infinity();
  for (Eigen::Index n = 0; n < phi.size(); ++n) {
    const double a = std::abs(phi(n));
    if (a == 0.0) continue;
    worst = std::min(worst, log_tail_envelope(static_cast<int>(n), v_op, t) - std::log(a));
  }
  return worst;
}

TailEnvelopeReport tail_envelope_check(const AmplitudeTrajectory& traj,
                                       const LanczosChain& chain, bool keep_grid) {
  TailEnvelopeReport report;
  report.v_op = operator_norm_velocity(chain);
  report.min_margin = std::numeric_limits<double>::infinity();
  const int d = traj.dim();
  std::vector<Eigen::Index> columns;
  for (int k = 0; k < traj.samples(); ++k)
    if (traj.times[static_cast<std::size_t>(k)] > 0.0) columns.push_back(k);
  if (keep_grid)
    report.margin = Eigen::MatrixXd::Constant(d, static_cast<Eigen::Index>(columns.size()),
                                              std::numeric_limits<double>::infinity());

  for (std::size_t j = 0; j < columns.size(); ++j) {
    const Eigen::Index k = columns[j];
    const double t = traj.times[static_cast<std::size_t>(k)];
    const double x = report.v_op * t;
    report.times.push_back(t);
    int onset = -1;
    int observed = 0;
    for (int n = 0; n < d; ++n) {
      if (onset < 0 && n > 0 && log_tail_envelope_stirling(n, report.v_op, t) < 0.0)
        onset = n;
      const double a = std::abs(traj.phi(n, k));
      if (a >= 1e-8) observed = n;
      if (a == 0.0) continue;
      const double margin = log_tail_envelope(n, report.v_op, t) - std::log(a);
      if (keep_grid) report.margin(n, static_cast<Eigen::Index>(j)) = margin;
      if (margin < report.min_margin) {
        report.min_margin = margin;
        report.argmin_level = n;
        report.argmin_time = t;
      }
    }
    report.envelope_onset.push_back(onset < 0 ? std::nan("") : onset / x);
    report.observed_onset.push_back(x > 0.0 ? observed / x : 0.0);
  }
  if (columns.empty()) report.min_margin = 0.0;
  return report;
}

GeometricFront geometric_front(const CoefficientRule& rule, double t,
                               std::int64_t max_levels) {
  if (!(t >= 0.0)) throw ValidationError("geometric_front: t must be >= 0");
  GeometricFront out;
  double sum = 0.0;
  for (std::int64_t m = 1;; ++m) {
    if (m > max_levels) {
      out.capped = true;
      out.warning = "front reached the summation cap";
      return out;
    }
    const double b = rule(static_cast<int>(m));
    if (!(b > 0.0)) {
      out.capped = true;
      out.warning = "level " + std::to_string(m) + " unreachable (b_m = 0); front capped";
      return out;
    }
    sum += 1.0 / b;
    if (sum > t) return out;
    out.front = m;
  }
}

GeometricFront geometric_front(const LanczosChain& chain, double t) {
  return geometric_front([&chain](int m) { return chain.b(m); }, t,
                         static_cast<std::int64_t>(chain.dim));
}

std::vector<int> peak_front(const AmplitudeTrajectory& traj) {
  std::vector<int> out(static_cast<std::size_t>(traj.samples()));
  for (int k = 0; k < traj.samples(); ++k) {
    int best = 0;
    double best_value = -1.0;
    for (int n = 0; n < traj.dim(); ++n) {
      const double p = traj.phi(n, k) * traj.phi(n, k);
      if (p > best_value) {
        best_value = p;
        best = n;
      }
    }
    out[static_cast<std::size_t>(k)] = best;
  }
  return out;
}

ComplexityResult krylov_complexity(const AmplitudeTrajectory& traj) {
  ComplexityResult out;
  const int d = traj.dim();
  for (int k = 0; k < traj.samples(); ++k) {
    double c = 0.0, c2 = 0.0, rate = 0.0;
    for (int n = 0; n < d; ++n) {
      const double p = traj.phi(n, k) * traj.phi(n, k);
      c += n * p;
      c2 += static_cast<double>(n) * n * p;
      rate += 2.0 * n * traj.phi(n, k) * traj.dphi(n, k);
    }
    out.complexity.push_back(c);
    out.spread.push_back(std::sqrt(std::max(c2 - c * c, 0.0)));
    out.rate.push_back(rate);
  }
  return out;
}

GrowthRateResult growth_rate_bound_check(const AmplitudeTrajectory& traj,
                                         const LanczosChain& chain) {
  GrowthRateResult out;
  const double b1 = chain.b1();
  const ComplexityResult c = krylov_complexity(traj);
  out.min_margin = std::numeric_limits<double>::infinity();
  out.min_scaled_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < c.complexity.size(); ++k) {
    const double margin = 2.0 * b1 * c.spread[k] - std::abs(c.rate[k]);
    const double scale = std::max(b1, 1e-300) * (1.0 + c.spread[k]);
    out.margin.push_back(margin);
    out.scale.push_back(scale);
    out.min_margin = std::min(out.min_margin, margin);
    out.min_scaled_margin = std::min(out.min_scaled_margin, margin / scale);
    out.max_abs_scaled_margin = std::max(out.max_abs_scaled_margin, std::abs(margin) / scale);
  }
  if (c.complexity.empty()) out.min_margin = out.min_scaled_margin = 0.0;
  return out;
}

FrontRatioResult complexity_front_ratio(const AmplitudeTrajectory& traj,
                                        const LanczosChain& chain) {
  FrontRatioResult out;
  const ComplexityResult c = krylov_complexity(traj);
  for (std::size_t k = 0; k < c.complexity.size(); ++k) {
    const GeometricFront front = geometric_front(chain, traj.times[k]);
    out.front.push_back(front.front);
    if (front.front == 0) {
      // Rounding noise in C at t = 0 does not count as a flagged sample.
      const bool nonzero = c.complexity[k] > 1e-12;
      out.flagged.push_back(nonzero);
      out.ratio.push_back(nonzero ? std::numeric_limits<double>::infinity() : 0.0);
      continue;
    }
    out.flagged.push_back(false);
    const double r = c.complexity[k] / static_cast<double>(front.front);
    out.ratio.push_back(r);
    out.max_ratio = std::max(out.max_ratio, r);
  }
  return out;
}

namespace {

double relative_drift(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double worst = 0.0;
  for (double x : v) worst = std::max(worst, std::abs(x - v.front()));
  return worst / std::max(std::abs(v.front()), 1e-300);
}

}  // namespace

std::vector<MomentSeries> moment_conservation(const AmplitudeTrajectory& traj,
                                              const LanczosChain& chain,
                                              const std::vector<int>& orders) {
  const HoppingMatrix a = hopping_matrix(chain);
  std::vector<MomentSeries> out;
  for (int order : orders) {
    if (order < 1) throw ValidationError("moment_conservation: orders must be >= 1");
    MomentSeries m;
    m.order = order;
    // Phi^T A^k Phi = (A^j Phi)^T (A^{k-j} Phi) with j = k / 2, sign (-1)^j.
    const int half = order / 2;
    for (int k = 0; k < traj.samples(); ++k) {
      Eigen::VectorXd left = traj.phi.col(k);
      for (int p = 0; p < half; ++p) left = a.apply(left);
      Eigen::VectorXd right = left;
      if (order % 2 == 1) right = a.apply(right);
      const double sign = (half % 2 == 0) ? 1.0 : -1.0;
      m.values.push_back(sign * left.dot(right));
    }
    if (order % 2 == 0) {
      m.liouvillian_moment = (half % 2 == 0 ? 1.0 : -1.0) * m.values.front();
      m.drift = relative_drift(m.values);
    } else {
      for (double v : m.values) m.drift = std::max(m.drift, std::abs(v));
    }
    out.push_back(std::move(m));
  }
  return out;
}

InvariantSpec InvariantSpec::complexity(int dim) {
  std::vector<double> c(static_cast<std::size_t>(dim));
  std::iota(c.begin(), c.end(), 0.0);
  return diagonal(std::move(c));
}

QuadraticInvariant build_commuting_invariant(const LanczosChain& chain,
                                             const InvariantSpec& spec) {
  const Eigen::MatrixXd a = hopping_matrix(chain).dense();
  const int d = chain.dim;
  QuadraticInvariant inv;

  switch (spec.kind) {
    case InvariantSpec::Kind::Polynomial: {
      const Eigen::MatrixXd a2 = a * a;
      Eigen::MatrixXd power = Eigen::MatrixXd::Identity(d, d);
      inv.matrix = Eigen::MatrixXd::Zero(d, d);
      for (double c : spec.coefficients) {
        inv.matrix += c * power;
        power = power * a2;
      }
      break;
    }
    case InvariantSpec::Kind::Diagonal: {
      if (static_cast<int>(spec.coefficients.size()) != d)
        throw ValidationError("diagonal invariant needs one coefficient per level");
      inv.matrix = Eigen::Map<const Eigen::VectorXd>(spec.coefficients.data(), d).asDiagonal();
      break;
    }
    case InvariantSpec::Kind::Canonical: {
      // -A^2 = A^T A is symmetric PSD with eigenvalues omega_k^2, each rotation
      // block contributing a two-dimensional eigenspace.
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(-(a * a));
      if (eig.info() != Eigen::Success) throw NumericalError("canonical form: eigensolver failed");
      const Eigen::VectorXd lambda = eig.eigenvalues();
      const Eigen::VectorXd w = lambda.cwiseMax(0.0).cwiseSqrt();
      const Eigen::MatrixXd& q = eig.eigenvectors();
      const double scale = std::max(w.maxCoeff(), 1e-300);
      // Null directions are judged on omega^2: rounding of order eps * scale^2
      // becomes sqrt(eps) * scale after the square root.
      const double zero_tol_sq = 1e-12 * scale * scale;
      const double pair_tol = 1e-7 * scale;
      auto is_null = [&](int j) { return lambda(j) <= zero_tol_sq; };

      // Group eigenvalues (ascending) into clusters of equal rate.
      std::vector<std::pair<int, int>> clusters;  // [begin, end)
      for (int j = 0; j < d;) {
        int e = j + 1;
        while (e < d && w(e) - w(e - 1) <= pair_tol) ++e;
        clusters.emplace_back(j, e);
        j = e;
      }
      inv.matrix = Eigen::MatrixXd::Zero(d, d);
      std::size_t next_coefficient = 0;
      double null_coefficient = 0.0;
      int blocks = 0;
      std::vector<std::pair<int, int>> rotation;
      for (const auto& [begin, end] : clusters) {
        if (is_null(begin)) continue;
        rotation.emplace_back(begin, end);
      }
      for (const auto& [begin, end] : rotation) {
        const int size = end - begin;
        if (size % 2 != 0) {
          inv.note += "odd-dimensional rotation cluster; ";
        }
        const int cluster_blocks = std::max(size / 2, 1);
        if (cluster_blocks > 1) {
          inv.merged_blocks = true;
          inv.note += "near-degenerate rotation rates merged into one coefficient; ";
        }
        const double c = next_coefficient < spec.coefficients.size()
                             ? spec.coefficients[next_coefficient]
                             : 0.0;
        next_coefficient += static_cast<std::size_t>(cluster_blocks);
        blocks += cluster_blocks;
        const auto cols = q.middleCols(begin, size);
        inv.matrix += c * cols * cols.transpose();
      }
      if (next_coefficient < spec.coefficients.size())
        null_coefficient = spec.coefficients[next_coefficient];
      for (const auto& [begin, end] : clusters) {
        if (!is_null(begin)) continue;
        const auto cols = q.middleCols(begin, end - begin);
        inv.matrix += null_coefficient * cols * cols.transpose();
      }
      inv.rotation_blocks = blocks;
      break;
    }
  }
  inv.commutator_norm = (a * inv.matrix - inv.matrix * a).norm();
  const double denom = std::max(a.norm() * inv.matrix.norm(), 1e-300);
  inv.relative_commutator = inv.commutator_norm / denom;
  return inv;
}

void evaluate_invariant(QuadraticInvariant& invariant, const AmplitudeTrajectory& traj) {
  if (invariant.matrix.rows() != traj.dim())
    throw ValidationError("evaluate_invariant: dimension mismatch");
  invariant.value_series.clear();
  for (int k = 0; k < traj.samples(); ++k) {
    const auto phi = traj.phi.col(k);
    invariant.value_series.push_back(phi.dot(invariant.matrix * phi));
  }
  invariant.drift = relative_drift(invariant.value_series);
}

BoundsReport bounds_report(const AmplitudeTrajectory& traj,
                           const LanczosChain& chain, bool keep_grid) {
  BoundsReport r;
  r.times = traj.times;
  r.v_op = operator_norm_velocity(chain);
  r.tail = tail_envelope_check(traj, chain, keep_grid);
  r.tail_margin_min = r.tail.min_margin;
  r.front_peak = peak_front(traj);
  r.complexity = krylov_complexity(traj);
  const GrowthRateResult g = growth_rate_bound_check(traj, chain);
  r.growth_rate_margin = g.min_margin;
  r.growth_rate_scaled_margin = g.min_scaled_margin;
  const FrontRatioResult ratio = complexity_front_ratio(traj, chain);
  r.front_geometric = ratio.front;
  r.complexity_ratio_series = ratio.ratio;
  return r;
}

}  // namespace ksphere
