#pragma once

// Independent reference implementations used only by tests. None of these
// call into the library code paths they are used to check.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace farm::oracle {

/// (c + 1) / (s + 2) with c from a full linear scan.
inline double scan_cdf(const std::vector<double>& reference, double x) {
  std::size_t c = 0;
  for (double v : reference) {
    if (v < x) ++c;
  }
  return static_cast<double>(c + 1) / static_cast<double>(reference.size() + 2);
}

/// Recomputes the whole CUSUM trajectory from t = 1 for every t and returns
/// V(1..T). references[i] is unsorted; samples[t][i].
inline std::vector<double> naive_global_trajectory(const std::vector<std::vector<double>>& references,
                                                   const std::vector<std::vector<double>>& samples, double k,
                                                   std::size_t r) {
  const auto p = references.size();
  std::vector<double> out;
  for (std::size_t t_end = 1; t_end <= samples.size(); ++t_end) {
    std::vector<double> wp(p, 0.0);
    std::vector<double> wm(p, 0.0);
    for (std::size_t t = 0; t < t_end; ++t) {
      for (std::size_t i = 0; i < p; ++i) {
        const double mu = scan_cdf(references[i], samples[t][i]);
        wp[i] = std::max(wp[i] - std::log(1.0 - mu) - k, 0.0);
        wm[i] = std::max(wm[i] - std::log(mu) - k, 0.0);
      }
    }
    std::vector<double> w(p);
    for (std::size_t i = 0; i < p; ++i) w[i] = std::max(wp[i], wm[i]);
    std::sort(w.begin(), w.end(), std::greater<>());
    double v = 0.0;
    for (std::size_t i = 0; i < r; ++i) v += w[i];
    out.push_back(v);
  }
  return out;
}

/// Random SPD matrix with eigenvalues log-uniform in [1, condition].
inline Eigen::MatrixXd random_spd(std::mt19937_64& gen, int p, double condition, double scale = 1.0) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) a(i, j) = g(gen);
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
  std::uniform_real_distribution<double> u(0.0, std::log(condition));
  Eigen::VectorXd ev(p);
  for (int i = 0; i < p; ++i) ev(i) = scale * std::exp(u(gen));
  if (p > 1) {
    ev(0) = scale;
    ev(1) = scale * condition;
  }
  Eigen::MatrixXd m = q * ev.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

/// Schur-based principal square root (Eigen unsupported module), not the
/// eigendecomposition route used by the library.
inline Eigen::MatrixXd schur_sqrt(const Eigen::MatrixXd& a) { return a.sqrt(); }

inline Eigen::MatrixXd geodesic_midpoint(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd a_half = schur_sqrt(a);
  const Eigen::MatrixXd a_inv_half = a_half.inverse();
  const Eigen::MatrixXd inner = a_inv_half * b * a_inv_half;
  const Eigen::MatrixXd mid = a_half * schur_sqrt(0.5 * (inner + inner.transpose())) * a_half;
  return 0.5 * (mid + mid.transpose());
}

/// Dual SVM objective sum(alpha) - 1/2 alpha^T Q alpha, Q_ij = y_i y_j K_ij.
inline double dual_objective(const Eigen::MatrixXd& q, const Eigen::VectorXd& alpha) {
  return alpha.sum() - 0.5 * alpha.dot(q * alpha);
}

/// Euclidean projection onto {0 <= a <= C, y^T a = 0} by bisection on the
/// multiplier of the equality constraint.
inline Eigen::VectorXd project_box_hyperplane(const Eigen::VectorXd& v, const Eigen::VectorXd& y, double c) {
  auto clip = [&](double lambda) {
    Eigen::VectorXd a(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) a(i) = std::clamp(v(i) - lambda * y(i), 0.0, c);
    return a;
  };
  double lo = -1.0;
  double hi = 1.0;
  while (y.dot(clip(lo)) < 0.0) lo *= 2.0;
  while (y.dot(clip(hi)) > 0.0) hi *= 2.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (y.dot(clip(mid)) > 0.0) lo = mid;
    else hi = mid;
  }
  return clip(0.5 * (lo + hi));
}

/// Accelerated projected gradient ascent on the SVM dual with momentum
/// restarts whenever the objective drops; returns the best value found.
inline double projected_gradient_dual(const Eigen::MatrixXd& kernel, const Eigen::VectorXd& y, double c,
                                      int iterations = 20000) {
  const Eigen::MatrixXd q = (y * y.transpose()).cwiseProduct(kernel);
  const double lipschitz = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q).eigenvalues().maxCoeff();
  const double step = 1.0 / std::max(lipschitz, 1e-12);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(y.size());
  Eigen::VectorXd z = x;
  double t = 1.0;
  double best = dual_objective(q, x);
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd grad = Eigen::VectorXd::Ones(y.size()) - q * z;
    const Eigen::VectorXd next = project_box_hyperplane(z + step * grad, y, c);
    const double value = dual_objective(q, next);
    if (value < dual_objective(q, x)) {
      z = x;
      t = 1.0;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = next + ((t - 1.0) / t_next) * (next - x);
    x = next;
    t = t_next;
    best = std::max(best, value);
  }
  return best;
}

}  // namespace farm::oracle
