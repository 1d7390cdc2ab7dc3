#pragma once

// Geometry of symmetric positive-definite matrices: window covariance,
// logarithmic/exponential maps, the Karcher mean and the tangent-vector
// flattening used as classifier features.

#include "farm/error.hpp"
#include "farm/types.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace farm {

enum class Metric { AffineInvariant, LogEuclidean };

constexpr std::string_view to_string(Metric m) noexcept {
  return m == Metric::AffineInvariant ? "affine_invariant" : "log_euclidean";
}

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a) { return 0.5 * (a + a.transpose()); }

inline bool is_symmetric(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) return false;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      if (std::abs(a(i, j) - a(j, i)) > 1e-12 * std::max(1.0, std::abs(a(i, j)))) return false;
    }
  }
  return true;
}

/// Extended-precision matrices for the affine-invariant maps, whose
/// whitening step loses about log10(condition) digits.
using MatrixXe = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXe = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

/// Eigendecomposition of (A + A^T) / 2.
template <typename Scalar>
struct BasicSymmetricEigen {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector values;
  Matrix vectors;

  explicit BasicSymmetricEigen(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver((a + a.transpose()) / Scalar(2));
    if (solver.info() != Eigen::Success) throw Error(ErrorKind::EigenFailure, "symmetric eigensolver");
    values = solver.eigenvalues();
    vectors = solver.eigenvectors();
  }

  template <typename F>
  Matrix apply(F&& f) const {
    const Vector mapped = values.unaryExpr(f);
    const Matrix out = vectors * mapped.asDiagonal() * vectors.transpose();
    return (out + out.transpose()) / Scalar(2);
  }
};

using SymmetricEigen = BasicSymmetricEigen<double>;
using ExtendedEigen = BasicSymmetricEigen<long double>;

class SpdMatrix {
 public:
  /// Validates symmetry and strict positive definiteness.
  explicit SpdMatrix(Eigen::MatrixXd m, std::string_view what = "matrix") {
    if (m.rows() != m.cols() || m.rows() == 0) {
      throw Error(ErrorKind::NotSpd, std::string(what) + " is not a non-empty square matrix");
    }
    if (!m.allFinite()) throw Error(ErrorKind::NotSpd, std::string(what) + " has non-finite entries");
    if (!is_symmetric(m)) throw Error(ErrorKind::NotSpd, std::string(what) + " is not symmetric");
    m = symmetrize(m);
    const SymmetricEigen eig(m);
    if (!(eig.values.minCoeff() > 0.0)) {
      throw Error(ErrorKind::NotSpd, std::string(what) + " has smallest eigenvalue " +
                                         std::to_string(eig.values.minCoeff()));
    }
    m_ = std::move(m);
  }

  /// For results that are SPD by construction (congruences of exponentials).
  static SpdMatrix trusted(const Eigen::MatrixXd& m) {
    SpdMatrix out;
    out.m_ = symmetrize(m);
    return out;
  }

  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  Eigen::Index dim() const noexcept { return m_.rows(); }

  bool operator==(const SpdMatrix& other) const { return m_ == other.m_; }

 private:
  SpdMatrix() = default;
  Eigen::MatrixXd m_;
};

/// Upper triangle, row-major, off-diagonals scaled by sqrt(2) so the
/// Euclidean norm of the result equals the Frobenius norm of s.
inline Eigen::VectorXd tangent_vectorize(const Eigen::MatrixXd& s) {
  if (!is_symmetric(s)) throw Error(ErrorKind::NotSymmetric, "tangent_vectorize input");
  const auto p = s.rows();
  Eigen::VectorXd flat(p * (p + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < p; ++i) {
    flat(k++) = s(i, i);
    for (Eigen::Index j = i + 1; j < p; ++j) flat(k++) = std::numbers::sqrt2 * s(i, j);
  }
  return flat;
}

inline Eigen::MatrixXd tangent_unvectorize(const Eigen::VectorXd& flat) {
  // p(p+1)/2 = n  =>  p = (sqrt(8n+1) - 1) / 2
  const auto n = flat.size();
  const auto p = static_cast<Eigen::Index>(std::llround((std::sqrt(8.0 * static_cast<double>(n) + 1.0) - 1.0) / 2.0));
  if (p * (p + 1) / 2 != n) throw Error(ErrorKind::DimensionMismatch, "flat length is not triangular");
  Eigen::MatrixXd s(p, p);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < p; ++i) {
    s(i, i) = flat(k++);
    for (Eigen::Index j = i + 1; j < p; ++j) {
      s(i, j) = s(j, i) = flat(k++) / std::numbers::sqrt2;
    }
  }
  return s;
}

struct TangentVector {
  Eigen::MatrixXd sym;
  Eigen::VectorXd flat;
  MatrixXe extended;  // sym before rounding to double

  explicit TangentVector(Eigen::MatrixXd s)
      : sym(std::move(s)), flat(tangent_vectorize(sym)), extended(sym.cast<long double>()) {}
  explicit TangentVector(const MatrixXe& s)
      : sym(s.cast<double>()), flat(tangent_vectorize(sym)), extended(s) {}
};

/// Log/exp maps at a fixed base point; caches the base square roots so many
/// matrices can be mapped against the same base.
class TangentSpace {
 public:
  explicit TangentSpace(const SpdMatrix& base, Metric metric = Metric::AffineInvariant)
      : base_(base), metric_(metric) {
    if (metric_ == Metric::AffineInvariant) {
      const ExtendedEigen eig(base.matrix().cast<long double>());
      sqrt_ = eig.apply([](long double v) { return std::sqrt(v); });
      inv_sqrt_ = eig.apply([](long double v) { return 1.0L / std::sqrt(v); });
    } else {
      const SymmetricEigen eig(base.matrix());
      log_base_ = eig.apply([](double v) { return std::log(v); });
    }
  }

  const SpdMatrix& base() const noexcept { return base_; }
  Metric metric() const noexcept { return metric_; }

  TangentVector log(const SpdMatrix& x) const {
    check_dim(x.matrix());
    if (metric_ == Metric::LogEuclidean) {
      const SymmetricEigen eig(x.matrix());
      return TangentVector(symmetrize(eig.apply([](double v) { return std::log(v); }) - log_base_));
    }
    const ExtendedEigen inner(inv_sqrt_ * x.matrix().cast<long double>() * inv_sqrt_);
    if (!(inner.values.minCoeff() > 0.0L)) throw Error(ErrorKind::NotSpd, "whitened matrix lost definiteness");
    const MatrixXe l = inner.apply([](long double v) { return std::log(v); });
    const MatrixXe s = sqrt_ * l * sqrt_;
    return TangentVector(MatrixXe((s + s.transpose()) / 2.0L));
  }

  SpdMatrix exp(const Eigen::MatrixXd& s) const {
    check_dim(s);
    if (!is_symmetric(s)) throw Error(ErrorKind::NotSymmetric, "tangent matrix");
    if (metric_ == Metric::LogEuclidean) {
      const SymmetricEigen eig(log_base_ + s);
      return SpdMatrix::trusted(eig.apply([](double v) { return std::exp(v); }));
    }
    return exp_affine(s.cast<long double>());
  }

  /// Uses the unrounded tangent, so exp(log(X)) is accurate even when the
  /// base is badly conditioned.
  SpdMatrix exp(const TangentVector& v) const {
    if (metric_ == Metric::LogEuclidean) return exp(v.sym);
    check_dim(v.sym);
    return exp_affine(v.extended);
  }

 private:
  SpdMatrix exp_affine(const MatrixXe& s) const {
    const ExtendedEigen inner(inv_sqrt_ * s * inv_sqrt_);
    const MatrixXe e = inner.apply([](long double v) { return std::exp(v); });
    return SpdMatrix::trusted((sqrt_ * e * sqrt_).cast<double>());
  }

  void check_dim(const Eigen::MatrixXd& m) const {
    if (m.rows() != base_.dim() || m.cols() != base_.dim()) {
      throw Error(ErrorKind::DimensionMismatch, "matrix dimension differs from base");
    }
  }

  SpdMatrix base_;
  Metric metric_;
  MatrixXe sqrt_;
  MatrixXe inv_sqrt_;
  Eigen::MatrixXd log_base_;
};

inline TangentVector spd_log(const SpdMatrix& base, const SpdMatrix& x, Metric metric = Metric::AffineInvariant) {
  return TangentSpace(base, metric).log(x);
}

inline SpdMatrix spd_exp(const SpdMatrix& base, const Eigen::MatrixXd& s, Metric metric = Metric::AffineInvariant) {
  return TangentSpace(base, metric).exp(s);
}

inline SpdMatrix spd_exp(const SpdMatrix& base, const TangentVector& v, Metric metric = Metric::AffineInvariant) {
  return TangentSpace(base, metric).exp(v);
}

/// Affine-invariant distance ||logm(A^-1/2 B A^-1/2)||_F.
inline double spd_distance(const SpdMatrix& a, const SpdMatrix& b) {
  const ExtendedEigen ea(a.matrix().cast<long double>());
  const MatrixXe inv_sqrt = ea.apply([](long double v) { return 1.0L / std::sqrt(v); });
  const ExtendedEigen inner(inv_sqrt * b.matrix().cast<long double>() * inv_sqrt);
  return static_cast<double>(std::sqrt(inner.values.array().log().square().sum()));
}

struct CovarianceResult {
  SpdMatrix matrix;
  bool regularized = false;
};

inline constexpr double kShrinkage = 1e-6;

/// Sample covariance (divisor rows - 1). When the smallest eigenvalue falls
/// below 1e-10 * trace / p, adds kShrinkage * (trace / p) * I; a window of
/// identical rows (trace 0) gets kShrinkage * I.
inline CovarianceResult covariance(const DataMatrix& window) {
  const auto n = window.rows();
  const auto p = window.cols();
  if (n < 2) throw Error(ErrorKind::WindowTooShort, "window has " + std::to_string(n) + " rows");
  if (p < 1) throw Error(ErrorKind::EmptyInput, "window has no streams");
  if (!window.allFinite()) throw Error(ErrorKind::NonFiniteValue, "covariance window");
  const Eigen::RowVectorXd mean = window.colwise().mean();
  const Eigen::MatrixXd centered = window.rowwise() - mean;
  Eigen::MatrixXd cov = symmetrize(centered.transpose() * centered / static_cast<double>(n - 1));

  const double scale = cov.trace() / static_cast<double>(p);
  const SymmetricEigen eig(cov);
  if (eig.values.minCoeff() < 1e-10 * scale || !(scale > 0.0)) {
    const double ridge = scale > 0.0 ? kShrinkage * scale : kShrinkage;
    cov.diagonal().array() += ridge;
    return {SpdMatrix(std::move(cov), "regularized covariance"), true};
  }
  return {SpdMatrix(std::move(cov), "covariance"), false};
}

struct KarcherResult {
  SpdMatrix mean;
  std::size_t iterations = 0;
  double residual = 0.0;  // Frobenius norm of the mean tangent at `mean`
};

/// Fixed-point iteration C <- exp_C(mean_m log_C(C_m)) from the arithmetic
/// mean, until ||mean tangent||_F < 1e-6 * p. Throws NoConvergence after
/// max_iterations.
inline KarcherResult karcher_mean_detailed(const std::vector<SpdMatrix>& mats,
                                           Metric metric = Metric::AffineInvariant,
                                           std::size_t max_iterations = 100) {
  if (mats.empty()) throw Error(ErrorKind::EmptyInput, "karcher_mean of no matrices");
  const auto p = mats.front().dim();
  Eigen::MatrixXd arithmetic = Eigen::MatrixXd::Zero(p, p);
  for (const auto& m : mats) {
    if (m.dim() != p) throw Error(ErrorKind::DimensionMismatch, "karcher_mean inputs differ in size");
    arithmetic += m.matrix();
  }
  arithmetic /= static_cast<double>(mats.size());
  SpdMatrix current = SpdMatrix::trusted(arithmetic);
  const double tol = 1e-6 * static_cast<double>(p);
  const double inv_m = 1.0 / static_cast<double>(mats.size());

  for (std::size_t iter = 0; iter <= max_iterations; ++iter) {
    const TangentSpace space(current, metric);
    Eigen::MatrixXd step = Eigen::MatrixXd::Zero(p, p);
    for (const auto& m : mats) step += space.log(m).sym;
    step = symmetrize(step * inv_m);
    const double residual = step.norm();
    if (residual < tol) return {current, iter, residual};
    if (iter == max_iterations) break;
    current = space.exp(step);
  }
  throw Error(ErrorKind::NoConvergence,
              "Karcher mean did not converge in " + std::to_string(max_iterations) + " iterations");
}

inline SpdMatrix karcher_mean(const std::vector<SpdMatrix>& mats, Metric metric = Metric::AffineInvariant) {
  return karcher_mean_detailed(mats, metric).mean;
}

}  // namespace farm
