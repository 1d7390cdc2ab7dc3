#pragma once

// RBF-kernel soft-margin SVM solved with SMO (maximal violating pair),
// one-vs-one multiclass voting, and stratified k-fold grid search.

#include "farm/error.hpp"
#include "farm/parallel.hpp"
#include "farm/rng.hpp"
#include "farm/types.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace farm {

inline double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
  if (x.size() != y.size()) throw Error(ErrorKind::DimensionMismatch, "rbf_kernel operand lengths differ");
  if (!(gamma > 0.0)) throw Error(ErrorKind::BadConfig, "gamma must be positive");
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

struct BinaryModel {
  DataMatrix support_vectors;  // one row per support vector
  std::vector<double> dual_coefs;  // alpha_i * y_i
  double bias = 0.0;
  double gamma = 1.0;
  double c_penalty = 1.0;

  /// Sum_i coef_i K(sv_i, x) + b; positive means the +1 class.
  double decision(std::span<const double> x) const {
    if (static_cast<Eigen::Index>(x.size()) != support_vectors.cols()) {
      throw Error(ErrorKind::DimensionMismatch, "decision input dimension");
    }
    double f = bias;
    for (Eigen::Index i = 0; i < support_vectors.rows(); ++i) {
      f += dual_coefs[i] * rbf_kernel(row_span(support_vectors, i), x, gamma);
    }
    return f;
  }

  bool operator==(const BinaryModel&) const = default;
};

struct SmoOptions {
  double tolerance = 1e-5;  // max violating-pair gap at termination
  double alpha_epsilon = 1e-8;
  std::uint64_t max_iterations = 0;  // 0 means 10^4 * N
};

struct BinaryTraining {
  BinaryModel model;
  std::vector<double> alphas;  // full dual vector, one per training point
  double dual_objective = 0.0;  // sum(alpha) - 1/2 alpha^T Q alpha
  double kkt_gap = 0.0;  // max violation m(alpha) - M(alpha) at exit
  std::uint64_t iterations = 0;
};

inline Eigen::MatrixXd rbf_gram(const DataMatrix& features, double gamma) {
  const auto n = features.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      k(i, j) = k(j, i) = rbf_kernel(row_span(features, i), row_span(features, j), gamma);
    }
  }
  return k;
}

inline BinaryTraining train_binary_detailed(const DataMatrix& features, const std::vector<int>& labels,
                                            double c_penalty, double gamma, const SmoOptions& opts = {}) {
  const auto n = features.rows();
  if (static_cast<std::size_t>(n) != labels.size()) {
    throw Error(ErrorKind::DimensionMismatch, "features and labels differ in length");
  }
  if (n < 2) throw Error(ErrorKind::SingleClass, "need at least two training points");
  bool has_pos = false;
  bool has_neg = false;
  for (int y : labels) {
    if (y == 1) has_pos = true;
    else if (y == -1) has_neg = true;
    else throw Error(ErrorKind::BadConfig, "binary labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw Error(ErrorKind::SingleClass, "both classes must be present");
  if (!(c_penalty > 0.0)) throw Error(ErrorKind::BadConfig, "C must be positive");

  const Eigen::MatrixXd kern = rbf_gram(features, gamma);
  const std::vector<double> y(labels.begin(), labels.end());
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // Q alpha - e
  const double c = c_penalty;
  constexpr double kTau = 1e-12;
  const std::uint64_t cap = opts.max_iterations ? opts.max_iterations : 10000ULL * static_cast<std::uint64_t>(n);

  auto in_up = [&](Eigen::Index t) { return (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0); };
  auto in_low = [&](Eigen::Index t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c); };

  BinaryTraining out;
  std::uint64_t iter = 0;
  double gap = 0.0;
  for (;; ++iter) {
    Eigen::Index i = -1;
    Eigen::Index j = -1;
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > m_up) { m_up = v; i = t; }
      if (in_low(t) && v < m_low) { m_low = v; j = t; }
    }
    gap = m_up - m_low;
    if (i < 0 || j < 0 || gap < opts.tolerance) break;
    if (iter >= cap) {
      throw Error(ErrorKind::NoConvergence, "SMO exceeded " + std::to_string(cap) + " iterations");
    }

    const double qij = y[i] * y[j] * kern(i, j);
    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = kern(i, i) + kern(j, j) + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = -diff; }
      }
      if (diff > 0.0) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = c - diff; }
      } else {
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = c + diff; }
      }
    } else {
      double quad = kern(i, i) + kern(j, j) - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = sum - c; }
      } else {
        if (alpha[j] < 0.0) { alpha[j] = 0.0; alpha[i] = sum; }
      }
      if (sum > c) {
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = sum - c; }
      } else {
        if (alpha[i] < 0.0) { alpha[i] = 0.0; alpha[j] = sum; }
      }
    }
    const double dai = alpha[i] - old_ai;
    const double daj = alpha[j] - old_aj;
    for (Eigen::Index t = 0; t < n; ++t) {
      grad[t] += y[t] * (y[i] * kern(t, i) * dai + y[j] * kern(t, j) * daj);
    }
  }

  // Bias from free vectors; fall back to the midpoint of the feasible interval.
  double free_sum = 0.0;
  std::size_t free_count = 0;
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] > 0.0 && alpha[t] < c) {
      free_sum += yg;
      ++free_count;
    } else if ((alpha[t] >= c && y[t] < 0) || (alpha[t] <= 0.0 && y[t] > 0)) {
      ub = std::min(ub, yg);
    } else {
      lb = std::max(lb, yg);
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (ub + lb);

  double objective = 0.0;
  for (Eigen::Index t = 0; t < n; ++t) objective += alpha[t] - 0.5 * alpha[t] * (grad[t] + 1.0);

  std::vector<Eigen::Index> sv;
  for (Eigen::Index t = 0; t < n; ++t) {
    if (alpha[t] > opts.alpha_epsilon) sv.push_back(t);
  }
  BinaryModel& model = out.model;
  model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), features.cols());
  model.dual_coefs.resize(sv.size());
  for (std::size_t s = 0; s < sv.size(); ++s) {
    model.support_vectors.row(static_cast<Eigen::Index>(s)) = features.row(sv[s]);
    model.dual_coefs[s] = alpha[sv[s]] * y[sv[s]];
  }
  model.bias = -rho;
  model.gamma = gamma;
  model.c_penalty = c;
  out.alphas = std::move(alpha);
  out.dual_objective = objective;
  out.kkt_gap = gap;
  out.iterations = iter;
  return out;
}

inline BinaryModel train_binary(const DataMatrix& features, const std::vector<int>& labels, double c_penalty,
                                double gamma) {
  return train_binary_detailed(features, labels, c_penalty, gamma).model;
}

/// Per-feature z-scoring fit on the training features. Zero-variance
/// features keep scale 1.
struct FeatureScaling {
  std::vector<double> mean;
  std::vector<double> scale;

  static FeatureScaling fit(const DataMatrix& features) {
    FeatureScaling s;
    const auto n = static_cast<double>(features.rows());
    s.mean.resize(features.cols());
    s.scale.resize(features.cols());
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      const double m = features.col(j).mean();
      const double var = (features.col(j).array() - m).square().sum() / n;
      s.mean[j] = m;
      s.scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return s;
  }

  std::vector<double> transform(std::span<const double> x) const {
    if (x.size() != mean.size()) throw Error(ErrorKind::DimensionMismatch, "feature dimension");
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
    return out;
  }

  DataMatrix transform(const DataMatrix& x) const {
    DataMatrix out(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const auto row = transform(row_span(x, i));
      std::copy(row.begin(), row.end(), row_span(out, i).begin());
    }
    return out;
  }

  bool operator==(const FeatureScaling&) const = default;
};

struct PairModel {
  int label_a = 0;  // +1 side
  int label_b = 0;  // -1 side
  BinaryModel model;

  bool operator==(const PairModel&) const = default;
};

struct MulticlassModel {
  std::vector<int> labels;  // ascending
  FeatureScaling feature_scaling;
  std::vector<PairModel> pairs;

  std::size_t dimension() const noexcept { return feature_scaling.mean.size(); }

  bool operator==(const MulticlassModel&) const = default;
};

inline MulticlassModel train_multiclass(const DataMatrix& features, const std::vector<int>& labels,
                                        double c_penalty, double gamma) {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw Error(ErrorKind::DimensionMismatch, "features and labels differ in length");
  }
  const std::set<int> distinct(labels.begin(), labels.end());
  if (distinct.size() < 2) throw Error(ErrorKind::SingleClass, "need at least two fault labels");

  MulticlassModel model;
  model.labels.assign(distinct.begin(), distinct.end());
  model.feature_scaling = FeatureScaling::fit(features);
  const DataMatrix scaled = model.feature_scaling.transform(features);

  std::vector<std::pair<int, int>> pairs;
  for (std::size_t a = 0; a < model.labels.size(); ++a) {
    for (std::size_t b = a + 1; b < model.labels.size(); ++b) pairs.emplace_back(model.labels[a], model.labels[b]);
  }
  model.pairs.resize(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t k) {
    const auto [la, lb] = pairs[k];
    std::vector<Eigen::Index> rows;
    std::vector<int> y;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == la || labels[i] == lb) {
        rows.push_back(static_cast<Eigen::Index>(i));
        y.push_back(labels[i] == la ? 1 : -1);
      }
    }
    DataMatrix subset(static_cast<Eigen::Index>(rows.size()), scaled.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) subset.row(static_cast<Eigen::Index>(r)) = scaled.row(rows[r]);
    model.pairs[k] = PairModel{la, lb, train_binary(subset, y, c_penalty, gamma)};
  });
  return model;
}

/// One-vs-one vote. Ties go to the label with the largest summed |decision|
/// over the votes it won, then to the smallest label.
inline int predict(const MulticlassModel& model, std::span<const double> x) {
  if (x.size() != model.dimension()) {
    throw Error(ErrorKind::DimensionMismatch,
                "expected " + std::to_string(model.dimension()) + " features, got " + std::to_string(x.size()));
  }
  const auto scaled = model.feature_scaling.transform(x);
  std::map<int, std::pair<int, double>> tally;  // label -> (votes, margin)
  for (int l : model.labels) tally[l] = {0, 0.0};
  for (const auto& pair : model.pairs) {
    const double f = pair.model.decision(scaled);
    const int winner = f > 0.0 ? pair.label_a : pair.label_b;
    tally[winner].first += 1;
    tally[winner].second += std::abs(f);
  }
  int best = model.labels.front();
  for (const auto& [label, score] : tally) {
    const auto& cur = tally[best];
    if (score.first > cur.first || (score.first == cur.first && score.second > cur.second)) best = label;
  }
  return best;
}

struct GridPoint {
  double c_penalty = 0.0;
  double gamma = 0.0;
  double cv_accuracy = 0.0;
};

struct GridSearchResult {
  double c_penalty = 0.0;
  double gamma = 0.0;
  double cv_accuracy = 0.0;
  std::vector<GridPoint> table;
};

/// Fold index per sample; each class is shuffled with its own counter stream
/// and dealt round-robin across folds.
inline std::vector<std::size_t> stratified_folds(const std::vector<int>& labels, std::size_t folds,
                                                 std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  std::vector<std::size_t> fold(labels.size(), 0);
  for (auto& [label, idx] : by_class) {
    if (idx.size() < folds) {
      throw Error(ErrorKind::TooFewPerClass, "label " + std::to_string(label) + " has " +
                                                 std::to_string(idx.size()) + " samples for " +
                                                 std::to_string(folds) + " folds");
    }
    auto rng = CounterRng::at(seed, static_cast<std::uint64_t>(static_cast<std::int64_t>(label)));
    for (std::size_t k = idx.size(); k > 1; --k) std::swap(idx[k - 1], idx[rng.index(k)]);
    for (std::size_t k = 0; k < idx.size(); ++k) fold[idx[k]] = k % folds;
  }
  return fold;
}

inline std::vector<double> default_c_grid() { return {0.1, 1.0, 10.0, 100.0}; }

inline std::vector<double> default_gamma_grid(std::size_t dimension) {
  const double base = 1.0 / static_cast<double>(std::max<std::size_t>(dimension, 1));
  return {0.1 * base, base, 10.0 * base};
}

inline GridSearchResult grid_search(const DataMatrix& features, const std::vector<int>& labels,
                                    std::vector<double> c_grid, std::vector<double> gamma_grid,
                                    std::size_t folds = 5, std::uint64_t seed = 0) {
  if (folds < 2) throw Error(ErrorKind::BadConfig, "need at least 2 folds");
  if (c_grid.empty() || gamma_grid.empty()) throw Error(ErrorKind::BadConfig, "empty grid");
  std::sort(c_grid.begin(), c_grid.end());
  std::sort(gamma_grid.begin(), gamma_grid.end());
  const auto fold = stratified_folds(labels, folds, seed);

  GridSearchResult result;
  result.table.resize(c_grid.size() * gamma_grid.size());
  parallel_for(result.table.size(), [&](std::size_t g) {
    const double c = c_grid[g / gamma_grid.size()];
    const double gamma = gamma_grid[g % gamma_grid.size()];
    std::size_t correct = 0;
    for (std::size_t f = 0; f < folds; ++f) {
      std::vector<Eigen::Index> train_rows;
      std::vector<Eigen::Index> test_rows;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        (fold[i] == f ? test_rows : train_rows).push_back(static_cast<Eigen::Index>(i));
      }
      DataMatrix train(static_cast<Eigen::Index>(train_rows.size()), features.cols());
      std::vector<int> train_labels;
      for (std::size_t r = 0; r < train_rows.size(); ++r) {
        train.row(static_cast<Eigen::Index>(r)) = features.row(train_rows[r]);
        train_labels.push_back(labels[train_rows[r]]);
      }
      const auto model = train_multiclass(train, train_labels, c, gamma);
      for (auto r : test_rows) {
        if (predict(model, row_span(features, r)) == labels[r]) ++correct;
      }
    }
    result.table[g] = {c, gamma, static_cast<double>(correct) / static_cast<double>(labels.size())};
  });

  // Table order is C ascending then gamma ascending; strict improvement keeps the smaller pair on ties.
  const GridPoint* best = &result.table.front();
  for (const auto& point : result.table) {
    if (point.cv_accuracy > best->cv_accuracy) best = &point;
  }
  result.c_penalty = best->c_penalty;
  result.gamma = best->gamma;
  result.cv_accuracy = best->cv_accuracy;
  return result;
}

}  // namespace farm
