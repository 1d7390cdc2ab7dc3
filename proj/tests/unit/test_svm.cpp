#include "farm/svm.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using farm::DataMatrix;

namespace {

DataMatrix rows(std::initializer_list<std::initializer_list<double>> r) {
  DataMatrix m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

struct Blobs {
  DataMatrix x;
  std::vector<int> y;
};

Blobs blobs(std::uint64_t seed, int per_class, double spread) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, spread);
  const double centers[3][2] = {{0, 0}, {5, 0}, {0, 5}};
  Blobs b;
  b.x.resize(3 * per_class, 2);
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < per_class; ++i) {
      b.x(c * per_class + i, 0) = centers[c][0] + g(gen);
      b.x(c * per_class + i, 1) = centers[c][1] + g(gen);
      b.y.push_back(c + 1);
    }
  }
  return b;
}

}  // namespace

TEST(RbfKernel, Examples) {
  const std::vector<double> x{1.0, 2.0};
  const std::vector<double> y{1.0, 3.0};
  EXPECT_EQ(farm::rbf_kernel(x, x, 0.7), 1.0);
  EXPECT_DOUBLE_EQ(farm::rbf_kernel(x, y, 1.0), std::exp(-1.0));
  EXPECT_EQ(farm::rbf_kernel(x, y, 0.3), farm::rbf_kernel(y, x, 0.3));
  const std::vector<double> z{1.0};
  EXPECT_THROW(farm::rbf_kernel(x, z, 1.0), farm::Error);
}

TEST(TrainBinary, SeparablePairAndXor) {
  const auto pair = farm::train_binary(rows({{-1}, {1}}), {-1, 1}, 10.0, 1.0);
  const std::vector<double> lo{-1.0}, hi{1.0};
  EXPECT_LT(pair.decision(lo), 0.0);
  EXPECT_GT(pair.decision(hi), 0.0);

  const DataMatrix xor_x = rows({{0, 0}, {1, 1}, {0, 1}, {1, 0}});
  const std::vector<int> xor_y{1, 1, -1, -1};
  const auto model = farm::train_binary(xor_x, xor_y, 10.0, 1.0);
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_GT(model.decision(farm::row_span(xor_x, i)) * xor_y[i], 0.0) << "point " << i;
  }
}

TEST(TrainBinary, Errors) {
  try {
    farm::train_binary(rows({{0}, {1}}), {1, 1}, 1.0, 1.0);
    FAIL();
  } catch (const farm::Error& e) {
    EXPECT_EQ(e.kind(), farm::ErrorKind::SingleClass);
  }
  EXPECT_THROW(farm::train_binary(rows({{0}, {1}}), {1}, 1.0, 1.0), farm::Error);
}

TEST(TrainBinary, MatchesProjectedGradientOracleAndIsFeasible) {
  std::mt19937_64 gen(31);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 4 + static_cast<int>(gen() % 17);
    const int d = 1 + static_cast<int>(gen() % 4);
    DataMatrix x(n, d);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) {
      y[i] = i % 2 == 0 ? 1 : -1;
      for (int j = 0; j < d; ++j) x(i, j) = g(gen) + 0.5 * y[i];
    }
    const double c = std::vector<double>{0.5, 1.0, 5.0}[trial % 3];
    const double gamma = std::vector<double>{0.3, 1.0}[trial % 2];
    const auto res = farm::train_binary_detailed(x, y, c, gamma);
    Eigen::VectorXd yv(n);
    for (int i = 0; i < n; ++i) yv(i) = y[i];
    const double oracle = farm::oracle::projected_gradient_dual(farm::rbf_gram(x, gamma), yv, c, 4000);
    EXPECT_NEAR(res.dual_objective, oracle, 1e-4) << "trial " << trial;
    double balance = 0.0;
    for (int i = 0; i < n; ++i) {
      EXPECT_GE(res.alphas[i], 0.0);
      EXPECT_LE(res.alphas[i], c);
      balance += res.alphas[i] * y[i];
    }
    EXPECT_LE(std::abs(balance), 1e-6);
    EXPECT_LT(res.kkt_gap, 1e-3);
  }
}

TEST(TrainBinary, DuplicatingNonSupportPointLeavesDecisionUnchanged) {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> g;
  DataMatrix x(40, 2);
  std::vector<int> y(40);
  for (int i = 0; i < 40; ++i) {
    y[i] = i < 20 ? -1 : 1;
    x(i, 0) = g(gen) + 2.0 * y[i];
    x(i, 1) = g(gen);
  }
  const auto base = farm::train_binary_detailed(x, y, 10.0, 0.5);
  // Pick the interior point with the largest margin; it carries no weight.
  Eigen::Index pick = -1;
  double best = 1.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double margin = y[i] * base.model.decision(farm::row_span(x, i));
    if (base.alphas[i] == 0.0 && margin > best) {
      best = margin;
      pick = i;
    }
  }
  ASSERT_GE(pick, 0);
  ASSERT_GT(best, 1.01);
  DataMatrix x2(41, 2);
  x2.topRows(40) = x;
  x2.row(40) = x.row(pick);
  auto y2 = y;
  y2.push_back(y[pick]);
  const auto dup = farm::train_binary(x2, y2, 10.0, 0.5);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int k = 0; k < 50; ++k) {
    const std::vector<double> v{u(gen), u(gen)};
    EXPECT_NEAR(base.model.decision(v), dup.decision(v), 1e-3);
  }
}

TEST(Multiclass, BlobsTrainPerfectlyWithThreePairs) {
  const auto b = blobs(1, 30, 0.6);
  const auto model = farm::train_multiclass(b.x, b.y, 10.0, 0.5);
  EXPECT_EQ(model.pairs.size(), 3u);
  for (Eigen::Index i = 0; i < b.x.rows(); ++i) EXPECT_EQ(farm::predict(model, farm::row_span(b.x, i)), b.y[i]);
}

TEST(Multiclass, TwoLabelsReduceToBinary) {
  const DataMatrix x = rows({{-2}, {-1}, {1}, {2}});
  const auto model = farm::train_multiclass(x, {3, 3, 7, 7}, 10.0, 1.0);
  ASSERT_EQ(model.pairs.size(), 1u);
  const auto scaled = model.feature_scaling.transform(x);
  const auto binary = farm::train_binary(scaled, {1, 1, -1, -1}, 10.0, 1.0);
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double f = binary.decision(farm::row_span(scaled, i));
    EXPECT_EQ(farm::predict(model, farm::row_span(x, i)), f > 0 ? 3 : 7);
  }
}

TEST(Multiclass, LabelPermutationAndAffineRescaling) {
  const auto b = blobs(2, 25, 1.2);
  const auto model = farm::train_multiclass(b.x, b.y, 1.0, 0.5);
  std::vector<int> relabeled;
  const std::map<int, int> perm{{1, 30}, {2, 10}, {3, 20}};
  for (int l : b.y) relabeled.push_back(perm.at(l));
  const auto permuted = farm::train_multiclass(b.x, relabeled, 1.0, 0.5);
  DataMatrix rescaled = b.x;
  rescaled.col(0) = rescaled.col(0) * 100.0 + Eigen::VectorXd::Constant(rescaled.rows(), 7.0);
  rescaled.col(1) *= 0.01;
  const auto scaled_model = farm::train_multiclass(rescaled, b.y, 1.0, 0.5);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-2.0, 7.0);
  for (int k = 0; k < 200; ++k) {
    const std::vector<double> probe{u(gen), u(gen)};
    const std::vector<double> probe_scaled{probe[0] * 100.0 + 7.0, probe[1] * 0.01};
    const int l = farm::predict(model, probe);
    EXPECT_EQ(farm::predict(permuted, probe), perm.at(l));
    EXPECT_EQ(farm::predict(scaled_model, probe_scaled), l);
  }
}

TEST(Predict, ThreeWayTieGoesToLargestMargin) {
  // Hand-built model: each label wins exactly one pairwise vote.
  farm::MulticlassModel m;
  m.labels = {1, 2, 3};
  m.feature_scaling = {{0.0}, {1.0}};
  auto constant = [](double bias) {
    farm::BinaryModel b;
    b.support_vectors.resize(0, 1);
    b.bias = bias;
    return b;
  };
  m.pairs = {{1, 2, constant(+0.5)},   // 1 beats 2, margin 0.5
             {1, 3, constant(-2.0)},   // 3 beats 1, margin 2.0
             {2, 3, constant(+1.0)}};  // 2 beats 3, margin 1.0
  const std::vector<double> x{0.0};
  EXPECT_EQ(farm::predict(m, x), 3);
  m.pairs[1].model.bias = -0.5;  // all margins now 0.5, 1.0, 0.5 -> label 2
  EXPECT_EQ(farm::predict(m, x), 2);
  m.pairs[2].model.bias = 0.5;  // all equal -> smallest label
  EXPECT_EQ(farm::predict(m, x), 1);
  const std::vector<double> wrong{0.0, 1.0};
  EXPECT_THROW(farm::predict(m, wrong), farm::Error);
}

TEST(GridSearch, SinglePointAndDeterminism) {
  const auto b = blobs(4, 20, 1.0);
  const auto one = farm::grid_search(b.x, b.y, {3.0}, {0.2}, 4, 1);
  EXPECT_EQ(one.c_penalty, 3.0);
  EXPECT_EQ(one.gamma, 0.2);
  const auto r1 = farm::grid_search(b.x, b.y, farm::default_c_grid(), farm::default_gamma_grid(2), 5, 9);
  const auto r2 = farm::grid_search(b.x, b.y, farm::default_c_grid(), farm::default_gamma_grid(2), 5, 9);
  EXPECT_EQ(r1.c_penalty, r2.c_penalty);
  EXPECT_EQ(r1.gamma, r2.gamma);
  EXPECT_EQ(r1.cv_accuracy, r2.cv_accuracy);
  EXPECT_EQ(r1.table.size(), 12u);
}

TEST(GridSearch, HugeGammaScoresBelowModerateGamma) {
  const auto b = blobs(5, 20, 1.5);
  const auto res = farm::grid_search(b.x, b.y, {1.0}, {0.5, 1e6}, 5, 2);
  ASSERT_EQ(res.table.size(), 2u);
  EXPECT_GT(res.table[0].cv_accuracy, res.table[1].cv_accuracy);
  EXPECT_EQ(res.gamma, 0.5);
}

TEST(GridSearch, TooFewPerClass) {
  const auto b = blobs(6, 3, 1.0);
  try {
    farm::grid_search(b.x, b.y, {1.0}, {1.0}, 5, 0);
    FAIL();
  } catch (const farm::Error& e) {
    EXPECT_EQ(e.kind(), farm::ErrorKind::TooFewPerClass);
  }
}
