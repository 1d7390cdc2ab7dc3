#include "farm/riemann.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using Eigen::MatrixXd;
using farm::SpdMatrix;

namespace {

MatrixXd diag(std::initializer_list<double> v) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return d.asDiagonal();
}

}  // namespace

TEST(Covariance, HandComputedExamples) {
  farm::DataMatrix w(4, 2);
  w << 1, 0, -1, 0, 0, 1, 0, -1;
  const auto c = farm::covariance(w);
  EXPECT_FALSE(c.regularized);
  EXPECT_TRUE(c.matrix.matrix().isApprox(diag({2.0 / 3.0, 2.0 / 3.0}), 1e-15));

  farm::DataMatrix one(3, 1);
  one << 1, 2, 3;
  EXPECT_DOUBLE_EQ(farm::covariance(one).matrix.matrix()(0, 0), 1.0);
}

TEST(Covariance, DegenerateWindows) {
  farm::DataMatrix same(5, 3);
  same.rowwise() = Eigen::RowVector3d(1, 2, 3);
  const auto c = farm::covariance(same);
  EXPECT_TRUE(c.regularized);
  EXPECT_TRUE(c.matrix.matrix().isApprox(farm::kShrinkage * MatrixXd::Identity(3, 3)));

  farm::DataMatrix rank_deficient(3, 4);  // fewer rows than streams
  rank_deficient << 1, 2, 3, 4, 2, 1, 0, 3, 5, 5, 1, 0;
  const auto r = farm::covariance(rank_deficient);
  EXPECT_TRUE(r.regularized);
  EXPECT_GT(farm::SymmetricEigen(r.matrix.matrix()).values.minCoeff(), 0.0);

  farm::DataMatrix short_window(1, 2);
  short_window << 1, 2;
  try {
    farm::covariance(short_window);
    FAIL();
  } catch (const farm::Error& e) {
    EXPECT_EQ(e.kind(), farm::ErrorKind::WindowTooShort);
  }
}

TEST(SpdMatrix, RejectsNonSpd) {
  EXPECT_THROW(SpdMatrix(diag({1.0, -1.0})), farm::Error);
  MatrixXd asym(2, 2);
  asym << 2, 1, 0, 2;
  EXPECT_THROW(SpdMatrix{asym}, farm::Error);
  EXPECT_THROW(SpdMatrix(diag({1.0, 0.0})), farm::Error);
}

TEST(LogExp, DiagonalExamples) {
  const SpdMatrix id(MatrixXd::Identity(2, 2));
  const SpdMatrix x(diag({std::exp(1.0), std::exp(2.0)}));
  EXPECT_TRUE(farm::spd_log(id, x).sym.isApprox(diag({1.0, 2.0}), 1e-14));
  EXPECT_TRUE(farm::spd_exp(id, diag({1.0, 2.0})).matrix().isApprox(x.matrix(), 1e-14));

  // commuting diagonals: B logm(B^-1 X)
  const SpdMatrix b(diag({4.0, 1.0}));
  const SpdMatrix y(diag({1.0, 4.0}));
  const MatrixXd expected = diag({4.0 * std::log(0.25), 1.0 * std::log(4.0)});
  EXPECT_TRUE(farm::spd_log(b, y).sym.isApprox(expected, 1e-14));

  EXPECT_TRUE(farm::spd_exp(b, MatrixXd::Zero(2, 2)).matrix().isApprox(b.matrix(), 1e-15));
}

TEST(LogExp, AgreesWithSchurMatrixLogarithm) {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 30; ++trial) {
    const int p = 2 + trial % 6;
    const MatrixXd b = farm::oracle::random_spd(gen, p, 100.0);
    const MatrixXd x = farm::oracle::random_spd(gen, p, 100.0);
    const MatrixXd bh = b.sqrt();
    const MatrixXd bih = bh.inverse();
    const MatrixXd inner = bih * x * bih;
    const MatrixXd expected = bh * MatrixXd(inner.log()) * bh;
    EXPECT_TRUE(farm::spd_log(SpdMatrix(b), SpdMatrix(x)).sym.isApprox(expected, 1e-9));
  }
}

TEST(LogExp, RoundTripAndBasepoint) {
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 1 + trial % 10;
    const SpdMatrix b(farm::oracle::random_spd(gen, p, 1e4));
    const SpdMatrix x(farm::oracle::random_spd(gen, p, 1e4));
    const auto s = farm::spd_log(b, x);
    EXPECT_LT((farm::spd_exp(b, s).matrix() - x.matrix()).norm(), 1e-8);
    EXPECT_LT(farm::spd_log(b, b).sym.norm(), 1e-12);
  }
}

TEST(LogEuclidean, RoundTripAndMean) {
  std::mt19937_64 gen(10);
  const SpdMatrix b(farm::oracle::random_spd(gen, 4, 50.0));
  const SpdMatrix x(farm::oracle::random_spd(gen, 4, 50.0));
  const auto s = farm::spd_log(b, x, farm::Metric::LogEuclidean);
  EXPECT_LT((farm::spd_exp(b, s.sym, farm::Metric::LogEuclidean).matrix() - x.matrix()).norm(), 1e-9);
  const SpdMatrix m = farm::karcher_mean({SpdMatrix(diag({1, 4})), SpdMatrix(diag({4, 1}))}, farm::Metric::LogEuclidean);
  EXPECT_TRUE(m.matrix().isApprox(diag({2, 2}), 1e-9));
}

TEST(Distance, CongruenceInvariance) {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 2 + trial % 6;
    const MatrixXd a = farm::oracle::random_spd(gen, p, 1e3);
    const MatrixXd b = farm::oracle::random_spd(gen, p, 1e3);
    MatrixXd gm(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) gm(i, j) = g(gen);
    gm += 2.0 * MatrixXd::Identity(p, p);
    const MatrixXd ga = gm * a * gm.transpose();
    const MatrixXd gb = gm * b * gm.transpose();
    const double d = farm::spd_distance(SpdMatrix(a), SpdMatrix(b));
    const double dg = farm::spd_distance(SpdMatrix(farm::symmetrize(ga)), SpdMatrix(farm::symmetrize(gb)));
    EXPECT_NEAR(d, dg, 1e-6 * std::max(1.0, d));
  }
}

TEST(Karcher, Examples) {
  const SpdMatrix a(diag({1.0, 4.0}));
  const SpdMatrix b(diag({4.0, 1.0}));
  EXPECT_TRUE(farm::karcher_mean({a}).matrix().isApprox(a.matrix()));
  EXPECT_TRUE(farm::karcher_mean({a, a}).matrix().isApprox(a.matrix()));
  EXPECT_TRUE(farm::karcher_mean({a, b}).matrix().isApprox(diag({2.0, 2.0}), 1e-9));
  EXPECT_THROW(farm::karcher_mean({}), farm::Error);
  EXPECT_THROW(farm::karcher_mean({a, SpdMatrix(MatrixXd::Identity(3, 3))}), farm::Error);
}

TEST(Karcher, TwoMatrixMeanIsGeodesicMidpoint) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 40; ++trial) {
    const int p = 2 + trial % 8;
    const MatrixXd a = farm::oracle::random_spd(gen, p, 100.0);
    const MatrixXd b = farm::oracle::random_spd(gen, p, 100.0);
    const MatrixXd mean = farm::karcher_mean({SpdMatrix(a), SpdMatrix(b)}).matrix();
    EXPECT_LT((mean - farm::oracle::geodesic_midpoint(a, b)).norm(), 1e-6);
  }
}

TEST(Karcher, FirstOrderConditionHolds) {
  std::mt19937_64 gen(14);
  std::vector<SpdMatrix> mats;
  for (int m = 0; m < 12; ++m) mats.emplace_back(farm::oracle::random_spd(gen, 5, 30.0));
  const auto res = farm::karcher_mean_detailed(mats);
  MatrixXd sum = MatrixXd::Zero(5, 5);
  for (const auto& m : mats) sum += farm::spd_log(res.mean, m).sym;
  EXPECT_LE((sum / 12.0).norm(), 1e-6 * 5);
}

TEST(Vectorize, ExamplesAndIsometry) {
  MatrixXd s(2, 2);
  s << 1, 2, 2, 3;
  const auto flat = farm::tangent_vectorize(s);
  ASSERT_EQ(flat.size(), 3);
  EXPECT_EQ(flat(0), 1.0);
  EXPECT_DOUBLE_EQ(flat(1), 2.0 * std::numbers::sqrt2);
  EXPECT_EQ(flat(2), 3.0);
  EXPECT_NEAR(flat.norm(), std::sqrt(18.0), 1e-15);
  EXPECT_EQ(farm::tangent_vectorize(MatrixXd::Zero(3, 3)), Eigen::VectorXd::Zero(6));

  std::mt19937_64 gen(15);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 1 + trial % 9;
    MatrixXd a(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) a(i, j) = g(gen);
    const MatrixXd sym = farm::symmetrize(a);
    const auto v = farm::tangent_vectorize(sym);
    EXPECT_NEAR(v.norm(), sym.norm(), 1e-12 * std::max(1.0, sym.norm()));
    EXPECT_TRUE(farm::tangent_unvectorize(v).isApprox(sym, 1e-15));
  }
  MatrixXd asym(2, 2);
  asym << 1, 2, 0, 1;
  try {
    farm::tangent_vectorize(asym);
    FAIL();
  } catch (const farm::Error& e) {
    EXPECT_EQ(e.kind(), farm::ErrorKind::NotSymmetric);
  }
}
