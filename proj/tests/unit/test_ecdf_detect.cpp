#include "farm/ecdf_detect.hpp"

#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using farm::build_reference;
using farm::ErrorKind;
using farm::LocalState;
using farm::SortedReference;

TEST(SortedReference, SortsAndKeepsDuplicates) {
  const std::vector<double> a{3, 1, 2};
  const std::vector<double> b{2, 2, 1};
  auto ra = build_reference(a);
  auto rb = SortedReference::build(b);
  EXPECT_EQ(std::vector<double>(ra.values().begin(), ra.values().end()), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(std::vector<double>(rb.values().begin(), rb.values().end()), (std::vector<double>{1, 2, 2}));
  EXPECT_EQ(build_reference({}).size(), 0u);
  const std::vector<double> bad{1.0, INFINITY};
  try {
    SortedReference::build(bad);
    FAIL();
  } catch (const farm::Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFiniteValue);
  }
}

TEST(EstimateCdf, Examples) {
  EXPECT_EQ(farm::estimate_cdf(SortedReference{}, 123.0), 0.5);
  const std::vector<double> v{1, 2, 3, 4};
  const auto ref = SortedReference::build(v);
  EXPECT_EQ(farm::estimate_cdf(ref, 2.5), 0.5);
  EXPECT_EQ(farm::estimate_cdf(ref, 10.0), 5.0 / 6.0);
  // ties are not counted as below
  EXPECT_EQ(farm::estimate_cdf(ref, 2.0), 2.0 / 6.0);
  EXPECT_THROW(farm::estimate_cdf(ref, NAN), farm::Error);
}

TEST(EstimateCdf, MonotoneAndBounded) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> g;
  std::vector<double> v(257);
  for (auto& x : v) x = g(gen);
  const auto ref = SortedReference::build(v);
  std::vector<double> xs(1000);
  for (auto& x : xs) x = 3.0 * g(gen);
  std::sort(xs.begin(), xs.end());
  double prev = 0.0;
  for (double x : xs) {
    const double mu = farm::estimate_cdf(ref, x);
    EXPECT_GE(mu, prev);
    EXPECT_GE(mu, 1.0 / 259.0);
    EXPECT_LE(mu, 258.0 / 259.0);
    prev = mu;
  }
}

TEST(UpdateLocal, Examples) {
  auto s = farm::update_local({0, 0}, 0.5, 1.3);
  EXPECT_EQ(s, (LocalState{0, 0}));
  s = farm::update_local({0, 0}, 0.99, 1.3);
  EXPECT_NEAR(s.w_plus, 3.3052, 1e-4);
  EXPECT_EQ(s.w_minus, 0.0);
  s = farm::update_local({5, 0}, 0.5, 1.3);
  EXPECT_NEAR(s.w_plus, 4.3931, 1e-4);
  EXPECT_EQ(s.w_minus, 0.0);
  for (double bad : {0.0, 1.0, -0.1, 1.5}) {
    try {
      farm::update_local({}, bad, 1.3);
      FAIL();
    } catch (const farm::Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::DomainError);
    }
  }
}

TEST(TwoSided, Examples) {
  EXPECT_EQ(farm::two_sided({0, 0}), 0.0);
  EXPECT_EQ(farm::two_sided({3.3, 0}), 3.3);
  EXPECT_EQ(farm::two_sided({1.2, 4.5}), 4.5);
}

TEST(GlobalStatistic, Examples) {
  const std::vector<double> w{3, 1, 4, 1, 5};
  EXPECT_EQ(farm::global_statistic(w, 4), 13.0);
  EXPECT_EQ(farm::global_statistic(w, 5), 14.0);
  const std::vector<double> zeros(6, 0.0);
  EXPECT_EQ(farm::global_statistic(zeros, 3), 0.0);
  for (std::size_t bad : {std::size_t{0}, std::size_t{6}}) {
    try {
      farm::global_statistic(w, bad);
      FAIL();
    } catch (const farm::Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::BadR);
    }
  }
}

namespace {

farm::Monitor make_monitor(std::vector<std::vector<double>> refs, double k, std::size_t r, double h) {
  std::vector<SortedReference> sorted;
  for (const auto& v : refs) sorted.push_back(SortedReference::build(v));
  return farm::Monitor(std::move(sorted), farm::MonitorConfig{k, r, h, 0});
}

}  // namespace

TEST(Monitor, MedianSamplesGiveZeroStatistic) {
  auto m = make_monitor({{1, 2, 3, 4}, {-1, 0, 1, 2}}, 1.3, 2, 0.01);
  const std::vector<double> x{2.5, 0.5};
  const auto out = m.step(x);
  EXPECT_EQ(out.global_stat, 0.0);
  EXPECT_FALSE(out.alarm);
  EXPECT_EQ(out.time_index, 1u);
}

TEST(Monitor, AlarmWhenStatisticReachesThreshold) {
  // 98 reference values below x: mu = 99/100 = 0.99, so w_plus = 3.3052
  std::vector<double> ref(98);
  for (std::size_t i = 0; i < ref.size(); ++i) ref[i] = static_cast<double>(i);
  auto m = make_monitor({ref}, 1.3, 1, 0.1);
  const std::vector<double> x{1000.0};
  const auto out = m.step(x);
  EXPECT_NEAR(out.global_stat, 3.3052, 1e-4);
  EXPECT_TRUE(out.alarm);
  // V == H exactly also alarms
  auto exact = make_monitor({ref}, 1.3, 1, out.global_stat);
  EXPECT_TRUE(exact.step(x).alarm);
}

TEST(Monitor, ConfigAndDimensionErrors) {
  EXPECT_THROW(make_monitor({{1.0}}, 0.0, 1, 1.0), farm::Error);
  EXPECT_THROW(make_monitor({{1.0}}, 1.3, 2, 1.0), farm::Error);
  EXPECT_THROW(make_monitor({{1.0}}, 1.3, 1, 0.0), farm::Error);
  auto m = make_monitor({{1.0}, {2.0}}, 1.3, 1, 1.0);
  const std::vector<double> x{1.0};
  try {
    m.step(x);
    FAIL();
  } catch (const farm::Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(Monitor, ResetRestoresFreshBehaviour) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> refs(3, std::vector<double>(200));
  for (auto& r : refs)
    for (auto& v : r) v = g(gen);
  auto used = make_monitor(refs, 0.5, 2, 1e9);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x{g(gen) + 2.0, g(gen), g(gen) - 1.0};
    used.step(x);
  }
  EXPECT_GT(used.global_stat(), 0.0);
  used.reset();
  used.reset();
  EXPECT_EQ(used.global_stat(), 0.0);
  EXPECT_EQ(used.time_index(), 0u);
  auto fresh = make_monitor(refs, 0.5, 2, 1e9);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x{g(gen), g(gen), g(gen)};
    EXPECT_EQ(used.step(x).global_stat, fresh.step(x).global_stat);
  }
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(used.states()[i], fresh.states()[i]);
}

TEST(Monitor, BoundsAndGrowthLimit) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> g;
  const std::size_t s = 50;
  std::vector<std::vector<double>> refs(4, std::vector<double>(s));
  for (auto& r : refs)
    for (auto& v : r) v = g(gen);
  const double k = 0.7;
  auto m = make_monitor(refs, k, 3, 1e9);
  std::vector<LocalState> prev(4);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> x(4);
    for (auto& v : x) v = 2.0 * g(gen) + (t > 250 ? 1.5 : 0.0);
    const auto out = m.step(x);
    EXPECT_GE(out.global_stat, 0.0);
    for (std::size_t i = 0; i < 4; ++i) {
      const auto st = m.states()[i];
      EXPECT_GE(st.w_plus, 0.0);
      EXPECT_GE(st.w_minus, 0.0);
      EXPECT_LE(st.w_plus, std::max(prev[i].w_plus + std::log(s + 2.0) - k, 0.0) + 1e-12);
      EXPECT_LE(st.w_minus, std::max(prev[i].w_minus + std::log(s + 2.0) - k, 0.0) + 1e-12);
      prev[i] = st;
    }
  }
}

TEST(Monitor, PermutationEquivariance) {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> refs(5, std::vector<double>(100));
  for (auto& r : refs)
    for (auto& v : r) v = g(gen);
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};
  std::vector<std::vector<double>> prefs;
  for (auto i : perm) prefs.push_back(refs[i]);
  auto a = make_monitor(refs, 1.0, 3, 1e9);
  auto b = make_monitor(prefs, 1.0, 3, 1e9);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x(5);
    for (auto& v : x) v = 1.5 * g(gen);
    std::vector<double> px;
    for (auto i : perm) px.push_back(x[i]);
    const auto oa = a.step(x);
    const auto ob = b.step(px);
    EXPECT_EQ(oa.global_stat, ob.global_stat);
    for (std::size_t j = 0; j < perm.size(); ++j) EXPECT_EQ(ob.local_stats[j], oa.local_stats[perm[j]]);
  }
}

TEST(Monitor, MatchesRecomputeEverythingOracle) {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> g;
  for (int c = 0; c < 20; ++c) {
    const std::size_t p = 1 + gen() % 5;
    const std::size_t r = 1 + gen() % p;
    const std::size_t T = 1 + gen() % 50;
    std::vector<std::vector<double>> refs(p);
    for (auto& ref : refs) {
      ref.resize(gen() % 40);
      for (auto& v : ref) v = std::round(4.0 * g(gen)) / 4.0;  // coarse grid forces ties
    }
    std::vector<std::vector<double>> xs(T, std::vector<double>(p));
    for (auto& row : xs)
      for (auto& v : row) v = std::round(4.0 * (g(gen) + (c % 3 == 0 ? 1.0 : 0.0))) / 4.0;
    auto m = make_monitor(refs, 0.4 + 0.1 * (c % 10), r, 1e9);
    const auto expected = farm::oracle::naive_global_trajectory(refs, xs, 0.4 + 0.1 * (c % 10), r);
    for (std::size_t t = 0; t < T; ++t) EXPECT_EQ(m.advance(xs[t]), expected[t]) << "case " << c << " t " << t;
  }
}
