#pragma once

// Monte-Carlo run-length estimation and bisection for the control limit H
// that achieves a requested in-control average run length.

#include "farm/ecdf_detect.hpp"
#include "farm/error.hpp"
#include "farm/parallel.hpp"
#include "farm/rng.hpp"
#include "farm/types.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace farm {

/// Fills out with the p-vector observed at time t (1-based) of replication
/// `replication`. Must be a pure function of its arguments so replications
/// are reproducible and may run in any order.
using SampleSource = std::function<void(std::uint64_t replication, std::uint64_t t, std::span<double> out)>;
using DetectorFactory = std::function<Monitor()>;

struct CalibrationSpec {
  double target_arl0 = 370.0;
  std::size_t replications = 1000;
  std::uint64_t max_run_length = 0;  // 0 means 20 x target_arl0
  double h_low = 0.0;
  double h_high = 64.0;
  double tolerance = 0.02;
  std::size_t max_iterations = 80;

  std::uint64_t run_cap() const {
    return max_run_length > 0 ? max_run_length
                              : static_cast<std::uint64_t>(std::ceil(20.0 * target_arl0));
  }

  void validate() const {
    if (!(target_arl0 > 1.0)) throw Error(ErrorKind::BadConfig, "target ARL0 must exceed 1");
    if (replications < 100) throw Error(ErrorKind::BadConfig, "at least 100 replications required");
    if (!(h_low < h_high) || h_low < 0.0) throw Error(ErrorKind::BadConfig, "bad bracket");
    if (!(tolerance > 0.0)) throw Error(ErrorKind::BadConfig, "tolerance must be positive");
  }
};

struct ArlEstimate {
  double mean_run_length = 0.0;
  double censored_fraction = 0.0;
  std::size_t replications = 0;
  std::vector<std::uint64_t> run_lengths;
  bool truncated = false;
};

/// First t with V(t) >= h for a fresh monitor, or `cap` when none occurs.
inline std::uint64_t run_length(Monitor& monitor, const SampleSource& source, std::uint64_t replication,
                                double h, std::uint64_t cap) {
  monitor.reset();
  std::vector<double> x(monitor.stream_count());
  for (std::uint64_t t = 1; t <= cap; ++t) {
    source(replication, t, x);
    if (monitor.advance(x) >= h) return t;
  }
  return cap;
}

/// Mean run length over spec.replications fresh monitors. Censored runs count
/// at the cap; their share is reported in censored_fraction.
///
/// With a finite `stop_above`, work stops as soon as the summed run lengths
/// prove the mean exceeds it; the result is then marked truncated and holds
/// only a lower bound.
inline ArlEstimate estimate_arl(double h, const DetectorFactory& factory, const SampleSource& source,
                                const CalibrationSpec& spec,
                                double stop_above = std::numeric_limits<double>::infinity()) {
  spec.validate();
  const auto cap = spec.run_cap();
  const double budget = stop_above * static_cast<double>(spec.replications);
  ArlEstimate est;
  est.replications = spec.replications;
  est.run_lengths.assign(spec.replications, 0);
  std::atomic<std::uint64_t> spent{0};
  std::atomic<bool> truncated{false};
  parallel_for(spec.replications, [&](std::size_t rep) {
    if (truncated.load(std::memory_order_relaxed)) return;
    Monitor monitor = factory();
    auto limit = cap;
    if (std::isfinite(budget)) {
      const double left = budget - static_cast<double>(spent.load(std::memory_order_relaxed));
      limit = std::min<std::uint64_t>(cap, static_cast<std::uint64_t>(std::max(0.0, std::floor(left))) + 1);
    }
    const auto rl = run_length(monitor, source, rep, h, limit);
    est.run_lengths[rep] = rl;
    const auto total = spent.fetch_add(rl, std::memory_order_relaxed) + rl;
    if (static_cast<double>(total) > budget) truncated.store(true, std::memory_order_relaxed);
  });
  est.truncated = truncated.load();
  double total = 0.0;
  std::size_t censored = 0;
  for (auto rl : est.run_lengths) {
    total += static_cast<double>(rl);
    // A run that alarms exactly at the cap is indistinguishable here; treat it as censored.
    if (rl >= cap) ++censored;
  }
  est.mean_run_length = total / static_cast<double>(spec.replications);
  est.censored_fraction = static_cast<double>(censored) / static_cast<double>(spec.replications);
  return est;
}

struct CalibrationResult {
  double threshold = 0.0;
  double achieved_arl = 0.0;
  double censored_fraction = 0.0;
  std::size_t replications = 0;
  std::size_t evaluations = 0;
};

/// Bisection on h. ARL(h) is non-decreasing in h for a fixed set of sample
/// paths, and every evaluation reuses the same replication indices, so the
/// search sees a monotone function.
inline CalibrationResult find_threshold(const CalibrationSpec& spec, const DetectorFactory& factory,
                                        const SampleSource& source) {
  spec.validate();
  constexpr double kMinWidth = 0.125;
  CalibrationResult result;
  result.replications = spec.replications;
  // Every decision below only asks whether ARL(h) is under the target or
  // within tolerance of it, so evaluations may stop once ARL(h) is provably
  // above target * (1 + tolerance).
  const double stop_above = spec.target_arl0 * (1.0 + spec.tolerance);
  auto eval = [&](double h) {
    ++result.evaluations;
    return estimate_arl(h, factory, source, spec, stop_above);
  };

  double lo = spec.h_low;
  double hi = spec.h_high;
  ArlEstimate at_lo = eval(lo);
  if (at_lo.mean_run_length >= spec.target_arl0) {
    if (lo == 0.0) throw Error(ErrorKind::BracketError, "ARL at h=0 already reaches the target");
    lo = 0.0;
    at_lo = eval(lo);
    if (at_lo.mean_run_length >= spec.target_arl0) {
      throw Error(ErrorKind::BracketError, "ARL at h=0 already reaches the target");
    }
  }
  ArlEstimate at_hi = eval(hi);
  for (int doublings = 0; at_hi.mean_run_length <= spec.target_arl0; ++doublings) {
    if (at_hi.censored_fraction >= 1.0 || doublings >= 40) {
      throw Error(ErrorKind::BracketError,
                  "cannot bracket target ARL " + std::to_string(spec.target_arl0) + " (h=" +
                      std::to_string(hi) + " gives " + std::to_string(at_hi.mean_run_length) + ")");
    }
    lo = hi;
    hi *= 2.0;
    at_hi = eval(hi);
  }

  for (std::size_t iter = 0; iter < spec.max_iterations; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const ArlEstimate at_mid = eval(mid);
    const bool close = std::abs(at_mid.mean_run_length / spec.target_arl0 - 1.0) <= spec.tolerance;
    if (close || hi - lo < kMinWidth) {
      const ArlEstimate final_est = at_mid.truncated ? estimate_arl(mid, factory, source, spec) : at_mid;
      result.threshold = mid;
      result.achieved_arl = final_est.mean_run_length;
      result.censored_fraction = final_est.censored_fraction;
      return result;
    }
    if (at_mid.mean_run_length < spec.target_arl0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw Error(ErrorKind::NoConvergence,
              "bisection did not converge in " + std::to_string(spec.max_iterations) + " iterations");
}

/// In-control source that resamples rows of a standardized pool with
/// replacement, keyed by (seed, replication, t).
inline SampleSource bootstrap_source(std::shared_ptr<const DataMatrix> pool, std::uint64_t seed) {
  if (!pool || pool->rows() == 0) throw Error(ErrorKind::EmptyInput, "empty bootstrap pool");
  return [pool = std::move(pool), seed](std::uint64_t replication, std::uint64_t t, std::span<double> out) {
    auto rng = CounterRng::at(seed, replication, t);
    const auto row = static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(pool->rows())));
    const auto src = row_span(*pool, row);
    std::copy(src.begin(), src.end(), out.begin());
  };
}

}  // namespace farm
