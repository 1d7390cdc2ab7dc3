#pragma once

#include "farm/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace farm {

/// Summary of a global-statistic trace V(1..T). Population (divisor T)
/// moments, so variance == stddev^2.
struct TraceFeatures {
  double mean = 0.0;
  double stddev = 0.0;
  double median = 0.0;
  double variance = 0.0;
  double range = 0.0;
  double max = 0.0;
  double peak_count = 0.0;
  double auc = 0.0;

  static constexpr std::size_t kCount = 8;

  /// Fixed order appended after the tangent vector.
  std::array<double, kCount> as_array() const {
    return {mean, stddev, median, variance, range, max, peak_count, auc};
  }
};

inline TraceFeatures trace_features(std::span<const double> trace) {
  const auto n = trace.size();
  if (n < 3) throw Error(ErrorKind::TraceTooShort, "trace has " + std::to_string(n) + " samples");

  TraceFeatures f;
  double sum = 0.0;
  double lo = trace[0];
  double hi = trace[0];
  for (double v : trace) {
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  f.mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : trace) ss += (v - f.mean) * (v - f.mean);
  f.variance = ss / static_cast<double>(n);
  f.stddev = std::sqrt(f.variance);
  f.max = hi;
  f.range = hi - lo;

  std::vector<double> sorted(trace.begin(), trace.end());
  std::sort(sorted.begin(), sorted.end());
  f.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

  std::size_t peaks = 0;
  for (std::size_t t = 1; t + 1 < n; ++t) {
    if (trace[t] > trace[t - 1] && trace[t] > trace[t + 1]) ++peaks;
  }
  f.peak_count = static_cast<double>(peaks);

  // trapezoid, unit spacing
  double auc = 0.0;
  for (std::size_t t = 1; t < n; ++t) auc += 0.5 * (trace[t - 1] + trace[t]);
  f.auc = auc;
  return f;
}

}  // namespace farm
