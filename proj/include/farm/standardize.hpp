#pragma once

#include "farm/error.hpp"
#include "farm/types.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace farm {

/// In-control location/scale per stream. stddevs are strictly positive.
struct ReferenceStats {
  std::vector<double> means;
  std::vector<double> stddevs;

  std::size_t stream_count() const noexcept { return means.size(); }

  bool operator==(const ReferenceStats&) const = default;
};

/// Column means and sample standard deviations (divisor n-1). Constant
/// columns are rejected with ErrorKind::ConstantStream listing every offender.
inline ReferenceStats fit_reference(const DataMatrix& raw) {
  const auto n = raw.rows();
  const auto p = raw.cols();
  if (n < 2 || p < 1) throw Error(ErrorKind::EmptyInput, "need at least 2 samples and 1 stream");

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (!std::isfinite(raw(i, j))) {
        throw Error(ErrorKind::NonFiniteValue,
                    "row " + std::to_string(i) + ", column " + std::to_string(j));
      }
    }
  }

  ReferenceStats stats;
  stats.means.resize(p);
  stats.stddevs.resize(p);
  std::string constant;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = raw.col(j).mean();
    const double ss = (raw.col(j).array() - mean).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    stats.means[j] = mean;
    stats.stddevs[j] = sd;
    if (!(sd > 0.0)) {
      if (!constant.empty()) constant += ",";
      constant += std::to_string(j);
    }
  }
  if (!constant.empty()) throw Error(ErrorKind::ConstantStream, "streams [" + constant + "]");
  return stats;
}

inline void apply(std::span<const double> x, const ReferenceStats& stats, std::span<double> out) {
  const auto p = stats.stream_count();
  if (x.size() != p || out.size() != p) {
    throw Error(ErrorKind::DimensionMismatch,
                "expected " + std::to_string(p) + " streams, got " + std::to_string(x.size()));
  }
  for (std::size_t i = 0; i < p; ++i) out[i] = (x[i] - stats.means[i]) / stats.stddevs[i];
}

inline std::vector<double> apply(std::span<const double> x, const ReferenceStats& stats) {
  std::vector<double> out(x.size());
  apply(x, stats, out);
  return out;
}

inline DataMatrix apply(const DataMatrix& raw, const ReferenceStats& stats) {
  if (static_cast<std::size_t>(raw.cols()) != stats.stream_count()) {
    throw Error(ErrorKind::DimensionMismatch,
                "expected " + std::to_string(stats.stream_count()) + " streams, got " +
                    std::to_string(raw.cols()));
  }
  DataMatrix out(raw.rows(), raw.cols());
  for (Eigen::Index i = 0; i < raw.rows(); ++i) apply(row_span(raw, i), stats, row_span(out, i));
  return out;
}

/// Inverse of apply.
inline std::vector<double> restore(std::span<const double> z, const ReferenceStats& stats) {
  if (z.size() != stats.stream_count()) throw Error(ErrorKind::DimensionMismatch, "restore");
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] * stats.stddevs[i] + stats.means[i];
  return out;
}

}  // namespace farm
