#pragma once

// Distribution-free multi-stream CUSUM. Each online value is ranked against a
// sorted in-control history; the Beta posterior mean of its CDF value drives a
// pair of log-likelihood CUSUMs per stream, and the sum of the r largest
// two-sided statistics is compared against the control limit H.

#include "farm/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace farm {

/// Ascending in-control history for one stream.
class SortedReference {
 public:
  SortedReference() = default;

  /// Sorts a copy of history; duplicates are kept.
  static SortedReference build(std::span<const double> history) {
    for (std::size_t i = 0; i < history.size(); ++i) {
      if (!std::isfinite(history[i])) {
        throw Error(ErrorKind::NonFiniteValue, "reference position " + std::to_string(i));
      }
    }
    SortedReference ref;
    ref.values_.assign(history.begin(), history.end());
    std::sort(ref.values_.begin(), ref.values_.end());
    return ref;
  }

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  /// Number of reference values strictly below x.
  std::size_t count_below(double x) const noexcept {
    return static_cast<std::size_t>(std::lower_bound(values_.begin(), values_.end(), x) -
                                    values_.begin());
  }

  bool operator==(const SortedReference&) const = default;

 private:
  std::vector<double> values_;
};

inline SortedReference build_reference(std::span<const double> history) { return SortedReference::build(history); }

/// Posterior mean (c + 1) / (s + 2) of the CDF value of x; always inside (0, 1).
inline double estimate_cdf(const SortedReference& ref, double x) {
  if (!std::isfinite(x)) throw Error(ErrorKind::NonFiniteValue, "estimate_cdf input");
  const auto c = ref.count_below(x);
  return static_cast<double>(c + 1) / static_cast<double>(ref.size() + 2);
}

struct LocalState {
  double w_plus = 0.0;
  double w_minus = 0.0;

  bool operator==(const LocalState&) const = default;
};

inline LocalState update_local(LocalState state, double mu_hat, double k) {
  if (!(mu_hat > 0.0 && mu_hat < 1.0)) {
    throw Error(ErrorKind::DomainError, "cdf estimate " + std::to_string(mu_hat) + " outside (0,1)");
  }
  state.w_plus = std::max(state.w_plus - std::log(1.0 - mu_hat) - k, 0.0);
  state.w_minus = std::max(state.w_minus - std::log(mu_hat) - k, 0.0);
  return state;
}

inline double two_sided(const LocalState& state) noexcept {
  return std::max(state.w_plus, state.w_minus);
}

/// Sum of the r largest entries, accumulated in descending order so the
/// result is independent of the input ordering.
inline double global_statistic(std::span<const double> local, std::size_t r) {
  if (r < 1 || r > local.size()) {
    throw Error(ErrorKind::BadR, "r=" + std::to_string(r) + " with p=" + std::to_string(local.size()));
  }
  std::vector<double> scratch(local.begin(), local.end());
  std::partial_sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(r), scratch.end(),
                    std::greater<>());
  double v = 0.0;
  for (std::size_t i = 0; i < r; ++i) v += scratch[i];
  return v;
}

struct MonitorConfig {
  double allowance = 1.3;  // k
  std::size_t top_r = 4;
  double threshold = 1.0;  // H
  std::size_t stream_count = 0;

  void validate() const {
    if (!(allowance > 0.0) || !std::isfinite(allowance)) {
      throw Error(ErrorKind::BadConfig, "allowance k must be positive");
    }
    if (top_r < 1 || top_r > stream_count) {
      throw Error(ErrorKind::BadR,
                  "r=" + std::to_string(top_r) + " with p=" + std::to_string(stream_count));
    }
    if (!(threshold > 0.0)) throw Error(ErrorKind::BadConfig, "threshold H must be positive");
  }

  bool operator==(const MonitorConfig&) const = default;
};

struct MonitorOutput {
  double global_stat = 0.0;
  bool alarm = false;
  std::vector<double> local_stats;
  std::uint64_t time_index = 0;
};

using SharedReferences = std::shared_ptr<const std::vector<SortedReference>>;

/// Single-writer detector state machine over p streams. Copies share the
/// (immutable) references and own their CUSUM state.
class Monitor {
 public:
  Monitor(std::vector<SortedReference> references, MonitorConfig config)
      : Monitor(std::make_shared<const std::vector<SortedReference>>(std::move(references)), config) {}

  Monitor(SharedReferences references, MonitorConfig config)
      : references_(std::move(references)), config_(config) {
    if (!references_) throw Error(ErrorKind::EmptyInput, "null references");
    const auto p = references_->size();
    if (config_.stream_count == 0) config_.stream_count = p;
    if (config_.stream_count != p) {
      throw Error(ErrorKind::DimensionMismatch, "config stream_count differs from reference count");
    }
    config_.validate();
    states_.resize(p);
    local_.resize(p);
    scratch_.resize(p);
  }

  /// Advances one sample and returns V(t). Cheaper than step() for inner loops.
  double advance(std::span<const double> x) {
    if (x.size() != states_.size()) {
      throw Error(ErrorKind::DimensionMismatch,
                  "expected " + std::to_string(states_.size()) + " values, got " + std::to_string(x.size()));
    }
    for (std::size_t i = 0; i < states_.size(); ++i) {
      const double mu = estimate_cdf((*references_)[i], x[i]);
      states_[i] = update_local(states_[i], mu, config_.allowance);
      local_[i] = two_sided(states_[i]);
    }
    ++time_;
    std::copy(local_.begin(), local_.end(), scratch_.begin());
    const auto r = static_cast<std::ptrdiff_t>(config_.top_r);
    std::partial_sort(scratch_.begin(), scratch_.begin() + r, scratch_.end(), std::greater<>());
    double v = 0.0;
    for (std::ptrdiff_t i = 0; i < r; ++i) v += scratch_[i];
    global_ = v;
    return v;
  }

  MonitorOutput step(std::span<const double> x) {
    const double v = advance(x);
    return MonitorOutput{v, v >= config_.threshold, local_, time_};
  }

  void reset() noexcept {
    std::fill(states_.begin(), states_.end(), LocalState{});
    std::fill(local_.begin(), local_.end(), 0.0);
    global_ = 0.0;
    time_ = 0;
  }

  double global_stat() const noexcept { return global_; }
  bool alarm() const noexcept { return global_ >= config_.threshold; }
  std::uint64_t time_index() const noexcept { return time_; }
  std::span<const LocalState> states() const noexcept { return states_; }
  std::span<const double> local_stats() const noexcept { return local_; }
  const MonitorConfig& config() const noexcept { return config_; }
  const std::vector<SortedReference>& references() const noexcept { return *references_; }
  const SharedReferences& shared_references() const noexcept { return references_; }
  std::size_t stream_count() const noexcept { return states_.size(); }

  void set_threshold(double h) {
    MonitorConfig next = config_;
    next.threshold = h;
    next.validate();
    config_ = next;
  }

 private:
  SharedReferences references_;
  MonitorConfig config_;
  std::vector<LocalState> states_;
  std::vector<double> local_;
  std::vector<double> scratch_;
  double global_ = 0.0;
  std::uint64_t time_ = 0;
};

}  // namespace farm
