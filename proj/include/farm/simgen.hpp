#pragma once

// Synthetic heterogeneous multi-stream process with injectable faults. Every
// sample is addressed by (seed, stream, t) through a counter-based generator,
// so runs can be produced in any order and in parallel.

#include "farm/error.hpp"
#include "farm/parallel.hpp"
#include "farm/rng.hpp"
#include "farm/types.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace farm {

enum class DistKind { Normal, Uniform, Exponential, StudentT, LogNormal };

/// Parameters: Normal(mu, sigma), Uniform(a, b), Exponential(rate, -),
/// StudentT(dof, -), LogNormal(mu, sigma) of the underlying normal.
struct StreamDist {
  DistKind kind = DistKind::Normal;
  double p1 = 0.0;
  double p2 = 1.0;

  static StreamDist normal(double mu, double sigma) { return {DistKind::Normal, mu, sigma}; }
  static StreamDist uniform(double a, double b) { return {DistKind::Uniform, a, b}; }
  static StreamDist exponential(double rate) { return {DistKind::Exponential, rate, 0.0}; }
  static StreamDist student_t(double dof) { return {DistKind::StudentT, dof, 0.0}; }
  static StreamDist lognormal(double mu, double sigma) { return {DistKind::LogNormal, mu, sigma}; }

  void validate() const {
    auto bad = [](const std::string& m) { return Error(ErrorKind::BadSpec, m); };
    switch (kind) {
      case DistKind::Normal:
      case DistKind::LogNormal:
        if (!(p2 > 0.0) || !std::isfinite(p1) || !std::isfinite(p2)) throw bad("sigma must be positive");
        break;
      case DistKind::Uniform:
        if (!(p1 < p2) || !std::isfinite(p1) || !std::isfinite(p2)) throw bad("uniform needs a < b");
        break;
      case DistKind::Exponential:
        if (!(p1 > 0.0) || !std::isfinite(p1)) throw bad("exponential rate must be positive");
        break;
      case DistKind::StudentT:
        if (!(p1 > 2.0) || !std::isfinite(p1)) throw bad("student_t needs dof > 2 for finite variance");
        break;
    }
  }

  double mean() const {
    switch (kind) {
      case DistKind::Normal: return p1;
      case DistKind::Uniform: return 0.5 * (p1 + p2);
      case DistKind::Exponential: return 1.0 / p1;
      case DistKind::StudentT: return 0.0;
      case DistKind::LogNormal: return std::exp(p1 + 0.5 * p2 * p2);
    }
    return 0.0;
  }

  double stddev() const {
    switch (kind) {
      case DistKind::Normal: return p2;
      case DistKind::Uniform: return (p2 - p1) / std::sqrt(12.0);
      case DistKind::Exponential: return 1.0 / p1;
      case DistKind::StudentT: return std::sqrt(p1 / (p1 - 2.0));
      case DistKind::LogNormal: return std::sqrt(std::expm1(p2 * p2)) * std::exp(p1 + 0.5 * p2 * p2);
    }
    return 0.0;
  }

  double sample(CounterRng& rng) const {
    switch (kind) {
      case DistKind::Normal: return p1 + p2 * rng.normal();
      case DistKind::Uniform: return p1 + (p2 - p1) * rng.uniform();
      case DistKind::Exponential: return rng.exponential(p1);
      case DistKind::StudentT: return rng.student_t(p1);
      case DistKind::LogNormal: return std::exp(p1 + p2 * rng.normal());
    }
    return 0.0;
  }
};

constexpr std::string_view to_string(DistKind k) noexcept {
  switch (k) {
    case DistKind::Normal: return "normal";
    case DistKind::Uniform: return "uniform";
    case DistKind::Exponential: return "exponential";
    case DistKind::StudentT: return "student_t";
    case DistKind::LogNormal: return "lognormal";
  }
  return "?";
}

struct StreamSpec {
  std::string name;
  StreamDist dist;
};

struct ProcessSpec {
  std::vector<StreamSpec> streams;
  std::uint64_t seed = 0;

  std::size_t stream_count() const noexcept { return streams.size(); }

  void validate() const {
    if (streams.empty()) throw Error(ErrorKind::BadSpec, "process has no streams");
    for (const auto& s : streams) s.dist.validate();
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& s : streams) out.push_back(s.name);
    return out;
  }

  /// In-control draw of stream `stream` at time t (1-based).
  double in_control(std::size_t stream, std::uint64_t t) const {
    auto rng = CounterRng::at(seed, stream, t);
    return streams[stream].dist.sample(rng);
  }
};

enum class FaultKind { Step, RandomVariation, SlowDrift, Sticking };

constexpr std::string_view to_string(FaultKind k) noexcept {
  switch (k) {
    case FaultKind::Step: return "step";
    case FaultKind::RandomVariation: return "random_variation";
    case FaultKind::SlowDrift: return "slow_drift";
    case FaultKind::Sticking: return "sticking";
  }
  return "?";
}

struct FaultSpec {
  int id = 1;
  FaultKind kind = FaultKind::Step;
  std::vector<std::size_t> affected_streams;
  double magnitude = 0.0;     // in sigma units of the affected stream
  std::uint64_t onset = 1;    // first faulty sample, 1-based
  double drift_rate = 0.0;    // sigma per 1000 samples (slow drift)

  void validate(std::size_t stream_count) const {
    if (onset < 1) throw Error(ErrorKind::BadSpec, "onset must be >= 1");
    if (id <= 0) throw Error(ErrorKind::BadSpec, "fault id must be positive");
    if (affected_streams.empty()) throw Error(ErrorKind::BadSpec, "fault affects no streams");
    for (auto s : affected_streams) {
      if (s >= stream_count) throw Error(ErrorKind::BadSpec, "affected stream " + std::to_string(s) + " out of range");
    }
    if (!std::isfinite(magnitude) || !std::isfinite(drift_rate)) throw Error(ErrorKind::BadSpec, "non-finite fault parameter");
    if (kind == FaultKind::RandomVariation && magnitude <= -1.0) {
      throw Error(ErrorKind::BadSpec, "random variation magnitude must exceed -1");
    }
  }
};

struct GeneratedRun {
  DataMatrix data;
  std::vector<int> labels;  // 0 in control, fault id from onset on
};

inline GeneratedRun generate(const ProcessSpec& spec, const std::optional<FaultSpec>& fault, std::uint64_t n) {
  spec.validate();
  if (n < 1) throw Error(ErrorKind::BadSpec, "sample count must be >= 1");
  const auto p = spec.stream_count();
  if (fault) fault->validate(p);

  GeneratedRun run;
  run.data.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  run.labels.assign(n, 0);
  for (std::uint64_t t = 1; t <= n; ++t) {
    for (std::size_t i = 0; i < p; ++i) run.data(static_cast<Eigen::Index>(t - 1), static_cast<Eigen::Index>(i)) = spec.in_control(i, t);
  }
  if (!fault) return run;

  for (std::uint64_t t = fault->onset; t <= n; ++t) run.labels[t - 1] = fault->id;
  for (auto s : fault->affected_streams) {
    const auto& dist = spec.streams[s].dist;
    const double sigma = dist.stddev();
    const double mu = dist.mean();
    const double stuck = spec.in_control(s, fault->onset);
    for (std::uint64_t t = fault->onset; t <= n; ++t) {
      double& x = run.data(static_cast<Eigen::Index>(t - 1), static_cast<Eigen::Index>(s));
      switch (fault->kind) {
        case FaultKind::Step: x += fault->magnitude * sigma; break;
        case FaultKind::RandomVariation: x = mu + (1.0 + fault->magnitude) * (x - mu); break;
        case FaultKind::SlowDrift:
          x += fault->drift_rate * static_cast<double>(t - fault->onset) / 1000.0 * sigma;
          break;
        case FaultKind::Sticking: x = stuck; break;
      }
    }
  }
  return run;
}

/// p heterogeneous streams cycling through the five distribution families
/// with index-dependent parameters.
inline ProcessSpec mixed_process(std::size_t p, std::uint64_t seed) {
  ProcessSpec spec;
  spec.seed = seed;
  for (std::size_t i = 0; i < p; ++i) {
    const double v = static_cast<double>(i / 5);
    StreamDist d;
    switch (i % 5) {
      case 0: d = StreamDist::normal(10.0 + v, 1.0 + 0.5 * v); break;
      case 1: d = StreamDist::uniform(-1.0 - v, 2.0 + v); break;
      case 2: d = StreamDist::exponential(0.5 + 0.25 * v); break;
      case 3: d = StreamDist::student_t(4.0 + v); break;
      case 4: d = StreamDist::lognormal(0.1 * v, 0.4 + 0.1 * v); break;
    }
    spec.streams.push_back({"x" + std::to_string(i + 1), d});
  }
  return spec;
}

struct LabeledRun {
  std::string id;
  int fault_id = 0;  // 0 for an in-control run
  std::uint64_t onset = 0;  // 1-based first faulty sample; 0 when fault_id == 0
  DataMatrix data;
  std::vector<int> labels;
};

struct BenchmarkOptions {
  std::size_t stream_count = 20;
  std::size_t runs_per_class = 60;
  std::uint64_t in_control_samples = 500;
  std::uint64_t post_onset_samples = 3000;
  std::uint64_t history_samples = 6000;
  std::size_t in_control_test_runs = 4;
  double train_fraction = 0.8;
  // Each faulty run scales its class's magnitude and drift rate by a factor
  // drawn log-uniformly from [1/intensity_spread, intensity_spread].
  double intensity_spread = 2.0;
};

struct Benchmark {
  ProcessSpec process;
  std::vector<FaultSpec> faults;  // one per class, onset filled in
  DataMatrix in_control;          // historical in-control data
  std::vector<LabeledRun> train;
  std::vector<LabeledRun> test;
};

/// Five fault classes: one per archetype plus a multi-stream step. The
/// affected streams are fixed per class; magnitudes are chosen so the
/// classes overlap enough that patience time matters.
inline std::vector<FaultSpec> benchmark_faults(std::size_t p, std::uint64_t onset) {
  auto wrap = [p](std::vector<std::size_t> s) {
    for (auto& v : s) v %= p;
    return s;
  };
  std::vector<FaultSpec> f;
  f.push_back({1, FaultKind::Step, wrap({0, 5, 10}), 1.0, onset, 0.0});
  f.push_back({2, FaultKind::RandomVariation, wrap({1, 6, 11}), 1.0, onset, 0.0});
  f.push_back({3, FaultKind::SlowDrift, wrap({2, 7, 12}), 0.0, onset, 2.0});
  f.push_back({4, FaultKind::Sticking, wrap({3, 8, 13, 18, 4, 9}), 0.0, onset, 0.0});
  f.push_back({5, FaultKind::Step, wrap({0, 1, 2, 3, 4, 5, 6, 7}), 0.75, onset, 0.0});
  return f;
}

inline Benchmark make_benchmark(std::uint64_t seed, const BenchmarkOptions& opts = {}) {
  if (!(opts.intensity_spread >= 1.0) || !std::isfinite(opts.intensity_spread)) {
    throw Error(ErrorKind::BadSpec, "intensity_spread must be finite and >= 1");
  }
  Benchmark bench;
  bench.process = mixed_process(opts.stream_count, derive_key(seed, 0xC0FFEE));
  const std::uint64_t onset = opts.in_control_samples + 1;
  const std::uint64_t length = opts.in_control_samples + opts.post_onset_samples;
  bench.faults = benchmark_faults(opts.stream_count, onset);
  bench.in_control = generate(bench.process, std::nullopt, opts.history_samples).data;

  const auto train_per_class =
      static_cast<std::size_t>(std::llround(opts.train_fraction * static_cast<double>(opts.runs_per_class)));
  const std::size_t classes = bench.faults.size();
  std::vector<LabeledRun> runs(classes * opts.runs_per_class + opts.in_control_test_runs);
  parallel_for(runs.size(), [&](std::size_t k) {
    ProcessSpec spec = bench.process;
    LabeledRun& run = runs[k];
    if (k < classes * opts.runs_per_class) {
      auto fault = bench.faults[k / opts.runs_per_class];
      const auto r = k % opts.runs_per_class;
      spec.seed = derive_key(seed, 1, static_cast<std::uint64_t>(fault.id), r);
      auto rng = CounterRng::at(seed, 3, static_cast<std::uint64_t>(fault.id), r);
      const double factor = std::exp((2.0 * rng.uniform() - 1.0) * std::log(opts.intensity_spread));
      fault.magnitude *= factor;
      fault.drift_rate *= factor;
      auto g = generate(spec, fault, length);
      run.id = "f" + std::to_string(fault.id) + "_r" + std::to_string(r);
      run.fault_id = fault.id;
      run.onset = onset;
      run.data = std::move(g.data);
      run.labels = std::move(g.labels);
    } else {
      const auto r = k - classes * opts.runs_per_class;
      spec.seed = derive_key(seed, 2, r);
      auto g = generate(spec, std::nullopt, length);
      run.id = "ic_r" + std::to_string(r);
      run.data = std::move(g.data);
      run.labels = std::move(g.labels);
    }
  });
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const bool in_control = k >= classes * opts.runs_per_class;
    const bool is_train = !in_control && (k % opts.runs_per_class) < train_per_class;
    (is_train ? bench.train : bench.test).push_back(std::move(runs[k]));
  }
  return bench;
}

}  // namespace farm
