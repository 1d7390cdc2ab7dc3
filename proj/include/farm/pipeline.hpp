#pragma once

// Offline training, online monitoring and evaluation of the two-stage
// monitor: a distribution-free CUSUM raises the alarm, and after a patience
// period the trailing window's covariance, mapped to the tangent space at the
// training Karcher mean, is classified by the SVM.

#include "farm/calibrate.hpp"
#include "farm/ecdf_detect.hpp"
#include "farm/error.hpp"
#include "farm/features.hpp"
#include "farm/parallel.hpp"
#include "farm/riemann.hpp"
#include "farm/simgen.hpp"
#include "farm/standardize.hpp"
#include "farm/svm.hpp"
#include "farm/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace farm {

enum class FeatureMap { Tangent, RawCovariance };

constexpr std::string_view to_string(FeatureMap f) noexcept {
  return f == FeatureMap::Tangent ? "tangent" : "raw_covariance";
}

struct TrainConfig {
  double allowance = 1.3;
  std::size_t top_r = 4;
  double target_arl0 = 200.0;
  std::size_t calibration_replications = 1000;
  double calibration_tolerance = 0.02;
  double reference_fraction = 0.5;  // share of in-control rows kept as the eCDF reference
  std::uint64_t patience = 300;
  bool trace_features = false;
  FeatureMap feature_map = FeatureMap::Tangent;
  Metric metric = Metric::AffineInvariant;
  std::vector<double> c_grid;      // empty: default_c_grid()
  std::vector<double> gamma_grid;  // empty: default_gamma_grid(d)
  std::size_t folds = 5;
  std::uint64_t seed = 0;
};

/// Detection half of a trained bundle.
struct DetectorModel {
  ReferenceStats reference_stats;
  SharedReferences references;
  MonitorConfig config;
  double arl0 = 0.0;
  CalibrationResult calibration;

  Monitor make_monitor() const { return Monitor(references, config); }
};

struct ClassifierModel {
  FeatureMap feature_map = FeatureMap::Tangent;
  Metric metric = Metric::AffineInvariant;
  std::optional<SpdMatrix> karcher_base;
  MulticlassModel svm;
  std::uint64_t patience = 0;
  std::uint64_t window = 2;
  bool trace_features = false;
  double c_penalty = 0.0;
  double gamma = 0.0;
  double cv_accuracy = 0.0;
};

struct ModelBundle {
  static constexpr int kFormatVersion = 1;

  DetectorModel detector;
  ClassifierModel classifier;
  int format_version = kFormatVersion;
};

/// Splits standardized in-control rows into the eCDF reference (leading
/// rows) and a bootstrap pool for calibration (remaining rows).
inline DetectorModel train_detector(const DataMatrix& in_control_raw, const TrainConfig& cfg) {
  DetectorModel det;
  det.reference_stats = fit_reference(in_control_raw);
  const DataMatrix z = apply(in_control_raw, det.reference_stats);
  const auto n = z.rows();
  const auto p = z.cols();
  const auto n_ref = static_cast<Eigen::Index>(std::llround(cfg.reference_fraction * static_cast<double>(n)));
  if (n_ref < 1 || n_ref >= n) throw Error(ErrorKind::BadConfig, "reference_fraction leaves no reference or pool");

  std::vector<SortedReference> refs;
  refs.reserve(static_cast<std::size_t>(p));
  std::vector<double> column(static_cast<std::size_t>(n_ref));
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n_ref; ++i) column[static_cast<std::size_t>(i)] = z(i, j);
    refs.push_back(SortedReference::build(column));
  }
  det.references = std::make_shared<const std::vector<SortedReference>>(std::move(refs));
  det.config = MonitorConfig{cfg.allowance, cfg.top_r, 1.0, static_cast<std::size_t>(p)};
  det.config.validate();
  det.arl0 = cfg.target_arl0;

  auto pool = std::make_shared<const DataMatrix>(z.bottomRows(n - n_ref));
  CalibrationSpec spec;
  spec.target_arl0 = cfg.target_arl0;
  spec.replications = cfg.calibration_replications;
  spec.tolerance = cfg.calibration_tolerance;
  const auto refs_ptr = det.references;
  const auto base_config = det.config;
  try {
    det.calibration = find_threshold(
        spec, [&] { return Monitor(refs_ptr, base_config); }, bootstrap_source(pool, derive_key(cfg.seed, 0xCA1)));
  } catch (const Error& e) {
    throw Error(ErrorKind::CalibrationFailed, e.what());
  }
  det.config.threshold = det.calibration.threshold;
  return det;
}

/// Alarm trajectory of one run. Before the onset (or everywhere for an
/// in-control run) an alarm is a false alarm and the detector restarts; from
/// the onset on the detector accumulates without reset.
struct RunDetection {
  std::vector<double> global_stat;       // V(t), index t-1
  std::vector<std::uint8_t> alarm;       // V(t) >= H
  std::vector<std::uint64_t> false_alarms;
  std::optional<std::uint64_t> first_alarm;  // first alarm at or after the onset
  std::uint64_t episode_start = 1;       // first sample after the last false-alarm restart
};

inline RunDetection detect_run(const DetectorModel& det, const DataMatrix& standardized, std::uint64_t onset) {
  Monitor monitor = det.make_monitor();
  const auto n = static_cast<std::uint64_t>(standardized.rows());
  RunDetection out;
  out.global_stat.resize(n);
  out.alarm.resize(n);
  for (std::uint64_t t = 1; t <= n; ++t) {
    const double v = monitor.advance(row_span(standardized, static_cast<Eigen::Index>(t - 1)));
    const bool alarm = v >= det.config.threshold;
    out.global_stat[t - 1] = v;
    out.alarm[t - 1] = alarm ? 1 : 0;
    const bool faulty = onset > 0 && t >= onset;
    if (!faulty) {
      if (alarm) {
        out.false_alarms.push_back(t);
        monitor.reset();
        out.episode_start = t + 1;
      }
    } else if (alarm && !out.first_alarm) {
      out.first_alarm = t;
    }
  }
  return out;
}

struct PreparedRun {
  std::string id;
  int fault_id = 0;
  std::uint64_t onset = 0;
  DataMatrix standardized;
  RunDetection detection;
};

inline void check_labels(const LabeledRun& run) {
  if (run.labels.size() != static_cast<std::size_t>(run.data.rows())) {
    throw Error(ErrorKind::LabelMismatch, run.id + ": label count differs from sample count");
  }
  for (std::size_t t = 1; t <= run.labels.size(); ++t) {
    const bool faulty = run.fault_id != 0 && t >= run.onset;
    const int expected = faulty ? run.fault_id : 0;
    if (run.labels[t - 1] != expected) {
      throw Error(ErrorKind::LabelMismatch, run.id + ": label at t=" + std::to_string(t) + " is " +
                                                std::to_string(run.labels[t - 1]) + ", expected " +
                                                std::to_string(expected));
    }
  }
}

/// Standardizes every run in place and runs the detector over it.
inline std::vector<PreparedRun> prepare_runs(const DetectorModel& det, std::vector<LabeledRun> runs) {
  std::vector<PreparedRun> out(runs.size());
  parallel_for(runs.size(), [&](std::size_t k) {
    LabeledRun& run = runs[k];
    check_labels(run);
    PreparedRun& prep = out[k];
    prep.id = run.id;
    prep.fault_id = run.fault_id;
    prep.onset = run.fault_id != 0 ? run.onset : 0;
    prep.standardized = apply(run.data, det.reference_stats);
    run.data.resize(0, 0);
    prep.detection = detect_run(det, prep.standardized, prep.onset);
  });
  return out;
}

/// Classifier input for one episode: mapped covariance of `window`, plus the
/// eight trace features of `trace` when enabled.
inline Eigen::VectorXd episode_features(const ClassifierModel& clf, const DataMatrix& window,
                                        std::span<const double> trace) {
  const auto cov = covariance(window);
  Eigen::VectorXd flat;
  if (clf.feature_map == FeatureMap::Tangent) {
    if (!clf.karcher_base) throw Error(ErrorKind::BadConfig, "tangent features need a base point");
    flat = spd_log(*clf.karcher_base, cov.matrix, clf.metric).flat;
  } else {
    flat = tangent_vectorize(cov.matrix.matrix());
  }
  if (!clf.trace_features) return flat;
  const auto tf = trace_features(trace).as_array();
  Eigen::VectorXd out(flat.size() + static_cast<Eigen::Index>(tf.size()));
  out << flat, Eigen::Map<const Eigen::VectorXd>(tf.data(), static_cast<Eigen::Index>(tf.size()));
  return out;
}

struct TrainingReport {
  std::vector<std::string> undetected_runs;    // never alarmed after the onset
  std::vector<std::string> truncated_runs;     // alarmed too late for the patience or window
  std::size_t training_windows = 0;
  std::size_t karcher_iterations = 0;
  GridSearchResult grid;
};

/// Classification stage: patience, window length, covariance, tangent map,
/// grid search and SVM training. The detector is used as is.
inline ClassifierModel train_classifier(const std::vector<PreparedRun>& runs, const TrainConfig& cfg,
                                        TrainingReport* report = nullptr) {
  TrainingReport local_report;
  TrainingReport& rep = report ? *report : local_report;
  rep = TrainingReport{};

  struct Usable {
    const PreparedRun* run;
    std::uint64_t classify_at;
  };
  std::vector<Usable> usable;
  double delay_sum = 0.0;
  for (const auto& run : runs) {
    if (run.fault_id == 0) continue;
    if (!run.detection.first_alarm) {
      rep.undetected_runs.push_back(run.id);
      continue;
    }
    const auto t_c = *run.detection.first_alarm + cfg.patience;
    if (t_c > static_cast<std::uint64_t>(run.standardized.rows())) {
      rep.truncated_runs.push_back(run.id);
      continue;
    }
    delay_sum += static_cast<double>(*run.detection.first_alarm - run.onset + cfg.patience);
    usable.push_back({&run, t_c});
  }
  if (usable.empty()) {
    std::string ids;
    for (const auto& id : rep.undetected_runs) ids += (ids.empty() ? "" : ",") + id;
    throw Error(ErrorKind::NoAlarmInTraining, "no training run alarmed [" + ids + "]");
  }

  ClassifierModel clf;
  clf.feature_map = cfg.feature_map;
  clf.metric = cfg.metric;
  clf.patience = cfg.patience;
  clf.trace_features = cfg.trace_features;
  clf.window = std::max<std::uint64_t>(2, static_cast<std::uint64_t>(std::llround(delay_sum / static_cast<double>(usable.size()))));

  std::vector<SpdMatrix> covs;
  std::vector<std::vector<double>> traces;
  std::vector<int> labels;
  for (const auto& u : usable) {
    if (u.classify_at < clf.window) {
      rep.truncated_runs.push_back(u.run->id);
      continue;
    }
    const auto first = static_cast<Eigen::Index>(u.classify_at - clf.window);
    covs.push_back(covariance(u.run->standardized.middleRows(first, static_cast<Eigen::Index>(clf.window))).matrix);
    const auto& v = u.run->detection.global_stat;
    traces.emplace_back(v.begin() + static_cast<std::ptrdiff_t>(u.run->detection.episode_start - 1),
                        v.begin() + static_cast<std::ptrdiff_t>(u.classify_at));
    labels.push_back(u.run->fault_id);
  }

  std::map<int, std::size_t> per_class;
  for (int l : labels) ++per_class[l];
  std::set<int> expected;
  for (const auto& run : runs) {
    if (run.fault_id != 0) expected.insert(run.fault_id);
  }
  for (int f : expected) {
    if (per_class[f] < 2) {
      std::string ids;
      for (const auto& id : rep.undetected_runs) ids += (ids.empty() ? "" : ",") + id;
      throw Error(ErrorKind::NoAlarmInTraining,
                  "fault " + std::to_string(f) + " has " + std::to_string(per_class[f]) +
                      " usable training windows; undetected [" + ids + "]");
    }
  }

  if (clf.feature_map == FeatureMap::Tangent) {
    const auto km = karcher_mean_detailed(covs, clf.metric);
    clf.karcher_base = km.mean;
    rep.karcher_iterations = km.iterations;
  }

  std::optional<TangentSpace> space;
  if (clf.karcher_base) space.emplace(*clf.karcher_base, clf.metric);
  const auto d = static_cast<Eigen::Index>(covs.front().dim() * (covs.front().dim() + 1) / 2 +
                                           (clf.trace_features ? TraceFeatures::kCount : 0));
  DataMatrix features(static_cast<Eigen::Index>(covs.size()), d);
  for (std::size_t m = 0; m < covs.size(); ++m) {
    Eigen::VectorXd flat = space ? space->log(covs[m]).flat : tangent_vectorize(covs[m].matrix());
    auto row = features.row(static_cast<Eigen::Index>(m));
    row.head(flat.size()) = flat.transpose();
    if (clf.trace_features) {
      const auto tf = trace_features(traces[m]).as_array();
      for (std::size_t k = 0; k < tf.size(); ++k) row(flat.size() + static_cast<Eigen::Index>(k)) = tf[k];
    }
  }

  const auto c_grid = cfg.c_grid.empty() ? default_c_grid() : cfg.c_grid;
  const auto gamma_grid = cfg.gamma_grid.empty() ? default_gamma_grid(static_cast<std::size_t>(d)) : cfg.gamma_grid;
  rep.grid = grid_search(features, labels, c_grid, gamma_grid, cfg.folds, derive_key(cfg.seed, 0x6121D));
  clf.c_penalty = rep.grid.c_penalty;
  clf.gamma = rep.grid.gamma;
  clf.cv_accuracy = rep.grid.cv_accuracy;
  clf.svm = train_multiclass(features, labels, clf.c_penalty, clf.gamma);
  rep.training_windows = covs.size();
  return clf;
}

struct TrainOutcome {
  ModelBundle bundle;
  TrainingReport report;
};

inline TrainOutcome offline_train(const DataMatrix& in_control_raw, std::vector<LabeledRun> faulty_runs,
                                  const TrainConfig& cfg) {
  if (faulty_runs.empty()) throw Error(ErrorKind::EmptyInput, "no faulty training runs");
  std::map<int, std::size_t> per_class;
  for (const auto& r : faulty_runs) {
    if (r.fault_id != 0) ++per_class[r.fault_id];
  }
  for (const auto& [f, count] : per_class) {
    if (count < 2) throw Error(ErrorKind::BadConfig, "fault " + std::to_string(f) + " has fewer than 2 runs");
  }
  TrainOutcome out;
  out.bundle.detector = train_detector(in_control_raw, cfg);
  const auto prepared = prepare_runs(out.bundle.detector, std::move(faulty_runs));
  out.bundle.classifier = train_classifier(prepared, cfg, &out.report);
  return out;
}

enum class EventKind { Sample, AlarmRaised, Classification, EpisodeIncomplete };

constexpr std::string_view to_string(EventKind k) noexcept {
  switch (k) {
    case EventKind::Sample: return "sample";
    case EventKind::AlarmRaised: return "alarm_raised";
    case EventKind::Classification: return "classification";
    case EventKind::EpisodeIncomplete: return "episode_incomplete";
  }
  return "?";
}

struct MonitorEvent {
  EventKind kind = EventKind::Sample;
  std::uint64_t time_index = 0;
  double global_stat = 0.0;
  bool alarm = false;
  std::optional<int> predicted_fault;   // classification only
  std::optional<std::string> error;     // classification that could not be made

  bool operator==(const MonitorEvent&) const = default;
};

/// Streaming monitor. Each episode: first alarm, t_p more samples, classify
/// on the trailing window, then restart the detector.
class OnlineMonitor {
 public:
  explicit OnlineMonitor(std::shared_ptr<const ModelBundle> bundle)
      : bundle_(std::move(bundle)), detector_(bundle_->detector.make_monitor()) {}

  std::uint64_t time_index() const noexcept { return t_; }
  bool in_episode() const noexcept { return alarm_time_.has_value(); }

  /// Feeds one raw p-vector; returns the events it produced, Sample first.
  std::vector<MonitorEvent> push(std::span<const double> raw) {
    const auto& b = *bundle_;
    std::vector<double> z = apply(raw, b.detector.reference_stats);
    ++t_;
    const double v = detector_.advance(z);
    const bool alarm = v >= b.detector.config.threshold;
    history_.push_back(std::move(z));
    if (history_.size() > b.classifier.window) history_.pop_front();
    trace_.push_back(v);

    std::vector<MonitorEvent> events;
    events.push_back({EventKind::Sample, t_, v, alarm, std::nullopt, std::nullopt});
    if (!alarm_time_ && alarm) {
      alarm_time_ = t_;
      events.push_back({EventKind::AlarmRaised, t_, v, true, std::nullopt, std::nullopt});
    }
    if (alarm_time_ && t_ == *alarm_time_ + b.classifier.patience) events.push_back(classify(v, alarm));
    return events;
  }

  /// Call when the source ends; reports an unfinished episode.
  std::optional<MonitorEvent> finish() const {
    if (!alarm_time_) return std::nullopt;
    return MonitorEvent{EventKind::EpisodeIncomplete, t_, detector_.global_stat(), detector_.alarm(),
                        std::nullopt, std::string(to_string(ErrorKind::SourceExhaustedMidEpisode))};
  }

 private:
  MonitorEvent classify(double v, bool alarm) {
    const auto& clf = bundle_->classifier;
    MonitorEvent ev{EventKind::Classification, t_, v, alarm, std::nullopt, std::nullopt};
    if (history_.size() < clf.window) {
      ev.error = std::string(to_string(ErrorKind::WindowTooShort));
    } else {
      DataMatrix window(static_cast<Eigen::Index>(clf.window), static_cast<Eigen::Index>(detector_.stream_count()));
      for (std::size_t i = 0; i < history_.size(); ++i) {
        std::copy(history_[i].begin(), history_[i].end(), row_span(window, static_cast<Eigen::Index>(i)).begin());
      }
      try {
        const Eigen::VectorXd f = episode_features(clf, window, trace_);
        ev.predicted_fault = predict(clf.svm, std::span<const double>(f.data(), static_cast<std::size_t>(f.size())));
      } catch (const Error& e) {
        ev.error = std::string(to_string(e.kind()));
      }
    }
    detector_.reset();
    trace_.clear();
    alarm_time_.reset();
    return ev;
  }

  std::shared_ptr<const ModelBundle> bundle_;
  Monitor detector_;
  std::deque<std::vector<double>> history_;
  std::vector<double> trace_;
  std::optional<std::uint64_t> alarm_time_;
  std::uint64_t t_ = 0;
};

/// Drains `next` (returns false when exhausted) through an OnlineMonitor,
/// handing every event to `sink`.
inline void online_monitor(std::shared_ptr<const ModelBundle> bundle,
                           const std::function<bool(std::vector<double>&)>& next,
                           const std::function<void(const MonitorEvent&)>& sink) {
  OnlineMonitor monitor(std::move(bundle));
  std::vector<double> x;
  while (next(x)) {
    for (const auto& ev : monitor.push(x)) sink(ev);
  }
  if (auto tail = monitor.finish()) sink(*tail);
}

struct EvalReport {
  std::map<int, double> fdr_per_fault;
  std::map<int, double> fds_per_fault;         // mean over detected runs
  std::map<int, std::size_t> undetected_per_fault;
  std::map<int, std::size_t> runs_per_fault;
  double far = 0.0;
  std::size_t true_positives = 0;
  std::size_t false_negatives = 0;
  std::size_t false_positives = 0;
  std::size_t true_negatives = 0;
  std::vector<int> labels;                          // confusion axis, ascending
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::size_t classified = 0;
  std::size_t unclassified = 0;
  double overall_accuracy = 0.0;
};

/// Prediction for the first post-onset episode of a prepared run, or nullopt
/// when the run never alarms or ends before the window is complete.
inline std::optional<int> classify_run(const ClassifierModel& clf, const PreparedRun& run) {
  if (!run.detection.first_alarm) return std::nullopt;
  const auto t_c = *run.detection.first_alarm + clf.patience;
  if (t_c > static_cast<std::uint64_t>(run.standardized.rows()) || t_c < clf.window) return std::nullopt;
  const auto window = run.standardized.middleRows(static_cast<Eigen::Index>(t_c - clf.window),
                                                  static_cast<Eigen::Index>(clf.window));
  const auto& v = run.detection.global_stat;
  const std::span<const double> trace(v.data() + (run.detection.episode_start - 1), t_c - run.detection.episode_start + 1);
  const Eigen::VectorXd f = episode_features(clf, window, trace);
  return predict(clf.svm, std::span<const double>(f.data(), static_cast<std::size_t>(f.size())));
}

inline EvalReport evaluate_prepared(const ClassifierModel& clf, const std::vector<PreparedRun>& runs) {
  EvalReport rep;
  std::map<int, std::size_t> tp;
  std::map<int, std::size_t> fn;
  std::map<int, double> fds_sum;
  std::map<int, std::size_t> detected;
  std::set<int> label_set(clf.svm.labels.begin(), clf.svm.labels.end());
  std::vector<std::optional<int>> predictions(runs.size());
  parallel_for(runs.size(), [&](std::size_t k) {
    if (runs[k].fault_id != 0) predictions[k] = classify_run(clf, runs[k]);
  });

  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto& run = runs[k];
    const auto n = run.detection.alarm.size();
    for (std::size_t t = 1; t <= n; ++t) {
      const bool alarm = run.detection.alarm[t - 1] != 0;
      const bool faulty = run.fault_id != 0 && t >= run.onset;
      if (faulty) {
        (alarm ? tp[run.fault_id] : fn[run.fault_id]) += 1;
      } else {
        (alarm ? rep.false_positives : rep.true_negatives) += 1;
      }
    }
    if (run.fault_id == 0) continue;
    label_set.insert(run.fault_id);
    ++rep.runs_per_fault[run.fault_id];
    if (run.detection.first_alarm) {
      fds_sum[run.fault_id] += static_cast<double>(*run.detection.first_alarm - run.onset);
      ++detected[run.fault_id];
    } else {
      ++rep.undetected_per_fault[run.fault_id];
    }
    if (predictions[k]) label_set.insert(*predictions[k]);
  }

  rep.labels.assign(label_set.begin(), label_set.end());
  auto axis = [&](int label) {
    return static_cast<std::size_t>(std::lower_bound(rep.labels.begin(), rep.labels.end(), label) - rep.labels.begin());
  };
  rep.confusion.assign(rep.labels.size(), std::vector<std::size_t>(rep.labels.size(), 0));
  std::size_t correct = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (runs[k].fault_id == 0) continue;
    if (!predictions[k]) {
      ++rep.unclassified;
      continue;
    }
    ++rep.confusion[axis(runs[k].fault_id)][axis(*predictions[k])];
    ++rep.classified;
    if (*predictions[k] == runs[k].fault_id) ++correct;
  }
  rep.overall_accuracy = rep.classified ? static_cast<double>(correct) / static_cast<double>(rep.classified) : 0.0;

  for (const auto& [fault, count] : rep.runs_per_fault) {
    const auto pos = tp[fault] + fn[fault];
    rep.fdr_per_fault[fault] = pos ? static_cast<double>(tp[fault]) / static_cast<double>(pos) : 0.0;
    if (detected[fault]) rep.fds_per_fault[fault] = fds_sum[fault] / static_cast<double>(detected[fault]);
    rep.undetected_per_fault.try_emplace(fault, 0);
    rep.true_positives += tp[fault];
    rep.false_negatives += fn[fault];
  }
  const auto negatives = rep.false_positives + rep.true_negatives;
  rep.far = negatives ? static_cast<double>(rep.false_positives) / static_cast<double>(negatives) : 0.0;
  return rep;
}

inline EvalReport evaluate(const ModelBundle& bundle, std::vector<LabeledRun> runs) {
  return evaluate_prepared(bundle.classifier, prepare_runs(bundle.detector, std::move(runs)));
}

struct SweepRow {
  std::uint64_t patience = 0;
  std::uint64_t window = 0;
  double accuracy = 0.0;
};

/// Retrains only the classification stage per patience value; detection
/// results are computed once and shared.
inline std::vector<SweepRow> sweep_patience(const std::vector<PreparedRun>& train, const std::vector<PreparedRun>& test,
                                            TrainConfig cfg, const std::vector<std::uint64_t>& grid) {
  if (grid.empty()) throw Error(ErrorKind::BadConfig, "empty patience grid");
  std::vector<SweepRow> rows;
  for (auto tp : grid) {
    cfg.patience = tp;
    const auto clf = train_classifier(train, cfg);
    rows.push_back({tp, clf.window, evaluate_prepared(clf, test).overall_accuracy});
  }
  return rows;
}

}  // namespace farm
