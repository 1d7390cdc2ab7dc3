// Small end-to-end run: simulate a six-stream process, train a detector and
// classifier, then watch one faulty run through the online monitor.

#include "farm/pipeline.hpp"

#include <cstdio>

int main() {
  farm::BenchmarkOptions opts;
  opts.stream_count = 6;
  opts.runs_per_class = 10;
  opts.in_control_samples = 300;
  opts.post_onset_samples = 600;
  opts.history_samples = 3000;
  opts.in_control_test_runs = 1;

  const auto bench = farm::make_benchmark(42, opts);
  farm::TrainConfig cfg;
  cfg.target_arl0 = 200;
  cfg.patience = 60;
  cfg.seed = 42;

  const auto trained = farm::offline_train(bench.in_control, bench.train, cfg);
  const auto bundle = std::make_shared<const farm::ModelBundle>(trained.bundle);
  std::printf("threshold H = %.3f (ARL0 estimate %.1f), window = %llu samples, CV accuracy %.2f\n",
              bundle->detector.config.threshold, bundle->detector.calibration.achieved_arl,
              static_cast<unsigned long long>(bundle->classifier.window), bundle->classifier.cv_accuracy);

  const auto& run = bench.test.front();
  std::printf("monitoring %s (fault %d from sample %llu)\n", run.id.c_str(), run.fault_id,
              static_cast<unsigned long long>(run.onset));
  farm::OnlineMonitor monitor(bundle);
  for (Eigen::Index t = 0; t < run.data.rows(); ++t) {
    for (const auto& e : monitor.push(farm::row_span(run.data, t))) {
      if (e.kind == farm::EventKind::AlarmRaised) {
        std::printf("  t=%llu alarm, V=%.2f\n", static_cast<unsigned long long>(e.time_index), e.global_stat);
      } else if (e.kind == farm::EventKind::Classification) {
        if (e.predicted_fault) {
          std::printf("  t=%llu classified as fault %d\n", static_cast<unsigned long long>(e.time_index),
                      *e.predicted_fault);
        } else {
          std::printf("  t=%llu no classification (%s)\n", static_cast<unsigned long long>(e.time_index),
                      e.error->c_str());
        }
      }
    }
  }

  const auto report = farm::evaluate(*bundle, bench.test);
  std::printf("test accuracy %.2f over %zu classified runs, FAR %.4f\n", report.overall_accuracy, report.classified,
              report.far);
}
