// farm: command-line front end for simulation, calibration, training,
// monitoring and evaluation.

#include "farm/bundle_io.hpp"
#include "farm/io.hpp"
#include "farm/pipeline.hpp"
#include "farm/spec_json.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw farm::Error(farm::ErrorKind::IoError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw farm::Error(farm::ErrorKind::IoError, path + ": " + e.what());
  }
}

// Writes to `path`, or stdout when it is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw farm::Error(farm::ErrorKind::IoError, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

struct TrainOptions {
  farm::TrainConfig cfg;
  std::string feature_map = "tangent";
  std::string metric = "affine_invariant";

  void add_to(CLI::App& app) {
    app.add_option("--allowance,-k", cfg.allowance, "CUSUM allowance k")->capture_default_str();
    app.add_option("--top-r,-r", cfg.top_r, "number of local statistics summed into V")->capture_default_str();
    app.add_option("--arl0", cfg.target_arl0, "target in-control average run length")->capture_default_str();
    app.add_option("--replications", cfg.calibration_replications, "Monte-Carlo runs per calibration step")
        ->capture_default_str();
    app.add_option("--tolerance", cfg.calibration_tolerance, "relative ARL tolerance")->capture_default_str();
    app.add_option("--reference-fraction", cfg.reference_fraction,
                   "share of in-control rows used as the eCDF reference")
        ->capture_default_str();
    app.add_option("--patience", cfg.patience, "samples between first alarm and classification")
        ->capture_default_str();
    app.add_flag("--trace-features", cfg.trace_features, "append V(t) trace features");
    app.add_option("--feature-map", feature_map, "tangent or raw_covariance")
        ->check(CLI::IsMember({"tangent", "raw_covariance"}))
        ->capture_default_str();
    app.add_option("--metric", metric, "affine_invariant or log_euclidean")
        ->check(CLI::IsMember({"affine_invariant", "log_euclidean"}))
        ->capture_default_str();
    app.add_option("--c-grid", cfg.c_grid, "SVM penalty grid")->delimiter(',');
    app.add_option("--gamma-grid", cfg.gamma_grid, "RBF gamma grid (default {0.1,1,10}/d)")->delimiter(',');
    app.add_option("--folds", cfg.folds, "cross-validation folds")->capture_default_str();
  }

  farm::TrainConfig resolve(std::uint64_t seed) const {
    auto out = cfg;
    out.seed = seed;
    out.feature_map = feature_map == "tangent" ? farm::FeatureMap::Tangent : farm::FeatureMap::RawCovariance;
    out.metric = metric == "affine_invariant" ? farm::Metric::AffineInvariant : farm::Metric::LogEuclidean;
    return out;
  }
};

json calibration_json(const farm::DetectorModel& det) {
  return {{"H", det.config.threshold},
          {"achieved_arl", det.calibration.achieved_arl},
          {"censored_fraction", det.calibration.censored_fraction},
          {"replications", det.calibration.replications},
          {"evaluations", det.calibration.evaluations},
          {"target_arl0", det.arl0},
          {"allowance", det.config.allowance},
          {"top_r", det.config.top_r}};
}

json report_json(const farm::EvalReport& r) {
  json per_fault = json::array();
  for (const auto& [f, runs] : r.runs_per_fault) {
    json entry{{"fault_id", f}, {"runs", runs}, {"fdr", r.fdr_per_fault.at(f)},
               {"undetected", r.undetected_per_fault.at(f)}};
    const auto fds = r.fds_per_fault.find(f);
    entry["fds"] = fds == r.fds_per_fault.end() ? json(nullptr) : json(fds->second);
    per_fault.push_back(entry);
  }
  return {{"per_fault", per_fault},
          {"far", r.far},
          {"true_positives", r.true_positives},
          {"false_negatives", r.false_negatives},
          {"false_positives", r.false_positives},
          {"true_negatives", r.true_negatives},
          {"labels", r.labels},
          {"confusion", r.confusion},
          {"classified", r.classified},
          {"unclassified", r.unclassified},
          {"overall_accuracy", r.overall_accuracy}};
}

json event_json(const farm::MonitorEvent& e) {
  json j{{"event", farm::to_string(e.kind)}, {"t", e.time_index}, {"V", e.global_stat}, {"alarm", e.alarm}};
  if (e.predicted_fault) j["predicted_fault"] = *e.predicted_fault;
  if (e.error) j["error"] = *e.error;
  return j;
}

std::vector<farm::LabeledRun> select_runs(farm::Corpus& corpus, const std::string& split) {
  if (split == "train") return std::move(corpus.train);
  if (split == "test") return std::move(corpus.test);
  auto all = std::move(corpus.train);
  for (auto& r : corpus.test) all.push_back(std::move(r));
  return all;
}

// --- subcommands ------------------------------------------------------------

struct SimulateArgs {
  std::string process_path;
  std::string fault_path;
  std::size_t streams = 20;
  std::uint64_t samples = 3500;
  std::string out;
  std::string labels_out;
  bool benchmark = false;
  std::string out_dir;
  farm::BenchmarkOptions bench;
};

void run_simulate(const SimulateArgs& a, std::uint64_t seed) {
  if (a.benchmark) {
    if (a.out_dir.empty()) throw farm::Error(farm::ErrorKind::BadConfig, "--benchmark needs --out-dir");
    const auto b = farm::make_benchmark(seed, a.bench);
    farm::write_corpus(a.out_dir, b.process.names(), b.in_control, b.train, b.test);
    json faults = json::array();
    for (const auto& f : b.faults) faults.push_back(farm::fault_to_json(f));
    std::ofstream(fs::path(a.out_dir) / "process.json") << farm::process_to_json(b.process).dump(2) << '\n';
    std::ofstream(fs::path(a.out_dir) / "faults.json") << faults.dump(2) << '\n';
    std::cerr << "wrote " << b.train.size() << " training and " << b.test.size() << " test runs to " << a.out_dir
              << '\n';
    return;
  }
  farm::ProcessSpec spec =
      a.process_path.empty() ? farm::mixed_process(a.streams, seed) : farm::process_from_json(read_json_file(a.process_path));
  if (a.process_path.empty()) spec.seed = seed;
  std::optional<farm::FaultSpec> fault;
  if (!a.fault_path.empty()) fault = farm::fault_from_json(read_json_file(a.fault_path));
  const auto run = farm::generate(spec, fault, a.samples);
  Output out(a.out);
  farm::write_csv(out.stream(), spec.names(), run.data);
  if (!a.labels_out.empty()) farm::write_labels(a.labels_out, run.labels);
}

struct CalibrateArgs {
  std::string in_control;
  std::size_t streams = 20;
  std::uint64_t history = 6000;
  std::string out;
  TrainOptions train;
};

void run_calibrate(const CalibrateArgs& a, std::uint64_t seed) {
  farm::DataMatrix history;
  if (!a.in_control.empty()) {
    history = farm::read_csv(fs::path(a.in_control)).data;
  } else {
    history = farm::generate(farm::mixed_process(a.streams, seed), std::nullopt, a.history).data;
  }
  const auto det = farm::train_detector(history, a.train.resolve(seed));
  Output out(a.out);
  out.stream() << calibration_json(det).dump(2) << '\n';
}

struct TrainArgs {
  std::string corpus;
  std::string bundle;
  std::string report;
  TrainOptions train;
};

void run_train(const TrainArgs& a, std::uint64_t seed) {
  auto corpus = farm::read_corpus(a.corpus);
  const auto outcome = farm::offline_train(corpus.in_control, std::move(corpus.train), a.train.resolve(seed));
  farm::save_bundle(outcome.bundle, a.bundle);
  const auto& clf = outcome.bundle.classifier;
  json grid = json::array();
  for (const auto& g : outcome.report.grid.table) {
    grid.push_back({{"C", g.c_penalty}, {"gamma", g.gamma}, {"cv_accuracy", g.cv_accuracy}});
  }
  json report{{"calibration", calibration_json(outcome.bundle.detector)},
              {"window", clf.window},
              {"patience", clf.patience},
              {"feature_map", farm::to_string(clf.feature_map)},
              {"trace_features", clf.trace_features},
              {"C", clf.c_penalty},
              {"gamma", clf.gamma},
              {"cv_accuracy", clf.cv_accuracy},
              {"training_windows", outcome.report.training_windows},
              {"karcher_iterations", outcome.report.karcher_iterations},
              {"undetected_runs", outcome.report.undetected_runs},
              {"truncated_runs", outcome.report.truncated_runs},
              {"grid", grid}};
  Output out(a.report);
  out.stream() << report.dump(2) << '\n';
}

struct MonitorArgs {
  std::string bundle;
  std::string input = "-";
  std::string events;
  std::string trace;
  bool sample_events = false;
};

void run_monitor(const MonitorArgs& a) {
  auto bundle = std::make_shared<const farm::ModelBundle>(farm::load_bundle(a.bundle));
  std::ifstream file;
  if (a.input != "-") {
    file.open(a.input);
    if (!file) throw farm::Error(farm::ErrorKind::IoError, "cannot open " + a.input);
  }
  std::istream& in = a.input == "-" ? std::cin : file;
  const auto header = farm::read_csv_header(in);
  if (header.size() != bundle->detector.config.stream_count) {
    throw farm::Error(farm::ErrorKind::DimensionMismatch,
                      "input has " + std::to_string(header.size()) + " columns, bundle expects " +
                          std::to_string(bundle->detector.config.stream_count));
  }
  Output events(a.events);
  std::optional<std::ofstream> trace;
  if (!a.trace.empty()) {
    trace.emplace(a.trace);
    if (!*trace) throw farm::Error(farm::ErrorKind::IoError, "cannot write " + a.trace);
    *trace << "t,V,alarm\n";
  }
  std::size_t line = 1;
  farm::online_monitor(
      bundle, [&](std::vector<double>& x) { return farm::read_csv_row(in, header.size(), x, line); },
      [&](const farm::MonitorEvent& e) {
        if (e.kind == farm::EventKind::Sample) {
          if (trace) *trace << e.time_index << ',' << farm::format_double(e.global_stat) << ',' << int(e.alarm) << '\n';
          if (!a.sample_events) return;
        }
        events.stream() << event_json(e).dump() << std::endl;
      });
}

struct EvaluateArgs {
  std::string bundle;
  std::string corpus;
  std::string split = "test";
  std::string out;
  std::string confusion;
};

void run_evaluate(const EvaluateArgs& a) {
  const auto bundle = farm::load_bundle(a.bundle);
  auto corpus = farm::read_corpus(a.corpus);
  const auto report = farm::evaluate(bundle, select_runs(corpus, a.split));
  Output out(a.out);
  out.stream() << report_json(report).dump(2) << '\n';
  if (!a.confusion.empty()) {
    std::ofstream csv(a.confusion);
    if (!csv) throw farm::Error(farm::ErrorKind::IoError, "cannot write " + a.confusion);
    csv << "true\\predicted";
    for (int l : report.labels) csv << ',' << l;
    csv << '\n';
    for (std::size_t i = 0; i < report.labels.size(); ++i) {
      csv << report.labels[i];
      for (auto c : report.confusion[i]) csv << ',' << c;
      csv << '\n';
    }
  }
}

struct SweepArgs {
  std::string corpus;
  std::string bundle;
  std::vector<std::uint64_t> grid{0, 100, 300, 600, 1000};
  std::string out;
  TrainOptions train;
};

void run_sweep(const SweepArgs& a, std::uint64_t seed) {
  auto corpus = farm::read_corpus(a.corpus);
  const auto cfg = a.train.resolve(seed);
  const auto det = a.bundle.empty() ? farm::train_detector(corpus.in_control, cfg) : farm::load_bundle(a.bundle).detector;
  const auto train = farm::prepare_runs(det, std::move(corpus.train));
  const auto test = farm::prepare_runs(det, std::move(corpus.test));
  const auto rows = farm::sweep_patience(train, test, cfg, a.grid);
  Output out(a.out);
  out.stream() << "patience,window,accuracy\n";
  for (const auto& r : rows) out.stream() << r.patience << ',' << r.window << ',' << farm::format_double(r.accuracy) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonparametric multi-stream fault detection and classification"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "seed for every random choice")->capture_default_str();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "generate a process run or a benchmark corpus");
  simulate->add_option("--process", sim.process_path, "ProcessSpec JSON (default: mixed process)");
  simulate->add_option("--fault", sim.fault_path, "FaultSpec JSON");
  simulate->add_option("--streams", sim.streams, "streams of the default mixed process")->capture_default_str();
  simulate->add_option("-n,--samples", sim.samples, "samples to generate")->capture_default_str();
  simulate->add_option("-o,--out", sim.out, "data CSV (default stdout)");
  simulate->add_option("--labels", sim.labels_out, "labels CSV (t,fault_id)");
  simulate->add_flag("--benchmark", sim.benchmark, "write the labeled benchmark corpus");
  simulate->add_option("--out-dir", sim.out_dir, "corpus directory for --benchmark");
  simulate->add_option("--runs-per-class", sim.bench.runs_per_class)->capture_default_str();
  simulate->add_option("--benchmark-streams", sim.bench.stream_count)->capture_default_str();
  simulate->add_option("--in-control-samples", sim.bench.in_control_samples)->capture_default_str();
  simulate->add_option("--post-onset-samples", sim.bench.post_onset_samples)->capture_default_str();
  simulate->add_option("--history-samples", sim.bench.history_samples)->capture_default_str();
  simulate->add_option("--intensity-spread", sim.bench.intensity_spread)->capture_default_str();

  CalibrateArgs cal;
  auto* calibrate = app.add_subcommand("calibrate", "find the alarm threshold H for a target ARL0");
  calibrate->add_option("--in-control", cal.in_control, "in-control CSV (default: simulated mixed process)");
  calibrate->add_option("--streams", cal.streams, "streams when simulating")->capture_default_str();
  calibrate->add_option("--history", cal.history, "samples when simulating")->capture_default_str();
  calibrate->add_option("-o,--out", cal.out, "JSON report (default stdout)");
  cal.train.add_to(*calibrate);

  TrainArgs tr;
  auto* train = app.add_subcommand("train", "train detector and classifier into a bundle");
  train->add_option("--corpus", tr.corpus, "corpus directory")->required();
  train->add_option("--bundle", tr.bundle, "bundle file to write")->required();
  train->add_option("--report", tr.report, "training report JSON (default stdout)");
  tr.train.add_to(*train);

  MonitorArgs mon;
  auto* monitor = app.add_subcommand("monitor", "run a bundle over a CSV stream");
  monitor->add_option("--bundle", mon.bundle, "bundle file")->required();
  monitor->add_option("-i,--input", mon.input, "CSV input, '-' for stdin")->capture_default_str();
  monitor->add_option("--events", mon.events, "JSON-lines events (default stdout)");
  monitor->add_option("--trace", mon.trace, "V(t) trace CSV (t,V,alarm)");
  monitor->add_flag("--sample-events", mon.sample_events, "also emit one event per sample");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "score a bundle on a labeled corpus");
  evaluate->add_option("--bundle", ev.bundle, "bundle file")->required();
  evaluate->add_option("--corpus", ev.corpus, "corpus directory")->required();
  evaluate->add_option("--split", ev.split, "train, test or all")
      ->check(CLI::IsMember({"train", "test", "all"}))
      ->capture_default_str();
  evaluate->add_option("-o,--out", ev.out, "JSON report (default stdout)");
  evaluate->add_option("--confusion", ev.confusion, "confusion-matrix CSV");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep-patience", "classification accuracy across patience values");
  sweep->add_option("--corpus", sw.corpus, "corpus directory")->required();
  sweep->add_option("--bundle", sw.bundle, "reuse this bundle's detector instead of calibrating");
  sweep->add_option("--grid", sw.grid, "patience values")->delimiter(',')->capture_default_str();
  sweep->add_option("-o,--out", sw.out, "CSV (default stdout)");
  sw.train.add_to(*sweep);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) run_simulate(sim, seed);
    if (*calibrate) run_calibrate(cal, seed);
    if (*train) run_train(tr, seed);
    if (*monitor) run_monitor(mon);
    if (*evaluate) run_evaluate(ev);
    if (*sweep) run_sweep(sw, seed);
  } catch (const farm::Error& e) {
    std::cerr << "farm: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "farm: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
