#pragma once

// Bundle file: a JSON document
//   {"format": "farm-bundle", "format_version": 1,
//    "checksum": "<fnv1a-64 hex of payload.dump()>", "payload": {...}}
// Doubles are written in shortest round-trip form, so save/load is lossless.

#include "farm/error.hpp"
#include "farm/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace farm {

namespace bundle_detail {

using nlohmann::json;

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

template <typename M>
json matrix_to_json(const M& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

template <typename M>
M matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<std::size_t>(rows * cols) != data.size()) throw Error(ErrorKind::CorruptBundle, "matrix size");
  M m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = data[static_cast<std::size_t>(i * cols + k)];
  }
  return m;
}

inline json binary_to_json(const BinaryModel& b) {
  return json{{"support_vectors", matrix_to_json(b.support_vectors)},
              {"dual_coefs", b.dual_coefs},
              {"bias", b.bias},
              {"gamma", b.gamma},
              {"c_penalty", b.c_penalty}};
}

inline BinaryModel binary_from_json(const json& j) {
  BinaryModel b;
  b.support_vectors = matrix_from_json<DataMatrix>(j.at("support_vectors"));
  b.dual_coefs = j.at("dual_coefs").get<std::vector<double>>();
  b.bias = j.at("bias").get<double>();
  b.gamma = j.at("gamma").get<double>();
  b.c_penalty = j.at("c_penalty").get<double>();
  if (b.dual_coefs.size() != static_cast<std::size_t>(b.support_vectors.rows())) {
    throw Error(ErrorKind::CorruptBundle, "support vector / coefficient count");
  }
  return b;
}

inline json to_json(const ModelBundle& b) {
  const auto& det = b.detector;
  const auto& clf = b.classifier;
  json refs = json::array();
  for (const auto& r : *det.references) refs.push_back(std::vector<double>(r.values().begin(), r.values().end()));
  json pairs = json::array();
  for (const auto& p : clf.svm.pairs) {
    pairs.push_back(json{{"label_a", p.label_a}, {"label_b", p.label_b}, {"model", binary_to_json(p.model)}});
  }
  json payload{
      {"reference_stats", {{"means", det.reference_stats.means}, {"stddevs", det.reference_stats.stddevs}}},
      {"sorted_references", std::move(refs)},
      {"detect_config",
       {{"allowance", det.config.allowance},
        {"top_r", det.config.top_r},
        {"threshold", det.config.threshold},
        {"stream_count", det.config.stream_count},
        {"arl0", det.arl0},
        {"achieved_arl", det.calibration.achieved_arl},
        {"censored_fraction", det.calibration.censored_fraction},
        {"replications", det.calibration.replications}}},
      {"classifier",
       {{"feature_map", std::string(to_string(clf.feature_map))},
        {"metric", std::string(to_string(clf.metric))},
        {"labels", clf.svm.labels},
        {"feature_mean", clf.svm.feature_scaling.mean},
        {"feature_scale", clf.svm.feature_scaling.scale},
        {"pairs", std::move(pairs)},
        {"c_penalty", clf.c_penalty},
        {"gamma", clf.gamma},
        {"cv_accuracy", clf.cv_accuracy}}},
      {"patience", clf.patience},
      {"window", clf.window},
      {"trace_features_enabled", clf.trace_features},
  };
  if (clf.karcher_base) payload["karcher_base"] = matrix_to_json(clf.karcher_base->matrix());
  return payload;
}

inline ModelBundle from_json(const json& j) {
  ModelBundle b;
  auto& det = b.detector;
  auto& clf = b.classifier;
  det.reference_stats.means = j.at("reference_stats").at("means").get<std::vector<double>>();
  det.reference_stats.stddevs = j.at("reference_stats").at("stddevs").get<std::vector<double>>();
  std::vector<SortedReference> refs;
  for (const auto& r : j.at("sorted_references")) refs.push_back(SortedReference::build(r.get<std::vector<double>>()));
  det.references = std::make_shared<const std::vector<SortedReference>>(std::move(refs));
  const auto& dc = j.at("detect_config");
  det.config.allowance = dc.at("allowance").get<double>();
  det.config.top_r = dc.at("top_r").get<std::size_t>();
  det.config.threshold = dc.at("threshold").get<double>();
  det.config.stream_count = dc.at("stream_count").get<std::size_t>();
  det.config.validate();
  det.arl0 = dc.at("arl0").get<double>();
  det.calibration.threshold = det.config.threshold;
  det.calibration.achieved_arl = dc.at("achieved_arl").get<double>();
  det.calibration.censored_fraction = dc.at("censored_fraction").get<double>();
  det.calibration.replications = dc.at("replications").get<std::size_t>();
  if (det.references->size() != det.config.stream_count || det.reference_stats.stream_count() != det.config.stream_count) {
    throw Error(ErrorKind::CorruptBundle, "stream counts disagree");
  }

  const auto& c = j.at("classifier");
  const auto fm = c.at("feature_map").get<std::string>();
  clf.feature_map = fm == "tangent" ? FeatureMap::Tangent : FeatureMap::RawCovariance;
  clf.metric = c.at("metric").get<std::string>() == "log_euclidean" ? Metric::LogEuclidean : Metric::AffineInvariant;
  clf.svm.labels = c.at("labels").get<std::vector<int>>();
  clf.svm.feature_scaling.mean = c.at("feature_mean").get<std::vector<double>>();
  clf.svm.feature_scaling.scale = c.at("feature_scale").get<std::vector<double>>();
  for (const auto& p : c.at("pairs")) {
    clf.svm.pairs.push_back({p.at("label_a").get<int>(), p.at("label_b").get<int>(), binary_from_json(p.at("model"))});
  }
  clf.c_penalty = c.at("c_penalty").get<double>();
  clf.gamma = c.at("gamma").get<double>();
  clf.cv_accuracy = c.at("cv_accuracy").get<double>();
  clf.patience = j.at("patience").get<std::uint64_t>();
  clf.window = j.at("window").get<std::uint64_t>();
  clf.trace_features = j.at("trace_features_enabled").get<bool>();
  if (j.contains("karcher_base")) {
    clf.karcher_base = SpdMatrix(matrix_from_json<Eigen::MatrixXd>(j.at("karcher_base")), "karcher_base");
  }
  if (clf.window < 2) throw Error(ErrorKind::CorruptBundle, "window below 2");
  return b;
}

}  // namespace bundle_detail

inline std::string serialize_bundle(const ModelBundle& bundle) {
  using bundle_detail::json;
  const json payload = bundle_detail::to_json(bundle);
  const std::string body = payload.dump();
  json doc{{"format", "farm-bundle"},
           {"format_version", bundle.format_version},
           {"checksum", bundle_detail::hex(bundle_detail::fnv1a(body))},
           {"payload", payload}};
  return doc.dump();
}

inline ModelBundle deserialize_bundle(const std::string& text) {
  using bundle_detail::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::CorruptBundle, std::string("unparseable bundle: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", "") != "farm-bundle") {
      throw Error(ErrorKind::CorruptBundle, "not a farm bundle");
    }
    const int version = doc.at("format_version").get<int>();
    if (version != ModelBundle::kFormatVersion) {
      throw Error(ErrorKind::VersionMismatch, "bundle format_version " + std::to_string(version) +
                                                  ", this reader supports " +
                                                  std::to_string(ModelBundle::kFormatVersion));
    }
    const json& payload = doc.at("payload");
    const auto expected = doc.at("checksum").get<std::string>();
    if (bundle_detail::hex(bundle_detail::fnv1a(payload.dump())) != expected) {
      throw Error(ErrorKind::CorruptBundle, "checksum mismatch");
    }
    ModelBundle bundle = bundle_detail::from_json(payload);
    bundle.format_version = version;
    return bundle;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::CorruptBundle, e.what());
  }
}

inline void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out << serialize_bundle(bundle);
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

inline ModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_bundle(ss.str());
}

}  // namespace farm
