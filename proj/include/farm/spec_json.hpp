#pragma once

// JSON forms of ProcessSpec and FaultSpec, as read by the command-line tool.
//
//   {"seed": 7, "streams": [{"name": "x1", "dist": "normal", "params": [0, 1]}, ...]}
//   {"id": 1, "kind": "step", "affected_streams": [0, 5], "magnitude": 3,
//    "onset": 501, "drift_rate": 0}
//
// params holds (mu, sigma) for normal and lognormal, (a, b) for uniform,
// (rate) for exponential and (dof) for student_t.

#include "farm/error.hpp"
#include "farm/simgen.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace farm {

inline DistKind dist_kind_from_string(const std::string& s) {
  for (auto k : {DistKind::Normal, DistKind::Uniform, DistKind::Exponential, DistKind::StudentT, DistKind::LogNormal}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorKind::BadSpec, "unknown distribution '" + s + "'");
}

inline FaultKind fault_kind_from_string(const std::string& s) {
  for (auto k : {FaultKind::Step, FaultKind::RandomVariation, FaultKind::SlowDrift, FaultKind::Sticking}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorKind::BadSpec, "unknown fault kind '" + s + "'");
}

inline nlohmann::json process_to_json(const ProcessSpec& spec) {
  nlohmann::json streams = nlohmann::json::array();
  for (const auto& s : spec.streams) {
    std::vector<double> params{s.dist.p1};
    if (s.dist.kind != DistKind::Exponential && s.dist.kind != DistKind::StudentT) params.push_back(s.dist.p2);
    streams.push_back({{"name", s.name}, {"dist", to_string(s.dist.kind)}, {"params", params}});
  }
  return {{"seed", spec.seed}, {"streams", streams}};
}

inline ProcessSpec process_from_json(const nlohmann::json& j) {
  try {
    ProcessSpec spec;
    spec.seed = j.value("seed", std::uint64_t{0});
    for (const auto& s : j.at("streams")) {
      StreamDist d;
      d.kind = dist_kind_from_string(s.at("dist").get<std::string>());
      const auto params = s.at("params").get<std::vector<double>>();
      const std::size_t expected = d.kind == DistKind::Exponential || d.kind == DistKind::StudentT ? 1 : 2;
      if (params.size() != expected) {
        throw Error(ErrorKind::BadSpec, std::string(to_string(d.kind)) + " takes " + std::to_string(expected) +
                                            " parameter(s)");
      }
      d.p1 = params[0];
      d.p2 = expected == 2 ? params[1] : 0.0;
      const auto name = s.value("name", "x" + std::to_string(spec.streams.size() + 1));
      spec.streams.push_back({name, d});
    }
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::BadSpec, std::string("process spec: ") + e.what());
  }
}

inline nlohmann::json fault_to_json(const FaultSpec& f) {
  return {{"id", f.id},         {"kind", to_string(f.kind)}, {"affected_streams", f.affected_streams},
          {"magnitude", f.magnitude}, {"onset", f.onset},      {"drift_rate", f.drift_rate}};
}

inline FaultSpec fault_from_json(const nlohmann::json& j) {
  try {
    FaultSpec f;
    f.id = j.value("id", 1);
    f.kind = fault_kind_from_string(j.at("kind").get<std::string>());
    f.affected_streams = j.at("affected_streams").get<std::vector<std::size_t>>();
    f.magnitude = j.value("magnitude", 0.0);
    f.onset = j.at("onset").get<std::uint64_t>();
    f.drift_rate = j.value("drift_rate", 0.0);
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::BadSpec, std::string("fault spec: ") + e.what());
  }
}

}  // namespace farm
