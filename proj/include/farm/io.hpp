#pragma once

// CSV and corpus layout.
//   data CSV:   header of stream names, one row per sample
//   labels CSV: header "t,fault_id", one row per sample (t is 1-based)
//   corpus dir: manifest.json + in_control.csv + runs/<id>.csv + runs/<id>_labels.csv

#include "farm/error.hpp"
#include "farm/simgen.hpp"
#include "farm/types.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace farm {

struct CsvTable {
  std::vector<std::string> names;
  DataMatrix data;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

inline double parse_double(const std::string& s, std::size_t line) {
  std::string_view v(s);
  while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
  while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r')) v.remove_suffix(1);
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw Error(ErrorKind::IoError, "line " + std::to_string(line) + ": not a number '" + s + "'");
  }
  return out;
}

/// Reads one CSV row as a sample; returns false at end of input.
inline bool read_csv_row(std::istream& in, std::size_t expected, std::vector<double>& out, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != expected) {
      throw Error(ErrorKind::DimensionMismatch, "line " + std::to_string(line_no) + " has " +
                                                    std::to_string(cells.size()) + " fields, expected " +
                                                    std::to_string(expected));
    }
    out.resize(expected);
    for (std::size_t i = 0; i < expected; ++i) out[i] = parse_double(cells[i], line_no);
    return true;
  }
  return false;
}

inline std::vector<std::string> read_csv_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::IoError, "missing CSV header");
  return split_csv_line(line);
}

inline CsvTable read_csv(std::istream& in) {
  CsvTable table;
  table.names = read_csv_header(in);
  std::vector<std::vector<double>> rows;
  std::vector<double> row;
  std::size_t line_no = 1;
  while (read_csv_row(in, table.names.size(), row, line_no)) rows.push_back(row);
  table.data.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), row_span(table.data, static_cast<Eigen::Index>(i)).begin());
  }
  return table;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return read_csv(in);
}

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_csv(std::ostream& out, const std::vector<std::string>& names, const DataMatrix& data) {
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) out << (c ? "," : "") << format_double(data(r, c));
    out << '\n';
  }
}

inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& names, const DataMatrix& data) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  write_csv(out, names, data);
}

inline void write_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << "t,fault_id\n";
  for (std::size_t t = 0; t < labels.size(); ++t) out << (t + 1) << ',' << labels[t] << '\n';
}

inline std::vector<int> read_labels(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  if (table.names.size() != 2) throw Error(ErrorKind::IoError, path.string() + ": expected t,fault_id");
  std::vector<int> labels(static_cast<std::size_t>(table.data.rows()));
  for (Eigen::Index i = 0; i < table.data.rows(); ++i) {
    if (table.data(i, 0) != static_cast<double>(i + 1)) {
      throw Error(ErrorKind::LabelMismatch, path.string() + ": t column out of sequence at row " + std::to_string(i + 1));
    }
    labels[static_cast<std::size_t>(i)] = static_cast<int>(table.data(i, 1));
  }
  return labels;
}

/// Onset of a labeled run: first sample with a non-zero label (1-based), 0 if none.
inline std::uint64_t onset_from_labels(const std::vector<int>& labels) {
  for (std::size_t t = 0; t < labels.size(); ++t) {
    if (labels[t] != 0) return t + 1;
  }
  return 0;
}

struct Corpus {
  std::vector<std::string> names;
  DataMatrix in_control;
  std::vector<LabeledRun> train;
  std::vector<LabeledRun> test;
};

inline void write_corpus(const std::filesystem::path& dir, const std::vector<std::string>& names,
                         const DataMatrix& in_control, const std::vector<LabeledRun>& train,
                         const std::vector<LabeledRun>& test) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "runs");
  write_csv(dir / "in_control.csv", names, in_control);
  nlohmann::json runs = nlohmann::json::array();
  auto emit = [&](const LabeledRun& run, const char* split) {
    const auto data = "runs/" + run.id + ".csv";
    const auto labels = "runs/" + run.id + "_labels.csv";
    write_csv(dir / data, names, run.data);
    write_labels(dir / labels, run.labels);
    runs.push_back({{"id", run.id}, {"fault_id", run.fault_id}, {"onset", run.onset}, {"split", split},
                    {"data", data}, {"labels", labels}});
  };
  for (const auto& r : train) emit(r, "train");
  for (const auto& r : test) emit(r, "test");
  nlohmann::json manifest{{"streams", names}, {"in_control", "in_control.csv"}, {"runs", std::move(runs)}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error(ErrorKind::IoError, "cannot write manifest");
  out << manifest.dump(2) << '\n';
}

inline Corpus read_corpus(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error(ErrorKind::IoError, "missing " + (dir / "manifest.json").string());
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::IoError, std::string("manifest: ") + e.what());
  }
  Corpus corpus;
  corpus.names = manifest.at("streams").get<std::vector<std::string>>();
  const auto ic = read_csv(dir / manifest.at("in_control").get<std::string>());
  corpus.in_control = ic.data;
  for (const auto& entry : manifest.at("runs")) {
    LabeledRun run;
    run.id = entry.at("id").get<std::string>();
    run.fault_id = entry.at("fault_id").get<int>();
    run.onset = entry.at("onset").get<std::uint64_t>();
    const auto table = read_csv(dir / entry.at("data").get<std::string>());
    if (table.names.size() != corpus.names.size()) {
      throw Error(ErrorKind::DimensionMismatch, run.id + ": stream count differs from manifest");
    }
    run.data = table.data;
    run.labels = read_labels(dir / entry.at("labels").get<std::string>());
    (entry.at("split").get<std::string>() == "test" ? corpus.test : corpus.train).push_back(std::move(run));
  }
  return corpus;
}

}  // namespace farm
