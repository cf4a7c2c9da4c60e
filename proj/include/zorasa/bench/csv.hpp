#pragma once

#include "zorasa/core/types.hpp"
#include "zorasa/rasa.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace zorasa::bench {

inline constexpr const char* kCsvHeader = "iter,oracle_calls,f_gap,grad_norm,problem_metric,W,mu,seed,algorithm";

/// 17 significant digits, C locale; non-finite values as nan/inf/-inf.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw IoError("bad number '" + s + "'");
  return v;
}

inline std::string to_csv_row(const ExperimentRecord& r) {
  return std::to_string(r.iter) + "," + std::to_string(r.oracle_calls) + "," + format_double(r.f_gap) + "," +
         format_double(r.grad_norm) + "," + format_double(r.problem_metric) + "," + format_double(r.W) + "," +
         format_double(r.mu) + "," + std::to_string(r.seed) + "," + r.algorithm;
}

inline std::string to_csv(const std::vector<ExperimentRecord>& records) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : records) out += to_csv_row(r) + "\n";
  return out;
}

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

inline std::vector<ExperimentRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || split(line).size() != 9 || line.rfind(kCsvHeader, 0) != 0) {
    throw IoError("record CSV has an unexpected header");
  }
  std::vector<ExperimentRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 9) throw IoError("record CSV row has " + std::to_string(f.size()) + " fields");
    ExperimentRecord r;
    r.iter = std::stoll(f[0]);
    r.oracle_calls = std::stoll(f[1]);
    r.f_gap = parse_double(f[2]);
    r.grad_norm = parse_double(f[3]);
    r.problem_metric = parse_double(f[4]);
    r.W = parse_double(f[5]);
    r.mu = parse_double(f[6]);
    r.seed = std::stoull(f[7]);
    r.algorithm = f[8];
    out.push_back(std::move(r));
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to a sibling temporary file and renames it into place.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "': " + ec.message());
}

}  // namespace zorasa::bench
