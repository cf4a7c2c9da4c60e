#pragma once

#include "zorasa/core/types.hpp"
#include "zorasa/rasa.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace zorasa::bench {

struct ProblemSpec {
  std::string type;  // "kpca" or "psd"
  Index n = 10;
  Index r = 5;
};

/// An algorithm entry; unset fields fall back to the preset for the problem.
struct AlgorithmSpec {
  std::string name;  // "zo-rasa", "zo-rsgd-1" or "zo-rsgd-m"
  std::string label;  // output name, defaults to `name`
  std::optional<std::int64_t> N;
  std::optional<double> beta;
  std::optional<double> tau_scale;
  std::optional<TauMode> tau_mode;
  std::optional<TauMode> tau_rule;
  std::optional<double> step_scale;  // Zo-RSGD: t = step_scale / sqrt(N)
  std::optional<std::int64_t> batch;
};

struct GridConfig {
  std::string output_dir = "runs";
  std::uint64_t master_seed = 1;
  int seeds = 5;
  bool full = false;
  int jobs = 1;
  double c_mu = 1.0;
  std::int64_t record_points = 500;
  std::vector<ProblemSpec> problems;
  std::vector<AlgorithmSpec> algorithms;
};

namespace detail {

using json = nlohmann::json;

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

/// Line of the first occurrence of "key" in the source, for diagnostics.
inline std::string key_line(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return "";
  std::size_t line = 1;
  for (std::size_t i = 0; i < pos; ++i) line += text[i] == '\n';
  return " (line " + std::to_string(line) + ")";
}

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    const auto dot = path.find_last_of(".]");
    std::string key = path.substr(dot == std::string::npos ? 0 : dot + 1);
    throw ConfigError("config field '" + path + "'" + key_line(text_, key) + ": " + msg);
  }

  template <class T>
  T get(const json& obj, const std::string& key, const std::string& path, T fallback) const {
    if (!obj.contains(key)) return fallback;
    return as<T>(obj.at(key), path + key);
  }

  template <class T>
  std::optional<T> opt(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.contains(key)) return std::nullopt;
    return as<T>(obj.at(key), path + key);
  }

  template <class T>
  T as(const json& v, const std::string& path) const {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(path, "expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(path, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) return static_cast<T>(v.get<std::uint64_t>());
        if (v.get<std::int64_t>() < 0) fail(path, "expected a non-negative integer");
        return static_cast<T>(v.get<std::int64_t>());
      } else {
        return static_cast<T>(v.get<std::int64_t>());
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(path, "expected a number");
      return v.get<double>();
    } else {
      if (!v.is_string()) fail(path, "expected a string");
      return v.get<std::string>();
    }
  }

 private:
  const std::string& text_;
};

inline TauMode parse_tau(const Reader& rd, const std::string& s, const std::string& path) {
  if (s == "single-sample" || s == "sqrt-dN") return TauMode::SingleSample;
  if (s == "large-batch" || s == "sqrt-N") return TauMode::LargeBatch;
  rd.fail(path, "unknown value '" + s + "' (expected single-sample/sqrt-dN or large-batch/sqrt-N)");
}

inline void check_keys(const Reader& rd, const json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed) {
  for (const auto& [k, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) rd.fail(path + k, "unknown key");
  }
}

}  // namespace detail

/// Parses the JSON grid description; see docs/config.md for the schema.
inline GridConfig parse_config(const std::string& text) {
  using detail::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON at " + detail::line_col(text, e.byte > 0 ? e.byte - 1 : 0) + ": " +
                      e.what());
  }
  const detail::Reader rd(text);
  if (!root.is_object()) throw ConfigError("config root must be an object");
  detail::check_keys(rd, root, "",
                     {"output_dir", "master_seed", "seeds", "scale", "jobs", "c_mu", "record_points", "problems",
                      "algorithms"});

  GridConfig cfg;
  cfg.output_dir = rd.get<std::string>(root, "output_dir", "", cfg.output_dir);
  cfg.master_seed = rd.get<std::uint64_t>(root, "master_seed", "", cfg.master_seed);
  cfg.seeds = rd.get<int>(root, "seeds", "", cfg.seeds);
  cfg.jobs = rd.get<int>(root, "jobs", "", cfg.jobs);
  cfg.c_mu = rd.get<double>(root, "c_mu", "", cfg.c_mu);
  cfg.record_points = rd.get<std::int64_t>(root, "record_points", "", cfg.record_points);
  const std::string scale = rd.get<std::string>(root, "scale", "", "desk");
  if (scale != "desk" && scale != "full") rd.fail("scale", "expected \"desk\" or \"full\"");
  cfg.full = scale == "full";
  if (cfg.seeds < 1) rd.fail("seeds", "must be >= 1");
  if (cfg.jobs < 1) rd.fail("jobs", "must be >= 1");
  if (!(cfg.c_mu > 0)) rd.fail("c_mu", "must be positive");
  if (cfg.record_points < 1) rd.fail("record_points", "must be >= 1");

  if (!root.contains("problems") || !root["problems"].is_array() || root["problems"].empty()) {
    rd.fail("problems", "must be a non-empty array");
  }
  for (std::size_t i = 0; i < root["problems"].size(); ++i) {
    const json& p = root["problems"][i];
    const std::string path = "problems[" + std::to_string(i) + "].";
    if (!p.is_object()) rd.fail(path.substr(0, path.size() - 1), "expected an object");
    detail::check_keys(rd, p, path, {"type", "n", "r"});
    ProblemSpec spec;
    if (!p.contains("type")) rd.fail(path + "type", "missing");
    spec.type = rd.as<std::string>(p["type"], path + "type");
    if (spec.type != "kpca" && spec.type != "psd") rd.fail(path + "type", "expected \"kpca\" or \"psd\"");
    spec.n = rd.get<std::int64_t>(p, "n", path, spec.n);
    spec.r = rd.get<std::int64_t>(p, "r", path, spec.r);
    if (spec.r < 1 || spec.n <= spec.r) rd.fail(path + "n", "need n > r >= 1");
    cfg.problems.push_back(spec);
  }

  if (!root.contains("algorithms")) {
    for (const char* name : {"zo-rasa", "zo-rsgd-1", "zo-rsgd-m"}) cfg.algorithms.push_back({name, name});
    return cfg;
  }
  if (!root["algorithms"].is_array() || root["algorithms"].empty()) rd.fail("algorithms", "must be a non-empty array");
  for (std::size_t i = 0; i < root["algorithms"].size(); ++i) {
    const json& a = root["algorithms"][i];
    const std::string path = "algorithms[" + std::to_string(i) + "].";
    AlgorithmSpec spec;
    if (a.is_string()) {
      spec.name = a.get<std::string>();
    } else if (a.is_object()) {
      detail::check_keys(rd, a, path,
                         {"name", "label", "N", "beta", "tau_scale", "tau_mode", "tau_rule", "step_scale", "batch"});
      if (!a.contains("name")) rd.fail(path + "name", "missing");
      spec.name = rd.as<std::string>(a["name"], path + "name");
      spec.label = rd.get<std::string>(a, "label", path, "");
      spec.N = rd.opt<std::int64_t>(a, "N", path);
      spec.beta = rd.opt<double>(a, "beta", path);
      spec.tau_scale = rd.opt<double>(a, "tau_scale", path);
      if (auto s = rd.opt<std::string>(a, "tau_mode", path)) spec.tau_mode = detail::parse_tau(rd, *s, path + "tau_mode");
      if (auto s = rd.opt<std::string>(a, "tau_rule", path)) spec.tau_rule = detail::parse_tau(rd, *s, path + "tau_rule");
      spec.step_scale = rd.opt<double>(a, "step_scale", path);
      spec.batch = rd.opt<std::int64_t>(a, "batch", path);
      if (spec.N && *spec.N < 1) rd.fail(path + "N", "must be >= 1");
      if (spec.beta && !(*spec.beta > 0)) rd.fail(path + "beta", "must be positive");
      if (spec.tau_scale && !(*spec.tau_scale > 0)) rd.fail(path + "tau_scale", "must be positive");
      if (spec.step_scale && !(*spec.step_scale > 0)) rd.fail(path + "step_scale", "must be positive");
      if (spec.batch && *spec.batch < 1) rd.fail(path + "batch", "must be >= 1");
    } else {
      rd.fail(path.substr(0, path.size() - 1), "expected a string or an object");
    }
    if (spec.name != "zo-rasa" && spec.name != "zo-rsgd-1" && spec.name != "zo-rsgd-m") {
      rd.fail(path + "name", "unknown algorithm '" + spec.name + "'");
    }
    if (spec.label.empty()) spec.label = spec.name;
    for (const auto& prev : cfg.algorithms) {
      if (prev.label == spec.label) rd.fail(path + "label", "duplicate algorithm label '" + spec.label + "'");
    }
    cfg.algorithms.push_back(spec);
  }
  return cfg;
}

inline GridConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Fully resolved parameters of one (problem, algorithm) pair.
struct CellPlan {
  std::string algorithm;  // label
  bool rasa = true;
  std::int64_t N = 0;
  // Zo-RASA
  double beta = 100.0;
  double tau_scale = 1.0;
  TauMode tau_mode = TauMode::SingleSample;
  std::optional<TauMode> tau_rule;
  // Zo-RSGD
  double step = 0.0;
  std::int64_t batch = 1;
};

/// Preset settings per problem, with N divided by 100 unless `full`:
///   k-PCA: N = 50000 n (Zo-RASA, Zo-RSGD-1), 50000 (Zo-RSGD-m); tau_k = 0.01/sqrt(N),
///          beta = 100; t = 1e-4/sqrt(N) (m = 1), 5e-4/sqrt(N) (m = n).
///   PSD:   N = 5000 n, 5000; tau_k = 1e-3/sqrt(N), beta = 100; t = 1e-5/sqrt(N).
/// Zo-RASA uses single-sample batches (m_0 = d, m_k = 1).
inline CellPlan resolve_plan(const ProblemSpec& p, const AlgorithmSpec& a, bool full) {
  const bool kpca = p.type == "kpca";
  const std::int64_t per_n = kpca ? 50000 : 5000;
  const std::int64_t divisor = full ? 1 : 100;
  // Preset constants are multiplied by sqrt(divisor) so that sum_k tau_k and
  // sum_k t_k match the full-scale schedule. Explicit config values are used
  // as given.
  const double boost = std::sqrt(static_cast<double>(divisor));
  CellPlan c;
  c.algorithm = a.label.empty() ? a.name : a.label;
  c.rasa = a.name == "zo-rasa";
  const bool minibatch = a.name == "zo-rsgd-m";
  c.N = a.N.value_or(minibatch ? per_n / divisor : per_n * p.n / divisor);
  if (c.rasa) {
    c.beta = a.beta.value_or(100.0);
    c.tau_scale = a.tau_scale.value_or((kpca ? 0.01 : 1e-3) * boost);
    c.tau_mode = a.tau_mode.value_or(TauMode::SingleSample);
    // presets use c / sqrt(N) with single-sample batches
    if (a.tau_rule) {
      c.tau_rule = a.tau_rule;
    } else if (!a.tau_mode) {
      c.tau_rule = TauMode::LargeBatch;
    }
  } else {
    const double scale = a.step_scale.value_or((kpca ? (minibatch ? 5e-4 : 1e-4) : 1e-5) * boost);
    c.step = scale / std::sqrt(static_cast<double>(c.N));
    c.batch = a.batch.value_or(minibatch ? p.n : 1);
  }
  return c;
}

}  // namespace zorasa::bench
