#pragma once

#include "zorasa/bench/csv.hpp"
#include "zorasa/bench/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace zorasa::bench {

namespace svg_detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

/// One panel: linear x axis, log10 y axis. Non-positive or non-finite points
/// are skipped.
inline std::string panel(const std::vector<Series>& series, const std::string& title, double ox, double oy,
                         double w, double h) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.y[i] > 0) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, std::log10(s.y[i]));
      ymax = std::max(ymax, std::log10(s.y[i]));
    }
  }
  std::string out;
  const double left = ox + 60, right = ox + w - 10, top = oy + 30, bottom = oy + h - 40;
  out += "<text x=\"" + num((left + right) / 2) + "\" y=\"" + num(oy + 18) +
         "\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) + "</text>\n";
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(right - left) + "\" height=\"" +
         num(bottom - top) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  if (!std::isfinite(xmin)) {
    out += "<text x=\"" + num((left + right) / 2) + "\" y=\"" + num((top + bottom) / 2) +
           "\" text-anchor=\"middle\" font-size=\"12\">no positive data</text>\n";
    return out;
  }
  if (xmax == xmin) xmax = xmin + 1;
  double lo = std::floor(ymin), hi = std::ceil(ymax);
  if (hi == lo) hi = lo + 1;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (right - left); };
  auto py = [&](double ly) { return bottom - (ly - lo) / (hi - lo) * (bottom - top); };

  const int step = std::max(1, static_cast<int>((hi - lo) / 6));
  for (double e = lo; e <= hi; e += step) {
    out += "<line x1=\"" + num(left) + "\" x2=\"" + num(right) + "\" y1=\"" + num(py(e)) + "\" y2=\"" + num(py(e)) +
           "\" stroke=\"#ddd\"/>\n";
    out += "<text x=\"" + num(left - 5) + "\" y=\"" + num(py(e) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">1e" + std::to_string(static_cast<int>(e)) + "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double x = xmin + (xmax - xmin) * i / 4.0;
    out += "<text x=\"" + num(px(x)) + "\" y=\"" + num(bottom + 15) + "\" text-anchor=\"middle\" font-size=\"11\">" +
           tick_label(x) + "</text>\n";
  }
  out += "<text x=\"" + num((left + right) / 2) + "\" y=\"" + num(bottom + 32) +
         "\" text-anchor=\"middle\" font-size=\"12\">oracle calls</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.y[i] > 0) || !std::isfinite(s.y[i])) continue;
      pts += num(px(s.x[i])) + "," + num(py(std::log10(s.y[i]))) + " ";
    }
    out += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" + std::string(kColors[k % 6]) + "\" points=\"" +
           pts + "\"/>\n";
  }
  return out;
}

}  // namespace svg_detail

/// Three-panel figure (optimality gap, gradient norm, problem metric) for one
/// problem instance, one line per algorithm.
inline std::string render_figure(const std::vector<AggregateRow>& rows, const std::string& title) {
  using svg_detail::Series;
  std::vector<std::string> algos;
  for (const auto& r : rows)
    if (std::find(algos.begin(), algos.end(), r.algorithm) == algos.end()) algos.push_back(r.algorithm);

  const std::string metric_name = !rows.empty() && rows.front().problem == "kpca" ? "principal angles ||Theta||_F"
                                                                                  : "||G G^T - W*||_F";
  const char* names[3] = {"optimality gap", "||grad f||", nullptr};
  std::vector<Series> panels[3];
  for (const auto& a : algos) {
    Series s[3];
    for (auto& x : s) x.name = a;
    for (const auto& r : rows) {
      if (r.algorithm != a) continue;
      const double vals[3] = {r.f_gap, r.grad_norm, r.problem_metric};
      for (int k = 0; k < 3; ++k) {
        s[k].x.push_back(r.oracle_calls);
        s[k].y.push_back(vals[k]);
      }
    }
    for (int k = 0; k < 3; ++k) panels[k].push_back(std::move(s[k]));
  }

  const double W = 1200, H = 420, pw = W / 3;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_detail::num(W) + "\" height=\"" +
                    svg_detail::num(H) + "\" font-family=\"sans-serif\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + svg_detail::num(W / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"16\">" +
         svg_detail::escape(title) + "</text>\n";
  for (int k = 0; k < 3; ++k) {
    out += svg_detail::panel(panels[k], names[k] ? names[k] : metric_name, k * pw, 25, pw, H - 60);
  }
  for (std::size_t i = 0; i < algos.size(); ++i) {
    const double x = 80 + 200.0 * static_cast<double>(i);
    out += "<line x1=\"" + svg_detail::num(x) + "\" x2=\"" + svg_detail::num(x + 25) + "\" y1=\"" +
           svg_detail::num(H - 12) + "\" y2=\"" + svg_detail::num(H - 12) + "\" stroke=\"" +
           svg_detail::kColors[i % 6] + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + svg_detail::num(x + 30) + "\" y=\"" + svg_detail::num(H - 8) + "\" font-size=\"12\">" +
           svg_detail::escape(algos[i]) + "</text>\n";
  }
  return out + "</svg>\n";
}

/// Reads <dir>/aggregate.csv and writes <dir>/plots/<problem>_n<n>_r<r>.svg.
/// Returns the written paths.
inline std::vector<std::filesystem::path> plot_directory(const std::filesystem::path& dir) {
  const auto rows = parse_aggregate_csv(read_file(dir / "aggregate.csv"));
  std::map<std::string, std::vector<AggregateRow>> groups;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    const std::string key = r.problem + "_n" + std::to_string(r.n) + "_r" + std::to_string(r.r);
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(r);
  }
  std::vector<std::filesystem::path> written;
  for (const auto& key : order) {
    const auto& g = groups[key];
    const std::string title = (g.front().problem == "kpca" ? "k-PCA" : "fixed-rank PSD") + std::string(" n=") +
                              std::to_string(g.front().n) + " r=" + std::to_string(g.front().r);
    const auto path = dir / "plots" / (key + ".svg");
    write_file_atomic(path, render_figure(g, title));
    written.push_back(path);
  }
  return written;
}

}  // namespace zorasa::bench
