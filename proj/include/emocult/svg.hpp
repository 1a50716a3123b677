#pragma once

// Minimal SVG emitters for the plane scatter and the grouped awareness bars.

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "emocult/io.hpp"

namespace emocult::svg {

inline std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline const std::vector<std::string>& palette() {
  static const std::vector<std::string> colors = {"#1f4fd8", "#c62828", "#2e7d32", "#6a1b9a",
                                                  "#ef6c00", "#00838f", "#5d4037", "#ad1457"};
  return colors;
}

// Settings JSON carried inside the drawing so the file describes how it was made.
inline std::string metadata(std::string_view settings) {
  if (settings.empty()) return {};
  return "<metadata class=\"settings\">" + escape(settings) + "</metadata>\n";
}

inline std::string num(double x) { return io::format_fixed(x, 2); }

struct ScatterPoint {
  std::string label;
  std::string series;  // e.g. language; one color per series
  double x = 0.0;
  double y = 0.0;
};

/// Valence (x) / arousal (y) scatter with gray reference markers at (+-1,0), (0,+-1).
inline std::string plane_scatter(const std::vector<ScatterPoint>& points, std::string_view title,
                                 std::string_view settings = {}) {
  constexpr double width = 640, height = 520, margin = 60;
  double lo_x = -1.5, hi_x = 1.5, lo_y = -1.5, hi_y = 1.5;
  for (const auto& p : points) {
    lo_x = std::min(lo_x, p.x - 0.1);
    hi_x = std::max(hi_x, p.x + 0.1);
    lo_y = std::min(lo_y, p.y - 0.1);
    hi_y = std::max(hi_y, p.y + 0.1);
  }
  auto sx = [&](double x) { return margin + (x - lo_x) / (hi_x - lo_x) * (width - 2 * margin); };
  auto sy = [&](double y) { return height - margin - (y - lo_y) / (hi_y - lo_y) * (height - 2 * margin); };

  std::map<std::string, std::string> color_of;
  for (const auto& p : points)
    if (!color_of.count(p.series)) color_of.emplace(p.series, "");
  {
    std::size_t i = 0;
    for (auto& [_, c] : color_of) c = palette()[i++ % palette().size()];
  }

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
       "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += metadata(settings);
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(width / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) +
       "</text>\n";
  // axes through the origin
  s += "<line x1=\"" + num(sx(lo_x)) + "\" y1=\"" + num(sy(0)) + "\" x2=\"" + num(sx(hi_x)) + "\" y2=\"" + num(sy(0)) +
       "\" stroke=\"#999\"/>\n";
  s += "<line x1=\"" + num(sx(0)) + "\" y1=\"" + num(sy(lo_y)) + "\" x2=\"" + num(sx(0)) + "\" y2=\"" + num(sy(hi_y)) +
       "\" stroke=\"#999\"/>\n";
  s += "<text x=\"" + num(width / 2) + "\" y=\"" + num(height - 18) + "\" text-anchor=\"middle\">valence</text>\n";
  s += "<text x=\"18\" y=\"" + num(height / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
       num(height / 2) + ")\">arousal</text>\n";

  const struct {
    double x, y;
    const char* name;
  } refs[] = {{1, 0, "PV"}, {-1, 0, "NV"}, {0, 1, "HA"}, {0, -1, "LA"}};
  for (const auto& r : refs) {
    s += "<circle class=\"anchor\" cx=\"" + num(sx(r.x)) + "\" cy=\"" + num(sy(r.y)) +
         "\" r=\"5\" fill=\"lightgray\"/>\n";
    s += "<text x=\"" + num(sx(r.x) + 7) + "\" y=\"" + num(sy(r.y) - 7) + "\" font-style=\"italic\">" + r.name +
         "</text>\n";
  }
  for (const auto& p : points) {
    const auto& c = color_of[p.series];
    s += "<circle class=\"point\" data-label=\"" + escape(p.label) + "\" data-series=\"" + escape(p.series) +
         "\" data-x=\"" + io::format_number(p.x) + "\" data-y=\"" + io::format_number(p.y) + "\" cx=\"" + num(sx(p.x)) +
         "\" cy=\"" + num(sy(p.y)) + "\" r=\"5\" fill=\"" + c + "\"/>\n";
    s += "<text x=\"" + num(sx(p.x) + 7) + "\" y=\"" + num(sy(p.y) + 4) + "\">" + escape(p.label) + "</text>\n";
  }
  double ly = 44;
  for (const auto& [series, c] : color_of) {
    s += "<circle cx=\"" + num(width - 120) + "\" cy=\"" + num(ly) + "\" r=\"5\" fill=\"" + c + "\"/>\n";
    s += "<text x=\"" + num(width - 110) + "\" y=\"" + num(ly + 4) + "\">" + escape(series) + "</text>\n";
    ly += 18;
  }
  s += "</svg>\n";
  return s;
}

struct Bar {
  std::string group;   // x-axis cluster, e.g. context mode
  std::string series;  // color, e.g. language
  double value = 0.0;
};

/// Clustered bars, one cluster per group in first-seen order; values printed on top.
inline std::string grouped_bars(const std::vector<Bar>& bars, std::string_view title, double y_max,
                                std::string_view settings = {}) {
  std::vector<std::string> groups, series;
  for (const auto& b : bars) {
    if (std::find(groups.begin(), groups.end(), b.group) == groups.end()) groups.push_back(b.group);
    if (std::find(series.begin(), series.end(), b.series) == series.end()) series.push_back(b.series);
  }
  constexpr double height = 360, margin = 50, bar_w = 28, gap = 40;
  const double cluster_w = static_cast<double>(std::max<std::size_t>(series.size(), 1)) * bar_w;
  const double width = 2 * margin + static_cast<double>(groups.size()) * (cluster_w + gap) + 120;
  auto sy = [&](double v) { return height - margin - v / y_max * (height - 2 * margin); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
       "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += metadata(settings);
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) +
       "</text>\n";
  s += "<line x1=\"" + num(margin) + "\" y1=\"" + num(sy(0)) + "\" x2=\"" + num(width - 120) + "\" y2=\"" +
       num(sy(0)) + "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= static_cast<int>(y_max); ++t)
    s += "<text x=\"" + num(margin - 8) + "\" y=\"" + num(sy(t) + 4) + "\" text-anchor=\"end\">" +
         std::to_string(t) + "</text>\n";
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double x0 = margin + gap / 2 + static_cast<double>(g) * (cluster_w + gap);
    for (const auto& b : bars) {
      if (b.group != groups[g]) continue;
      auto k = static_cast<std::size_t>(std::find(series.begin(), series.end(), b.series) - series.begin());
      const double x = x0 + static_cast<double>(k) * bar_w;
      const auto& c = palette()[k % palette().size()];
      s += "<rect class=\"bar\" data-group=\"" + escape(b.group) + "\" data-series=\"" + escape(b.series) +
           "\" data-value=\"" + io::format_number(b.value) + "\" x=\"" + num(x + 2) + "\" y=\"" + num(sy(b.value)) +
           "\" width=\"" + num(bar_w - 4) + "\" height=\"" + num(sy(0) - sy(b.value)) + "\" fill=\"" + c +
           "\" fill-opacity=\"0.4\" stroke=\"" + c + "\"/>\n";
      s += "<text x=\"" + num(x + bar_w / 2) + "\" y=\"" + num(sy(b.value) - 4) + "\" text-anchor=\"middle\">" +
           io::format_fixed(b.value, 2) + "</text>\n";
    }
    s += "<text x=\"" + num(x0 + cluster_w / 2) + "\" y=\"" + num(sy(0) + 18) + "\" text-anchor=\"middle\">" +
         escape(groups[g]) + "</text>\n";
  }
  double ly = 44;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& c = palette()[k % palette().size()];
    s += "<rect x=\"" + num(width - 105) + "\" y=\"" + num(ly - 9) + "\" width=\"10\" height=\"10\" fill=\"" + c +
         "\"/>\n";
    s += "<text x=\"" + num(width - 90) + "\" y=\"" + num(ly) + "\">" + escape(series[k]) + "</text>\n";
    ly += 16;
  }
  s += "</svg>\n";
  return s;
}

}  // namespace emocult::svg
