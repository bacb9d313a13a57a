// Copyright 2026 The ebfl Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ebfl/plot.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

#include "ebfl/error.hpp"

namespace ebfl {
namespace {

constexpr double kWidth = 820.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 80.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#17becf",
                                    "#8c564b", "#e377c2"};

std::string escape(const std::string& s) {
  std::string out;
  for (const char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

double nice_max(double v) {
  return v > 0.0 ? v * 1.05 : 1.0;
}

}  // namespace

PlotSeries load_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot read metrics '{}'", path));
  PlotSeries s;
  const std::filesystem::path p(path);
  s.label = p.filename() == "metrics.csv" && p.has_parent_path()
                ? p.parent_path().filename().string()
                : p.stem().string();
  try {
    s.rows = read_metrics_csv(in);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path, e.what()), e.line());
  }
  return s;
}

std::string render_svg(std::span<const PlotSeries> series) {
  double max_e = 0.0;
  double max_t = 0.0;
  bool any = false;
  for (const auto& s : series) {
    double t = 0.0;
    for (const auto& r : s.rows) {
      any = true;
      t += r.round_time_s;
      max_e = std::max(max_e, r.cum_energy_j);
    }
    max_t = std::max(max_t, t);
  }
  max_e = nice_max(max_e);
  max_t = nice_max(max_t);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto x_of = [&](double e) { return kLeft + pw * e / max_e; };
  const auto acc_y = [&](double a) { return kTop + ph * (1.0 - a); };
  const auto time_y = [&](double t) { return kTop + ph * (1.0 - t / max_t); };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      kWidth, kHeight);
  svg += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
      "stroke=\"#444\"/>\n",
      kLeft, kTop, pw, ph);
  for (int i = 0; i <= 5; ++i) {
    const double f = i / 5.0;
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.0f}</text>\n",
        x_of(f * max_e), kTop + ph + 18, f * max_e);
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.1f}</text>\n",
        kLeft - 6, acc_y(f) + 4, f);
    svg += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"start\">{:.0f}</text>\n",
        kLeft + pw + 6, time_y(f * max_t) + 4, f * max_t);
  }
  svg += fmt::format(
      "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">cumulative "
      "energy (J)</text>\n",
      kLeft + pw / 2, kHeight - 15);
  svg += fmt::format(
      "<text transform=\"translate(18 {:.1f}) rotate(-90)\" "
      "text-anchor=\"middle\">global accuracy</text>\n",
      kTop + ph / 2);
  svg += fmt::format(
      "<text transform=\"translate({:.1f} {:.1f}) rotate(90)\" "
      "text-anchor=\"middle\">cumulative round time (s)</text>\n",
      kWidth - 18, kTop + ph / 2);

  if (!any) {
    svg += fmt::format(
        "<text class=\"annotation\" x=\"{:.1f}\" y=\"{:.1f}\" "
        "text-anchor=\"middle\" fill=\"#666\">no rounds recorded</text>\n",
        kLeft + pw / 2, kTop + ph / 2);
  }

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::string acc_pts;
    std::string time_pts;
    double t = 0.0;
    for (const auto& r : s.rows) {
      t += r.round_time_s;
      acc_pts += fmt::format("{:.2f},{:.2f} ", x_of(r.cum_energy_j),
                             acc_y(r.global_acc));
      time_pts += fmt::format("{:.2f},{:.2f} ", x_of(r.cum_energy_j), time_y(t));
    }
    if (!s.rows.empty()) {
      svg += fmt::format(
          "<polyline class=\"accuracy\" fill=\"none\" stroke=\"{}\" "
          "stroke-width=\"2\" points=\"{}\"/>\n",
          color, acc_pts);
      svg += fmt::format(
          "<polyline class=\"time\" fill=\"none\" stroke=\"{}\" "
          "stroke-width=\"1.5\" stroke-dasharray=\"6 4\" points=\"{}\"/>\n",
          color, time_pts);
    }
    const double ly = kTop + 14.0 + 16.0 * static_cast<double>(k);
    svg += fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" "
        "stroke=\"{3}\" stroke-width=\"2\"/>\n",
        kLeft + 10, ly - 4, kLeft + 30, color);
    svg += fmt::format(
        "<text class=\"legend\" x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n",
        kLeft + 36, ly, escape(s.label));
  }
  svg += "</svg>\n";
  return svg;
}

void emit_plot(const std::vector<std::string>& metrics_files,
               const std::string& out_svg) {
  std::vector<PlotSeries> series;
  for (const auto& f : metrics_files) series.push_back(load_series(f));
  std::ofstream out(out_svg);
  if (!out) throw IoError(fmt::format("cannot write '{}'", out_svg));
  out << render_svg(series);
}

}  // namespace ebfl
