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

#ifndef EBFL_PLOT_HPP_
#define EBFL_PLOT_HPP_

#include <span>
#include <string>
#include <vector>

#include "ebfl/metrics.hpp"

namespace ebfl {

struct PlotSeries {
  std::string label;
  std::vector<MetricsRow> rows;
};

// Label is the parent directory for files named metrics.csv, else the stem.
PlotSeries load_series(const std::string& path);

// Accuracy (solid, left axis) and cumulative round time (dashed, right axis)
// against cumulative energy, one color per series.
std::string render_svg(std::span<const PlotSeries> series);

void emit_plot(const std::vector<std::string>& metrics_files,
               const std::string& out_svg);

}  // namespace ebfl

#endif  // EBFL_PLOT_HPP_
