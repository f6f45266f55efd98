// Copyright 2026 The Penstream Authors
//
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


// Vector-graphic (SVG) renderings of trials and correlation matrices. Output
// is a pure function of the inputs.

#ifndef PENSTREAM_VIZ_H_
#define PENSTREAM_VIZ_H_

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "penstream/metrics.h"
#include "penstream/pen_model.h"
#include "penstream/stats.h"

namespace penstream {

struct PlotSpec {
  double width = 400;  // px, per character image or stroke panel
  double height = 400;
  double margin = 20;
  int panel_columns = 4;
  std::string stroke_color = "#000000";
  std::string current_color = "#7b1fa2";
  std::string faded_color = "#c8c8c8";
  std::string air_color = "#9e9e9e";
  std::string onset_color = "#7b1fa2";
  std::string link_color = "#2e7d32";
  double line_width = 2;
  double dot_radius = 1.5;
  double font_size = 11;
};

// Throws ConfigError unless sizes are positive and the margins leave room to
// draw.
void validate_plot_spec(const PlotSpec &spec);

// "<subject>_<item>_<character>", the item being the trial's ROW_INDEX.
std::string plot_file_stem(const TrialRecord &trial);

// The written character: one polyline per stroke. Throws EmptyTree.
std::string render_character(const TrialRecord &trial, const SegmentTree &tree,
                             const PlotSpec &spec = {});

// One panel per stroke in production order. `rows` are the trial's metric
// rows, one per tree stroke. Throws EmptyTree.
std::string render_stroke_panels(const TrialRecord &trial, const SegmentTree &tree,
                                 const std::vector<MetricRow> &rows,
                                 const PlotSpec &spec = {});

// Panel annotation labels, in drawing order.
inline constexpr std::array<std::string_view, 6> kPanelLabels = {
    "Abs RT", "Avg Pressure", "S length", "Prev Dist", "Start, RT", "End, Dur"};

// The value text shown next to each panel label.
std::vector<std::string> panel_values(const MetricRow &row);

// Colored grid with r to two decimals plus significance stars. Throws
// NonSquare.
std::string render_correlation_heatmap(const CorrelationMatrix &matrix,
                                       const PlotSpec &spec = {});

}  // namespace penstream

#endif  // PENSTREAM_VIZ_H_
