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

// Stroke, radical and character handwriting metrics.
//
// Times are milliseconds, lengths millimetres, pressures device units.
// Latencies (rt) measure from the previous unit's offset to the current unit's
// onset, durations from onset to the last pressed sample, lengths sum the
// straight-line distances between consecutive pressed samples, and pressure
// averages run over samples, never over per-stroke means.

#ifndef PENSTREAM_METRICS_H_
#define PENSTREAM_METRICS_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "penstream/pen_model.h"

namespace penstream {

using Maybe = std::optional<double>;  // NA when empty

struct StrokeMetrics {
  int stroke_label = 0;  // 1-based production order
  double stroke_dur = 0;
  Maybe stroke_rt_rel;   // NA for the first stroke
  double stroke_len = 0;
  Maybe stroke_dist;     // NA for the first stroke
  double stroke_press_avg = 0;
  double abs_rt = 0;     // audio offset to stroke onset; plots only

  friend bool operator==(const StrokeMetrics &, const StrokeMetrics &) = default;
};

struct RadicalMetrics {
  int rad_label = 0;
  double rad_dur = 0;
  Maybe rad_rt_rel;  // NA for the first radical
  double rad_len = 0;
  Maybe rad_dist;    // NA for the first radical
  double rad_press_avg = 0;

  friend bool operator==(const RadicalMetrics &, const RadicalMetrics &) = default;
};

struct CharacterMetrics {
  double char_dur = 0;
  double char_rt = 0;
  double char_len = 0;
  double char_press_avg = 0;

  friend bool operator==(const CharacterMetrics &, const CharacterMetrics &) = default;
};

// One long-format row per leaf stroke. Character and radical values repeat on
// every row they cover.
struct MetricRow {
  std::string subject;
  std::int64_t trial_id = 0;
  std::int64_t row_index = 0;
  std::int64_t self_report = 0;
  std::string target;
  CharacterMetrics character;
  RadicalMetrics radical;
  StrokeMetrics stroke;

  TrialKey key() const { return {subject, trial_id}; }
  friend bool operator==(const MetricRow &, const MetricRow &) = default;
};

inline constexpr std::array<std::string_view, 21> kLongFormatColumns = {
    "Subject",       "DV_TRIAL_ID",    "ROW_INDEX",     "self_report",
    "target",        "char_dur",       "char_rt",       "char_len",
    "char_press_avg", "rad_label",     "rad_dur",       "rad_rt_rel",
    "rad_len",       "rad_dist",       "rad_press_avg", "stroke_label",
    "stroke_dur",    "stroke_rt_rel",  "stroke_len",    "stroke_dist",
    "stroke_press_avg"};

// Throws EmptyTree when the tree has no strokes.
std::vector<MetricRow> compute_metrics(const TrialRecord &trial,
                                       const SegmentTree &tree,
                                       const TabletSpec &spec);

// Checks that each radical's latency and distance equal those of its first
// member stroke. Rows must come from one trial.
std::vector<std::string> first_member_consistency(const std::vector<MetricRow> &rows,
                                                  double tolerance = 1e-9);

// Totals that tie a radical to its member strokes.
struct RadicalComposition {
  double stroke_dur_sum = 0;
  double internal_rt_sum = 0;  // latencies of all members but the first
  double stroke_len_sum = 0;
  std::size_t members = 0;
};
RadicalComposition compose_radical(const std::vector<MetricRow> &rows, int rad_label);

// Totals that tie the character to its radicals.
struct CharacterComposition {
  double rad_dur_sum = 0;
  double rad_rt_sum = 0;  // non-NA radical latencies
  double rad_len_sum = 0;
};
CharacterComposition compose_character(const std::vector<MetricRow> &rows);

// Rounding used for exported values: milliseconds and pressures to integers,
// millimetres to three decimals.
std::string export_time(double ms);
std::string export_length(double mm);
std::string export_pressure(double pressure);
std::string export_maybe(const Maybe &value, std::string (*format)(double));

// The 21-column long format, tab separated, "NA" for missing cells.
std::string format_long_format(const std::vector<MetricRow> &rows);
std::vector<std::string> long_format_fields(const MetricRow &row);

// Reads a long-format table back. abs_rt is reconstructed from the
// character latency plus the preceding strokes' durations and latencies.
std::vector<MetricRow> parse_long_format(std::string_view text);

}  // namespace penstream

#endif  // PENSTREAM_METRICS_H_
