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

// Response coding, outlier exclusion and item-level aggregation.

#ifndef PENSTREAM_CLEANING_H_
#define PENSTREAM_CLEANING_H_

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "penstream/metrics.h"

namespace penstream {

enum class Coding { kCorrect, kIncorrect, kRevised };

std::string_view coding_name(Coding coding);

// Everything known about a trial apart from its pen data. Trials without any
// pressed sample still carry a coding so they count towards amnesia rates.
struct TrialCoding {
  TrialKey key;
  std::int64_t row_index = 0;
  std::string target;
  std::int64_t self_report = 0;
  Coding coding = Coding::kCorrect;
  bool responded = true;

  friend bool operator==(const TrialCoding &, const TrialCoding &) = default;
};

// Columns Subject, DV_TRIAL_ID, ROW_INDEX, target, self_report, coding,
// responded.
std::string format_trial_codings(const std::vector<TrialCoding> &codings);
// Requires Subject, DV_TRIAL_ID, target, self_report and coding; ROW_INDEX
// and responded are optional.
std::vector<TrialCoding> parse_trial_codings(std::string_view text);

// Exclusion is strict: a value is dropped iff it is above a maximum or below
// a minimum.
struct ExclusionPolicy {
  double char_rt_max = 10000;
  double char_dur_min = 1000;
  double char_dur_max = 10000;
  double rad_rt_max = 2000;
  double rad_dur_max = 2000;
  double stroke_rt_max = 2000;
  double stroke_dur_max = 2000;
  bool drop_incorrect = true;
  bool drop_revised = true;
};

// Throws ConfigError unless every threshold is positive and
// char_dur_min < char_dur_max.
void validate_policy(const ExclusionPolicy &policy);

struct CharacterObservation {
  TrialKey key;
  std::string target;
  Maybe char_rt, char_dur, char_len, char_press_avg;
};

struct RadicalObservation {
  TrialKey key;
  std::string target;
  int rad_label = 0;
  Maybe rad_rt_rel, rad_dur, rad_len, rad_dist, rad_press_avg;
};

struct StrokeObservation {
  TrialKey key;
  std::string target;
  int stroke_label = 0;
  Maybe stroke_rt_rel, stroke_dur, stroke_len, stroke_dist, stroke_press_avg;
};

// Observations that survived coding exclusion. A value removed by a threshold
// becomes NA without touching the other measures of the same unit.
struct RetainedData {
  std::vector<TrialKey> trials;  // every coded trial that passed the coding filter
  std::vector<CharacterObservation> characters;
  std::vector<RadicalObservation> radicals;
  std::vector<StrokeObservation> strokes;
};

struct MeasureExclusion {
  std::string level;    // character, radical, stroke
  std::string measure;  // latency, duration
  std::size_t observed = 0;
  std::size_t removed = 0;

  double fraction() const {
    return observed == 0 ? 0.0 : static_cast<double>(removed) / static_cast<double>(observed);
  }
};

struct ExclusionStats {
  std::size_t trials = 0;
  std::size_t incorrect_removed = 0;
  std::size_t revised_removed = 0;
  std::vector<MeasureExclusion> measures;

  const MeasureExclusion &find(std::string_view level, std::string_view measure) const;
};

// Throws UnlabeledTrial when a trial in `rows` has no coding.
std::pair<RetainedData, ExclusionStats> apply_exclusions(
    const std::vector<MetricRow> &rows, const std::vector<TrialCoding> &codings,
    const ExclusionPolicy &policy);

std::string format_exclusion_stats(const ExclusionStats &stats);

// The fourteen lexical predictors, in table order.
inline constexpr std::array<std::string_view, 14> kLexicalPredictors = {
    "phonogram",          "sound_radical_order", "regularity",
    "homophone_density",  "number_of_meanings",  "imageability",
    "concreteness",       "frequency",           "age_of_acquisition",
    "number_of_strokes",  "number_of_radicals",  "left_right",
    "top_bottom",         "word_familiarity"};

// "sound_radical_order" -> "Sound radical order". Unknown names pass through.
std::string display_name(std::string_view name);

struct LexicalTable {
  std::map<std::string, std::array<double, kLexicalPredictors.size()>> entries;
};

// Key column "character" (or "target"); predictor headers match after
// lower-casing and mapping spaces and hyphens to underscores.
LexicalTable parse_lexical_table(std::string_view text);
std::string format_lexical_table(const LexicalTable &table);

// Per-character measures, in output column order.
inline constexpr std::array<std::string_view, 14> kItemMeasures = {
    "char_rt",       "char_dur",    "char_len",      "char_press_avg",
    "rad_rt_rel",    "rad_dur",     "rad_len",       "rad_dist",
    "rad_press_avg", "stroke_rt_rel", "stroke_dur",  "stroke_len",
    "stroke_dist",   "stroke_press_avg"};

struct ItemRow {
  std::string character;
  std::size_t trials = 0;
  double amnesia_rate = 0;
  std::array<Maybe, kItemMeasures.size()> measures;
  std::array<double, kLexicalPredictors.size()> predictors{};
};

struct ItemTable {
  std::vector<ItemRow> rows;  // sorted by character

  // Looks up a measure, "amnesia_rate" or a predictor by name. Throws
  // ConfigError for an unknown name.
  Maybe value(const ItemRow &row, std::string_view name) const;
  static bool has_column(std::string_view name);
};

enum class AmnesiaDenominator { kAllCodedTrials, kRetainedTrials };

// Pooled means of every retained observation per character, plus the share of
// trials self-reported as amnesia. Throws MissingLexicalEntry.
ItemTable aggregate_items(const RetainedData &retained,
                          const std::vector<TrialCoding> &codings,
                          const LexicalTable &lexical,
                          AmnesiaDenominator denominator = AmnesiaDenominator::kAllCodedTrials);

std::string format_item_table(const ItemTable &table);
ItemTable parse_item_table(std::string_view text);

}  // namespace penstream

#endif  // PENSTREAM_CLEANING_H_
