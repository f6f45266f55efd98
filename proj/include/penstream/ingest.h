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

// Readers and writers for the text reports exported by the segmentation tool:
// the pen sample report, the segments report and the experiment condition
// file.

#ifndef PENSTREAM_INGEST_H_
#define PENSTREAM_INGEST_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "penstream/pen_model.h"
#include "penstream/text_table.h"

namespace penstream {

enum class TimeUnit { kSeconds, kMilliseconds };

struct IngestOptions {
  TimeUnit units = TimeUnit::kMilliseconds;
  ColumnAliases aliases;
};

// Canonical pen sample report columns.
namespace column {
inline constexpr std::string_view kSubject = "subject";
inline constexpr std::string_view kTrialId = "DV_TRIAL_ID";
inline constexpr std::string_view kTime = "time";
inline constexpr std::string_view kX = "x";
inline constexpr std::string_view kY = "y";
inline constexpr std::string_view kPressure = "pressure";
inline constexpr std::string_view kSegmentLevel = "segment_level";
inline constexpr std::string_view kSegmentLabel = "segment_label";
inline constexpr std::string_view kAudOnset = "DV_AUD_ONSET";
inline constexpr std::string_view kAudOffset = "DV_AUD_OFFSET";
inline constexpr std::string_view kTrialStart = "DV_TRIAL_START";
inline constexpr std::string_view kTrialEnd = "DV_TRIAL_END";
inline constexpr std::string_view kSelfReport = "self_report";
inline constexpr std::string_view kTarget = "target";
inline constexpr std::string_view kRowIndex = "ROW_INDEX";
inline constexpr std::string_view kRevised = "revised";
}  // namespace column

// Groups sample rows by (subject, trial id) and sorts each trial's samples by
// time. Trials come back ordered by subject, then trial id. Trial variables
// absent from the report default to the sample time range (trial bounds and
// audio times), self_report 0, ROW_INDEX = trial id and an empty target.
//
// Throws MissingColumn, MalformedRow or EmptyReport.
std::vector<TrialRecord> parse_pen_sample_report(std::string_view text,
                                                 const IngestOptions &options = {});

// Tab-separated, milliseconds, every optional trial-variable column included.
std::string serialize_pen_sample_report(const std::vector<TrialRecord> &trials);

enum class SegmentLevel { kCharacter, kRadical, kStroke };

std::string_view level_name(SegmentLevel level);

struct LabeledSpan {
  SegmentLevel level = SegmentLevel::kRadical;
  std::string label;
  double t_start = 0;
  double t_end = 0;

  friend bool operator==(const LabeledSpan &, const LabeledSpan &) = default;
};

// Per-trial spans, each trial's list sorted by level then start time.
struct SegmentsReport {
  std::map<TrialKey, std::vector<LabeledSpan>> trials;

  // Radical spans of one trial in time order; empty if none were annotated.
  std::vector<LabeledSpan> radicals(const TrialKey &key) const;
  void merge(const SegmentsReport &other);
  friend bool operator==(const SegmentsReport &, const SegmentsReport &) = default;
};

// Throws OverlappingSpans when two spans of the same level overlap in time
// within one trial. Spans that only touch at an endpoint are accepted.
void check_no_overlap(const TrialKey &key, std::vector<LabeledSpan> &spans);

// Columns {subject, DV_TRIAL_ID, level, label, t_start, t_end}.
SegmentsReport parse_segments_report(std::string_view text,
                                     const IngestOptions &options = {});
std::string serialize_segments_report(const SegmentsReport &report);

// Collects the per-sample segment labels of a pen sample report into spans:
// every (level, label) pair becomes [first time, last time] of its samples.
SegmentsReport segments_from_sample_labels(std::string_view text,
                                           const IngestOptions &options = {});

struct ConditionTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

ConditionTable parse_condition_file(std::string_view text);

// Reports every violation of the condition-file rules: the DV_* and ROW_INDEX
// columns exist, each placeholder has the type its recorded value will have,
// and ROW_INDEX holds unique positive integers.
std::vector<std::string> validate_condition_file(const ConditionTable &table);

}  // namespace penstream

#endif  // PENSTREAM_INGEST_H_
