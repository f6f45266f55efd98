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

// Core domain types: pen samples, dictation trials, tablet geometry and the
// character -> radical -> stroke segment tree built over a trial's samples.

#ifndef PENSTREAM_PEN_MODEL_H_
#define PENSTREAM_PEN_MODEL_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace penstream {

// One digitizer reading. Time is milliseconds since session start; x and y
// stay in device units. Zero pressure means the pen hovers in range.
struct PenSample {
  double t = 0;
  double x = 0;
  double y = 0;
  double pressure = 0;

  bool pressed() const { return pressure > 0; }
  friend bool operator==(const PenSample &, const PenSample &) = default;
};

// Identifies a trial within a corpus.
struct TrialKey {
  std::string subject;
  std::int64_t trial_id = 0;

  std::string str() const { return subject + "/" + std::to_string(trial_id); }
  friend auto operator<=>(const TrialKey &, const TrialKey &) = default;
  friend bool operator==(const TrialKey &, const TrialKey &) = default;
};

// Self-report codes collected after each trial.
enum class SelfReport : int { kCorrect = 0, kAmnesia = 1, kUnknown = 2 };

struct TrialRecord {
  std::string subject_id;
  std::int64_t trial_id = 0;
  std::int64_t row_index = 0;
  std::string target;
  std::int64_t self_report = 0;
  double aud_onset = 0;
  double aud_offset = 0;
  double trial_start = 0;
  double trial_end = 0;
  std::vector<PenSample> samples;
  bool revised = false;

  TrialKey key() const { return {subject_id, trial_id}; }
  friend bool operator==(const TrialRecord &, const TrialRecord &) = default;
};

struct TabletSpec {
  double lpmm = 1.0;
  double sample_rate_hz = 200.0;
  double width_mm = 0;   // 0 when unknown
  double height_mm = 0;  // 0 when unknown
};

// Inclusive index range into a trial's samples.
struct StrokeSpan {
  std::size_t first_index = 0;
  std::size_t last_index = 0;

  std::size_t size() const { return last_index - first_index + 1; }
  friend bool operator==(const StrokeSpan &, const StrokeSpan &) = default;
};

// A leaf of the segment tree. Usually a whole detected stroke; when a stroke
// straddles a radical boundary it is split and each part becomes a leaf.
//
// The samples a leaf owns are span.first_index..span.last_index. Its onset
// sample is onset_index: for a continuation part that is the last sample of
// the preceding part, since the pen never lifted between them.
struct TreeStroke {
  StrokeSpan span;
  std::size_t onset_index = 0;
  std::size_t source_stroke = 0;  // index into the detected strokes
  bool continuation = false;

  friend bool operator==(const TreeStroke &, const TreeStroke &) = default;
};

struct RadicalNode {
  std::string label;
  std::vector<std::size_t> strokes;  // indices into SegmentTree::strokes

  friend bool operator==(const RadicalNode &, const RadicalNode &) = default;
};

// The character is the root and owns every radical; radicals partition the
// leaf strokes in production order.
struct SegmentTree {
  std::vector<TreeStroke> strokes;
  std::vector<RadicalNode> radicals;

  bool empty() const { return strokes.empty(); }
  friend bool operator==(const SegmentTree &, const SegmentTree &) = default;
};

// Checks every TrialRecord invariant. Never throws; an empty result means the
// record is well formed.
std::vector<std::string> validate_trial(const TrialRecord &record);

// Checks the structural invariants of a tree against its trial.
std::vector<std::string> validate_tree(const TrialRecord &trial,
                                       const SegmentTree &tree);

}  // namespace penstream

#endif  // PENSTREAM_PEN_MODEL_H_
