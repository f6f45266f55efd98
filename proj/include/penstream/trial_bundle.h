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


// JSON-lines exchange with the annotation tool. A `.trials.jsonl` file holds
// one trial per line with its samples, detected strokes and radical spans; a
// `.segments.jsonl` file returns edited radical spans. Both carry "v": 1.

#ifndef PENSTREAM_TRIAL_BUNDLE_H_
#define PENSTREAM_TRIAL_BUNDLE_H_

#include <string>
#include <string_view>
#include <vector>

#include "penstream/ingest.h"
#include "penstream/pen_model.h"

namespace penstream {

inline constexpr int kBundleVersion = 1;

struct TrialBundle {
  TrialRecord trial;
  TabletSpec tablet;
  std::vector<StrokeSpan> strokes;
  std::vector<LabeledSpan> radicals;  // may be empty

  friend bool operator==(const TrialBundle &, const TrialBundle &) = default;
};

// Radical spans reproducing `tree`: each radical runs from the first sample
// it owns to its last sample.
std::vector<LabeledSpan> radical_spans_of(const TrialRecord &trial, const SegmentTree &tree);

// One line per trial, ordered by trial key.
std::string export_bundles(const std::vector<TrialRecord> &trials,
                           const std::vector<SegmentTree> &trees, const TabletSpec &tablet);

// Throws MalformedRow naming the offending line.
std::vector<TrialBundle> parse_bundles(std::string_view text);

// `.segments.jsonl` lines: {"v":1,"subject":..,"trial_id":..,"radicals":[..]}.
std::string format_annotations(const SegmentsReport &report);

// Radical spans of a `.segments.jsonl` or edited `.trials.jsonl` file,
// checked for overlap only. Throws MalformedRow or OverlappingSpans.
SegmentsReport read_annotations(std::string_view text);

// Reads radical spans from a `.segments.jsonl` or edited `.trials.jsonl`
// file and checks them against the bundled trials. Throws MalformedRow,
// OverlappingSpans, UnassignedStroke, or DataError for a trial missing from
// `bundles`.
SegmentsReport import_annotations(std::string_view text, const std::vector<TrialBundle> &bundles);

}  // namespace penstream

#endif  // PENSTREAM_TRIAL_BUNDLE_H_
