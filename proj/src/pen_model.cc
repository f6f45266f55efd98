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

#include "penstream/pen_model.h"

#include <cmath>

namespace penstream {

std::vector<std::string> validate_trial(const TrialRecord &record) {
  std::vector<std::string> violations;
  if (record.self_report < 0 || record.self_report > 2) {
    violations.emplace_back("self_report out of {0,1,2}");
  }
  if (record.aud_onset > record.aud_offset) {
    violations.emplace_back("aud_onset after aud_offset");
  }
  if (record.aud_offset > record.trial_end) {
    violations.emplace_back("aud_offset after trial_end");
  }
  if (record.trial_start > record.trial_end) {
    violations.emplace_back("trial_start after trial_end");
  }

  bool finite = true, sorted = true, in_window = true, non_negative = true;
  for (std::size_t i = 0; i < record.samples.size(); ++i) {
    const PenSample &s = record.samples[i];
    if (!std::isfinite(s.t) || !std::isfinite(s.x) || !std::isfinite(s.y) ||
        !std::isfinite(s.pressure)) {
      finite = false;
      continue;
    }
    if (s.pressure < 0) non_negative = false;
    if (s.t < record.trial_start || s.t > record.trial_end) in_window = false;
    if (i > 0 && s.t < record.samples[i - 1].t) sorted = false;
  }
  if (!finite) violations.emplace_back("non-finite sample value");
  if (!non_negative) violations.emplace_back("negative pressure");
  if (!sorted) violations.emplace_back("samples not sorted by t");
  if (!in_window) {
    violations.emplace_back("sample time outside [trial_start, trial_end]");
  }
  return violations;
}

std::vector<std::string> validate_tree(const TrialRecord &trial,
                                       const SegmentTree &tree) {
  std::vector<std::string> violations;
  const auto &samples = trial.samples;
  for (std::size_t i = 0; i < tree.strokes.size(); ++i) {
    const TreeStroke &leaf = tree.strokes[i];
    const StrokeSpan &span = leaf.span;
    const std::string name = "stroke " + std::to_string(i + 1);
    if (span.first_index > span.last_index || span.last_index >= samples.size()) {
      violations.push_back(name + " has an invalid index range");
      continue;
    }
    for (std::size_t k = span.first_index; k <= span.last_index; ++k) {
      if (!samples[k].pressed()) {
        violations.push_back(name + " contains a hovering sample");
        break;
      }
    }
    if (i > 0 && span.first_index <= tree.strokes[i - 1].span.last_index) {
      violations.push_back(name + " overlaps or precedes its predecessor");
    }
    const std::size_t expected_onset =
        leaf.continuation && i > 0 ? tree.strokes[i - 1].span.last_index
                                   : span.first_index;
    if (leaf.onset_index != expected_onset) {
      violations.push_back(name + " has an inconsistent onset sample");
    }
  }

  std::size_t next = 0;
  for (const RadicalNode &radical : tree.radicals) {
    if (radical.strokes.empty()) {
      violations.push_back("radical " + radical.label + " has no strokes");
    }
    for (std::size_t s : radical.strokes) {
      if (s != next) {
        violations.push_back("radical " + radical.label +
                             " does not continue the stroke sequence");
        break;
      }
      ++next;
    }
  }
  if (violations.empty() && next != tree.strokes.size()) {
    violations.emplace_back("radicals do not cover every stroke");
  }
  return violations;
}

}  // namespace penstream
