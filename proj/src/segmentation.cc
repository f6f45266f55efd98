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

#include "penstream/segmentation.h"

#include <optional>

#include "penstream/errors.h"

namespace penstream {

std::vector<StrokeSpan> detect_strokes(std::span<const PenSample> samples) {
  std::vector<StrokeSpan> strokes;
  std::size_t i = 0;
  while (i < samples.size()) {
    if (!samples[i].pressed()) {
      ++i;
      continue;
    }
    StrokeSpan span{i, i};
    while (span.last_index + 1 < samples.size() &&
           samples[span.last_index + 1].pressed()) {
      ++span.last_index;
    }
    strokes.push_back(span);
    i = span.last_index + 1;
  }
  return strokes;
}

SegmentTree build_segment_tree(const TrialRecord &trial,
                               std::span<const StrokeSpan> strokes,
                               std::span<const LabeledSpan> radical_spans) {
  SegmentTree tree;
  const auto &samples = trial.samples;

  if (radical_spans.empty()) {
    RadicalNode radical{"1", {}};
    for (std::size_t s = 0; s < strokes.size(); ++s) {
      radical.strokes.push_back(tree.strokes.size());
      tree.strokes.push_back({strokes[s], strokes[s].first_index, s, false});
    }
    if (!tree.strokes.empty()) tree.radicals.push_back(std::move(radical));
    return tree;
  }

  auto window_of = [&](double t) -> std::optional<std::size_t> {
    for (std::size_t r = 0; r < radical_spans.size(); ++r) {
      if (t >= radical_spans[r].t_start && t <= radical_spans[r].t_end) return r;
    }
    return std::nullopt;
  };

  std::vector<std::vector<std::size_t>> members(radical_spans.size());
  for (std::size_t s = 0; s < strokes.size(); ++s) {
    std::size_t first = strokes[s].first_index;
    const std::size_t last = strokes[s].last_index;
    bool continuation = false;
    while (first <= last) {
      auto window = window_of(samples[first].t);
      if (!window) throw UnassignedStroke(s + 1);
      const double end_t = radical_spans[*window].t_end;
      std::size_t part_last = first;
      while (part_last < last && samples[part_last + 1].t <= end_t) ++part_last;

      const std::size_t onset = continuation ? first - 1 : first;
      members[*window].push_back(tree.strokes.size());
      tree.strokes.push_back({{first, part_last}, onset, s, continuation});
      first = part_last + 1;
      continuation = true;
    }
  }

  for (std::size_t r = 0; r < radical_spans.size(); ++r) {
    if (members[r].empty()) continue;
    tree.radicals.push_back({radical_spans[r].label, std::move(members[r])});
  }
  return tree;
}

double calibrate_lpmm(double max_coordinate, double physical_extent_mm) {
  if (!(max_coordinate > 0) || !(physical_extent_mm > 0)) {
    throw NonPositiveInput("lpmm calibration needs positive inputs");
  }
  return max_coordinate / physical_extent_mm;
}

}  // namespace penstream
