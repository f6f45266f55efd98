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

#ifndef PENSTREAM_SEGMENTATION_H_
#define PENSTREAM_SEGMENTATION_H_

#include <span>
#include <vector>

#include "penstream/ingest.h"
#include "penstream/pen_model.h"

namespace penstream {

// Maximal runs of consecutive pressed samples, in time order. Hovering samples
// belong to no stroke.
std::vector<StrokeSpan> detect_strokes(std::span<const PenSample> samples);
inline std::vector<StrokeSpan> detect_strokes(const TrialRecord &trial) {
  return detect_strokes(trial.samples);
}

// Groups strokes into radicals and the character root.
//
// With no radical spans, every stroke goes into a single radical. Otherwise a
// stroke joins the first radical whose [t_start, t_end] window contains its
// onset time. If the stroke runs past that window's end it is split: the last
// sample at or before the end closes the first part and the following sample
// opens a continuation part, which is assigned the same way. Radicals that
// receive no stroke are dropped.
//
// Throws UnassignedStroke (1-based detected stroke number) when an onset lies
// outside every window.
SegmentTree build_segment_tree(const TrialRecord &trial,
                               std::span<const StrokeSpan> strokes,
                               std::span<const LabeledSpan> radical_spans = {});

// Device units per millimetre from a full-surface coordinate and the physical
// extent it spans. Throws NonPositiveInput.
double calibrate_lpmm(double max_coordinate, double physical_extent_mm);

}  // namespace penstream

#endif  // PENSTREAM_SEGMENTATION_H_
