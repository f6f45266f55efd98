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


// Seeded synthetic handwriting trials whose metrics are known in closed form.

#ifndef PENSTREAM_SYNTH_H_
#define PENSTREAM_SYNTH_H_

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "penstream/cleaning.h"
#include "penstream/ingest.h"
#include "penstream/metrics.h"
#include "penstream/pen_model.h"

namespace penstream {

struct SynthPoint {
  double x = 0;
  double y = 0;
};

// A pen-down movement along a polyline. Segment i runs from points[i] to
// points[i + 1] in steps[i] sample intervals at constant pressure
// pressures[i]; samples fall on the vertices and on evenly spaced points in
// between.
struct SynthStroke {
  std::vector<SynthPoint> points;
  std::vector<int> steps;
  std::vector<double> pressures;
  std::int64_t start_ms = 0;
  std::int64_t interval_ms = 5;
};

struct SynthSpec {
  std::uint64_t seed = 0;
  std::string subject = "1";
  std::int64_t trial_id = 1;
  std::int64_t row_index = 1;
  std::string target = "x";
  std::int64_t self_report = 0;
  std::int64_t aud_offset_ms = 0;
  std::vector<SynthStroke> strokes;
  // Consecutive stroke counts per radical; empty means one radical.
  std::vector<std::size_t> radical_sizes;
  // Pen-in-air samples along the straight path between strokes. Without it a
  // single lift sample still separates consecutive strokes.
  bool hover = false;
  // Relative per-sample pressure noise in [0, 1).
  double pressure_jitter = 0;
  double lpmm = 1;
};

// Throws InvalidSpec. Strokes must start strictly after the previous stroke's
// last sample plus two milliseconds, at or after time 0.
void validate_spec(const SynthSpec &spec);

struct SynthTrial {
  TrialRecord trial;
  std::vector<LabeledSpan> radical_spans;  // empty for a single radical
  std::vector<MetricRow> expected;
};

// The trial starts at time 0 with the audio onset; the trial ends 200 ms after
// the last sample. Throws InvalidSpec.
SynthTrial generate_trial(const SynthSpec &spec);

// Portable draws from a 64-bit Mersenne Twister.
class SynthRng {
 public:
  explicit SynthRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi);
  // Uniform real in [lo, hi).
  double real(double lo, double hi);
  bool chance(double p) { return real(0, 1) < p; }

 private:
  std::mt19937_64 engine_;
};

struct RandomSpecOptions {
  int min_strokes = 1;
  int max_strokes = 13;
  std::int64_t max_gap_ms = 600;
};

SynthSpec random_spec(std::uint64_t seed, const RandomSpecOptions &options = {});

struct CorpusOptions {
  std::uint64_t seed = 1;
  int sessions = 3;
  std::vector<std::string> characters;  // default: 24 built-in characters
  double lpmm = 100;
  double incorrect_share = 0.05;
  double revised_share = 0.03;
  double no_response_share = 0.02;
};

struct SynthSession {
  std::string name;
  std::vector<SynthTrial> trials;
};

struct Corpus {
  std::vector<SynthSession> sessions;
  std::vector<TrialCoding> codings;
  LexicalTable lexical;
  double lpmm = 1;
};

// One participant per session; every session writes each character once.
Corpus generate_corpus(const CorpusOptions &options = {});

// Relative path -> file content: reports/, segments/, lexical.tsv,
// codings.tsv and a penstream.ini that runs the full pipeline over them.
std::map<std::string, std::string> corpus_files(const Corpus &corpus);

}  // namespace penstream

#endif  // PENSTREAM_SYNTH_H_
