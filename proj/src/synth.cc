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


#include "penstream/synth.h"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "penstream/errors.h"
#include "penstream/text_table.h"

namespace penstream {
namespace {

const std::vector<std::string> kDefaultCharacters = {
    "稻", "罢", "择", "雕", "锅", "讽", "害", "芳", "清", "河", "湖", "海",
    "森", "林", "花", "草", "树", "桥", "晴", "情", "请", "猜", "睛", "静"};

struct StrokeGeometry {
  std::int64_t onset = 0;
  std::int64_t offset = 0;
  SynthPoint first, last;
  double length = 0;  // device units
  std::vector<double> pressures;
};

double mean(const std::vector<double> &v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double distance(const SynthPoint &a, const SynthPoint &b) { return std::hypot(b.x - a.x, b.y - a.y); }

}  // namespace

std::int64_t SynthRng::integer(std::int64_t lo, std::int64_t hi) {
  const auto range = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(engine_() % range);
}

double SynthRng::real(double lo, double hi) {
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

void validate_spec(const SynthSpec &spec) {
  if (!(spec.lpmm > 0) || !std::isfinite(spec.lpmm)) throw InvalidSpec("lpmm must be positive");
  if (!(spec.pressure_jitter >= 0 && spec.pressure_jitter < 1)) {
    throw InvalidSpec("pressure jitter must lie in [0, 1)");
  }
  if (spec.aud_offset_ms < 0) throw InvalidSpec("audio offset must be non-negative");
  std::int64_t previous_end = -1;
  for (std::size_t i = 0; i < spec.strokes.size(); ++i) {
    const SynthStroke &s = spec.strokes[i];
    const std::string where = fmt::format("stroke {}: ", i + 1);
    if (s.points.size() < 2) throw InvalidSpec(where + "needs at least two points");
    if (s.steps.size() + 1 != s.points.size() || s.pressures.size() != s.steps.size()) {
      throw InvalidSpec(where + "needs one step count and pressure per segment");
    }
    for (const SynthPoint &p : s.points) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InvalidSpec(where + "non-finite point");
    }
    for (int n : s.steps) {
      if (n < 1) throw InvalidSpec(where + "step counts must be positive");
    }
    for (double p : s.pressures) {
      if (!(p > 0) || !std::isfinite(p)) throw InvalidSpec(where + "pressures must be positive");
    }
    if (s.interval_ms <= 0) throw InvalidSpec(where + "sample interval must be positive");
    if (s.start_ms < 0) throw InvalidSpec(where + "starts before the trial");
    if (previous_end >= 0 && s.start_ms < previous_end + 2) {
      throw InvalidSpec(where + "starts less than 2 ms after the previous stroke");
    }
    const std::int64_t steps = std::accumulate(s.steps.begin(), s.steps.end(), std::int64_t{0});
    previous_end = s.start_ms + steps * s.interval_ms;
  }
  if (!spec.radical_sizes.empty()) {
    std::size_t total = 0;
    for (std::size_t n : spec.radical_sizes) {
      if (n == 0) throw InvalidSpec("radicals need at least one stroke");
      total += n;
    }
    if (total != spec.strokes.size()) throw InvalidSpec("radical sizes do not cover the strokes");
  }
}

SynthTrial generate_trial(const SynthSpec &spec) {
  validate_spec(spec);
  SynthRng jitter(spec.seed ^ 0x9e3779b97f4a7c15ULL);

  SynthTrial out;
  TrialRecord &trial = out.trial;
  trial.subject_id = spec.subject;
  trial.trial_id = spec.trial_id;
  trial.row_index = spec.row_index;
  trial.target = spec.target;
  trial.self_report = spec.self_report;
  trial.aud_onset = 0;
  trial.aud_offset = static_cast<double>(spec.aud_offset_ms);
  trial.trial_start = 0;

  auto add = [&](double t, double x, double y, double p) { trial.samples.push_back({t, x, y, p}); };

  std::vector<StrokeGeometry> geometry;
  for (std::size_t i = 0; i < spec.strokes.size(); ++i) {
    const SynthStroke &s = spec.strokes[i];
    if (i == 0 && spec.hover && s.start_ms >= 1) {
      add(static_cast<double>(s.start_ms - 1), s.points[0].x, s.points[0].y, 0);
    }
    StrokeGeometry g;
    g.onset = s.start_ms;
    g.first = s.points.front();
    g.last = s.points.back();
    std::int64_t t = s.start_ms;
    auto pressure = [&](double base) {
      if (spec.pressure_jitter == 0) return base;
      return base * (1 + spec.pressure_jitter * jitter.real(-1, 1));
    };
    g.pressures.push_back(pressure(s.pressures[0]));
    add(static_cast<double>(t), s.points[0].x, s.points[0].y, g.pressures.back());
    for (std::size_t seg = 0; seg < s.steps.size(); ++seg) {
      const SynthPoint &a = s.points[seg];
      const SynthPoint &b = s.points[seg + 1];
      g.length += distance(a, b);
      for (int j = 1; j <= s.steps[seg]; ++j) {
        t += s.interval_ms;
        const double f = static_cast<double>(j) / s.steps[seg];
        const double x = j == s.steps[seg] ? b.x : a.x + (b.x - a.x) * f;
        const double y = j == s.steps[seg] ? b.y : a.y + (b.y - a.y) * f;
        g.pressures.push_back(pressure(s.pressures[seg]));
        add(static_cast<double>(t), x, y, g.pressures.back());
      }
    }
    g.offset = t;

    // Pen lift, and the in-air path towards the next stroke.
    const bool has_next = i + 1 < spec.strokes.size();
    std::size_t emitted = 0;
    if (spec.hover && has_next) {
      const SynthStroke &next = spec.strokes[i + 1];
      const double span = static_cast<double>(next.start_ms - t);
      for (std::int64_t h = t + s.interval_ms; h < next.start_ms; h += s.interval_ms) {
        const double f = static_cast<double>(h - t) / span;
        add(static_cast<double>(h), g.last.x + (next.points[0].x - g.last.x) * f,
            g.last.y + (next.points[0].y - g.last.y) * f, 0);
        ++emitted;
      }
    }
    if (emitted == 0) add(static_cast<double>(t + 1), g.last.x, g.last.y, 0);
    geometry.push_back(std::move(g));
  }
  if (geometry.empty()) add(static_cast<double>(spec.aud_offset_ms), 0, 0, 0);
  trial.trial_end = trial.samples.back().t + 200;

  if (geometry.empty()) return out;

  // Radical membership as [first, last) stroke ranges.
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  if (spec.radical_sizes.empty()) {
    groups.emplace_back(0, geometry.size());
  } else {
    std::size_t begin = 0;
    for (std::size_t n : spec.radical_sizes) {
      groups.emplace_back(begin, begin + n);
      out.radical_spans.push_back({SegmentLevel::kRadical, std::to_string(groups.size()),
                                   static_cast<double>(geometry[begin].onset),
                                   static_cast<double>(geometry[begin + n - 1].offset)});
      begin += n;
    }
  }

  const double lpmm = spec.lpmm;
  const double aud_offset = static_cast<double>(spec.aud_offset_ms);
  CharacterMetrics character;
  std::vector<double> all_pressures;
  for (const auto &g : geometry) {
    character.char_len += g.length / lpmm;
    all_pressures.insert(all_pressures.end(), g.pressures.begin(), g.pressures.end());
  }
  character.char_dur = static_cast<double>(geometry.back().offset - geometry.front().onset);
  character.char_rt = static_cast<double>(geometry.front().onset) - aud_offset;
  character.char_press_avg = mean(all_pressures);

  for (std::size_t r = 0; r < groups.size(); ++r) {
    const auto [begin, end] = groups[r];
    RadicalMetrics radical;
    radical.rad_label = static_cast<int>(r + 1);
    radical.rad_dur = static_cast<double>(geometry[end - 1].offset - geometry[begin].onset);
    if (begin > 0) {
      radical.rad_rt_rel = static_cast<double>(geometry[begin].onset - geometry[begin - 1].offset);
      radical.rad_dist = distance(geometry[begin - 1].last, geometry[begin].first) / lpmm;
    }
    std::vector<double> pressures;
    for (std::size_t i = begin; i < end; ++i) {
      radical.rad_len += geometry[i].length / lpmm;
      pressures.insert(pressures.end(), geometry[i].pressures.begin(), geometry[i].pressures.end());
    }
    radical.rad_press_avg = mean(pressures);

    for (std::size_t i = begin; i < end; ++i) {
      const StrokeGeometry &g = geometry[i];
      MetricRow row;
      row.subject = spec.subject;
      row.trial_id = spec.trial_id;
      row.row_index = spec.row_index;
      row.self_report = spec.self_report;
      row.target = spec.target;
      row.character = character;
      row.radical = radical;
      row.stroke.stroke_label = static_cast<int>(i + 1);
      row.stroke.stroke_dur = static_cast<double>(g.offset - g.onset);
      if (i > 0) {
        row.stroke.stroke_rt_rel = static_cast<double>(g.onset - geometry[i - 1].offset);
        row.stroke.stroke_dist = distance(geometry[i - 1].last, g.first) / lpmm;
      }
      row.stroke.stroke_len = g.length / lpmm;
      row.stroke.stroke_press_avg = mean(g.pressures);
      row.stroke.abs_rt = static_cast<double>(g.onset) - aud_offset;
      out.expected.push_back(std::move(row));
    }
  }
  return out;
}

SynthSpec random_spec(std::uint64_t seed, const RandomSpecOptions &options) {
  SynthRng rng(seed);
  SynthSpec spec;
  spec.seed = seed;
  spec.trial_id = static_cast<std::int64_t>(seed % 100000) + 1;
  spec.row_index = spec.trial_id;
  spec.target = kDefaultCharacters[static_cast<std::size_t>(
      rng.integer(0, static_cast<std::int64_t>(kDefaultCharacters.size()) - 1))];
  spec.aud_offset_ms = rng.integer(300, 1500);
  spec.hover = rng.chance(0.5);
  spec.pressure_jitter = rng.chance(0.3) ? rng.real(0, 0.5) : 0;
  spec.lpmm = rng.chance(0.5) ? static_cast<double>(rng.integer(1, 100)) : rng.real(0.5, 100);

  const auto n = static_cast<std::size_t>(rng.integer(options.min_strokes, options.max_strokes));
  std::int64_t start = spec.aud_offset_ms + rng.integer(150, 1500);
  SynthPoint pen{rng.real(0, 3000), rng.real(0, 3000)};
  for (std::size_t i = 0; i < n; ++i) {
    SynthStroke s;
    s.start_ms = start;
    s.interval_ms = rng.chance(0.7) ? 5 : rng.integer(1, 10);
    const auto vertices = rng.integer(2, 5);
    s.points.push_back(pen);
    for (std::int64_t v = 1; v < vertices; ++v) {
      pen = {pen.x + rng.real(-400, 400), pen.y + rng.real(-400, 400)};
      s.points.push_back(pen);
      s.steps.push_back(static_cast<int>(rng.integer(1, 8)));
      s.pressures.push_back(static_cast<double>(rng.integer(50, 30000)));
    }
    const std::int64_t steps = std::accumulate(s.steps.begin(), s.steps.end(), std::int64_t{0});
    start = s.start_ms + steps * s.interval_ms + rng.integer(2, std::max<std::int64_t>(2, options.max_gap_ms));
    pen = {pen.x + rng.real(-300, 300), pen.y + rng.real(-300, 300)};
    spec.strokes.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || rng.chance(0.4)) {
      spec.radical_sizes.push_back(1);
    } else {
      ++spec.radical_sizes.back();
    }
  }
  if (spec.radical_sizes.size() == 1 && rng.chance(0.5)) spec.radical_sizes.clear();
  return spec;
}

Corpus generate_corpus(const CorpusOptions &options) {
  if (options.sessions < 1) throw InvalidSpec("corpus needs at least one session");
  if (!(options.lpmm > 0)) throw InvalidSpec("lpmm must be positive");
  const auto &characters = options.characters.empty() ? kDefaultCharacters : options.characters;
  SynthRng rng(options.seed);
  Corpus corpus;
  corpus.lpmm = options.lpmm;

  for (const std::string &c : characters) {
    std::array<double, kLexicalPredictors.size()> p{};
    auto real2 = [&](double lo, double hi) { return std::round(rng.real(lo, hi) * 100) / 100; };
    p[0] = rng.chance(0.7) ? 1 : 0;
    p[1] = static_cast<double>(rng.integer(0, 2));
    p[2] = rng.chance(0.5) ? 1 : 0;
    p[3] = static_cast<double>(rng.integer(1, 15));
    p[4] = static_cast<double>(rng.integer(1, 8));
    p[5] = real2(1, 7);
    p[6] = real2(1, 7);
    p[7] = real2(0, 5);
    p[8] = real2(2, 7);
    p[9] = static_cast<double>(rng.integer(3, 20));
    p[10] = static_cast<double>(rng.integer(1, 4));
    p[11] = rng.chance(0.5) ? 1 : 0;
    p[12] = p[11] == 1 ? 0 : (rng.chance(0.6) ? 1 : 0);
    p[13] = real2(1, 7);
    corpus.lexical.entries[c] = p;
  }

  RandomSpecOptions trial_options{3, 12, 500};
  for (int s = 0; s < options.sessions; ++s) {
    SynthSession session;
    session.name = fmt::format("session_{}", s + 1);
    std::vector<std::size_t> order(characters.size());
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(i) - 1))]);
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
      SynthSpec spec = random_spec(rng.integer(0, std::numeric_limits<std::int64_t>::max()), trial_options);
      spec.subject = std::to_string(s + 1);
      spec.trial_id = static_cast<std::int64_t>(i + 1);
      spec.row_index = static_cast<std::int64_t>(order[i] + 1);
      spec.target = characters[order[i]];
      spec.lpmm = options.lpmm;
      const double u = rng.real(0, 1);
      spec.self_report = u < 0.85 ? 0 : (u < 0.95 ? 1 : 2);
      if (rng.chance(options.no_response_share)) {
        spec.strokes.clear();
        spec.radical_sizes.clear();
      }
      SynthTrial trial = generate_trial(spec);

      TrialCoding coding;
      coding.key = trial.trial.key();
      coding.row_index = spec.row_index;
      coding.target = spec.target;
      coding.self_report = spec.self_report;
      coding.responded = !spec.strokes.empty();
      const double v = rng.real(0, 1);
      if (v < options.incorrect_share) {
        coding.coding = Coding::kIncorrect;
      } else if (v < options.incorrect_share + options.revised_share) {
        coding.coding = Coding::kRevised;
        trial.trial.revised = true;
      }
      corpus.codings.push_back(std::move(coding));
      session.trials.push_back(std::move(trial));
    }
    corpus.sessions.push_back(std::move(session));
  }
  return corpus;
}

std::map<std::string, std::string> corpus_files(const Corpus &corpus) {
  std::map<std::string, std::string> files;
  for (const SynthSession &session : corpus.sessions) {
    std::vector<TrialRecord> trials;
    SegmentsReport segments;
    for (const SynthTrial &t : session.trials) {
      trials.push_back(t.trial);
      if (!t.radical_spans.empty()) segments.trials[t.trial.key()] = t.radical_spans;
    }
    files["reports/" + session.name + ".tsv"] = serialize_pen_sample_report(trials);
    files["segments/" + session.name + ".tsv"] = serialize_segments_report(segments);
  }
  files["lexical.tsv"] = format_lexical_table(corpus.lexical);
  files["codings.tsv"] = format_trial_codings(corpus.codings);
  files["penstream.ini"] = fmt::format(
      "input = reports\nsegments = segments\nlexical = lexical.tsv\ncoding = codings.tsv\n"
      "lpmm = {}\n",
      format_double(corpus.lpmm));
  return files;
}

}  // namespace penstream
