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

#include "penstream/metrics.h"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "penstream/errors.h"
#include "penstream/text_table.h"

namespace penstream {
namespace {

double distance(const PenSample &a, const PenSample &b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

struct PressureSum {
  double total = 0;
  std::size_t count = 0;

  void add(const std::vector<PenSample> &samples, const StrokeSpan &span) {
    for (std::size_t k = span.first_index; k <= span.last_index; ++k) {
      total += samples[k].pressure;
    }
    count += span.size();
  }
  double mean() const { return total / static_cast<double>(count); }
};

bool close(const Maybe &a, const Maybe &b, double tolerance) {
  if (!a || !b) return !a && !b;
  return std::abs(*a - *b) <= tolerance * std::max(1.0, std::abs(*a));
}

std::string maybe_text(const Maybe &value) {
  return value ? fmt::format("{}", *value) : "NA";
}

}  // namespace

std::vector<MetricRow> compute_metrics(const TrialRecord &trial,
                                       const SegmentTree &tree,
                                       const TabletSpec &spec) {
  if (tree.empty()) throw EmptyTree();
  if (!(spec.lpmm > 0)) throw NonPositiveInput("lpmm must be positive");
  const auto &samples = trial.samples;
  const double lpmm = spec.lpmm;

  std::vector<StrokeMetrics> strokes(tree.strokes.size());
  for (std::size_t i = 0; i < tree.strokes.size(); ++i) {
    const TreeStroke &leaf = tree.strokes[i];
    const PenSample &onset = samples[leaf.onset_index];
    const PenSample &offset = samples[leaf.span.last_index];
    StrokeMetrics &m = strokes[i];
    m.stroke_label = static_cast<int>(i + 1);
    m.stroke_dur = offset.t - onset.t;
    double path = 0;
    for (std::size_t k = leaf.onset_index; k < leaf.span.last_index; ++k) {
      path += distance(samples[k], samples[k + 1]);
    }
    m.stroke_len = path / lpmm;
    PressureSum pressure;
    pressure.add(samples, leaf.span);
    m.stroke_press_avg = pressure.mean();
    if (i > 0) {
      const PenSample &prev_offset = samples[tree.strokes[i - 1].span.last_index];
      m.stroke_rt_rel = onset.t - prev_offset.t;
      m.stroke_dist = distance(prev_offset, onset) / lpmm;
    }
    m.abs_rt = onset.t - trial.aud_offset;
  }

  std::vector<RadicalMetrics> radicals(tree.radicals.size());
  PressureSum char_pressure;
  double char_len = 0;
  for (std::size_t r = 0; r < tree.radicals.size(); ++r) {
    const RadicalNode &node = tree.radicals[r];
    const TreeStroke &first = tree.strokes[node.strokes.front()];
    const TreeStroke &last = tree.strokes[node.strokes.back()];
    const PenSample &onset = samples[first.onset_index];
    RadicalMetrics &m = radicals[r];
    m.rad_label = static_cast<int>(r + 1);
    m.rad_dur = samples[last.span.last_index].t - onset.t;
    PressureSum pressure;
    for (std::size_t s : node.strokes) {
      m.rad_len += strokes[s].stroke_len;
      pressure.add(samples, tree.strokes[s].span);
    }
    m.rad_press_avg = pressure.mean();
    char_pressure.total += pressure.total;
    char_pressure.count += pressure.count;
    char_len += m.rad_len;
    if (r > 0) {
      const RadicalNode &prev = tree.radicals[r - 1];
      const PenSample &prev_offset =
          samples[tree.strokes[prev.strokes.back()].span.last_index];
      m.rad_rt_rel = onset.t - prev_offset.t;
      m.rad_dist = distance(prev_offset, onset) / lpmm;
    }
  }

  CharacterMetrics character;
  const PenSample &char_onset = samples[tree.strokes.front().onset_index];
  character.char_rt = char_onset.t - trial.aud_offset;
  character.char_dur = samples[tree.strokes.back().span.last_index].t - char_onset.t;
  character.char_len = char_len;
  character.char_press_avg = char_pressure.mean();

  std::vector<MetricRow> rows;
  rows.reserve(strokes.size());
  for (std::size_t r = 0; r < tree.radicals.size(); ++r) {
    for (std::size_t s : tree.radicals[r].strokes) {
      MetricRow row;
      row.subject = trial.subject_id;
      row.trial_id = trial.trial_id;
      row.row_index = trial.row_index;
      row.self_report = trial.self_report;
      row.target = trial.target;
      row.character = character;
      row.radical = radicals[r];
      row.stroke = strokes[s];
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<std::string> first_member_consistency(const std::vector<MetricRow> &rows,
                                                  double tolerance) {
  std::map<int, const MetricRow *> first_member;
  for (const MetricRow &row : rows) {
    auto [it, inserted] = first_member.try_emplace(row.radical.rad_label, &row);
    if (!inserted && row.stroke.stroke_label < it->second->stroke.stroke_label) {
      it->second = &row;
    }
  }
  std::vector<std::string> violations;
  for (const auto &[label, row] : first_member) {
    if (!close(row->radical.rad_rt_rel, row->stroke.stroke_rt_rel, tolerance)) {
      violations.push_back(fmt::format(
          "radical {} rad_rt_rel {} differs from stroke {} stroke_rt_rel {}", label,
          maybe_text(row->radical.rad_rt_rel), row->stroke.stroke_label,
          maybe_text(row->stroke.stroke_rt_rel)));
    }
    if (!close(row->radical.rad_dist, row->stroke.stroke_dist, tolerance)) {
      violations.push_back(fmt::format(
          "radical {} rad_dist {} differs from stroke {} stroke_dist {}", label,
          maybe_text(row->radical.rad_dist), row->stroke.stroke_label,
          maybe_text(row->stroke.stroke_dist)));
    }
  }
  return violations;
}

RadicalComposition compose_radical(const std::vector<MetricRow> &rows, int rad_label) {
  std::vector<const MetricRow *> members;
  for (const MetricRow &row : rows) {
    if (row.radical.rad_label == rad_label) members.push_back(&row);
  }
  std::sort(members.begin(), members.end(), [](const MetricRow *a, const MetricRow *b) {
    return a->stroke.stroke_label < b->stroke.stroke_label;
  });
  RadicalComposition out;
  out.members = members.size();
  for (std::size_t i = 0; i < members.size(); ++i) {
    out.stroke_dur_sum += members[i]->stroke.stroke_dur;
    out.stroke_len_sum += members[i]->stroke.stroke_len;
    if (i > 0 && members[i]->stroke.stroke_rt_rel) {
      out.internal_rt_sum += *members[i]->stroke.stroke_rt_rel;
    }
  }
  return out;
}

CharacterComposition compose_character(const std::vector<MetricRow> &rows) {
  std::map<int, const RadicalMetrics *> radicals;
  for (const MetricRow &row : rows) radicals.try_emplace(row.radical.rad_label, &row.radical);
  CharacterComposition out;
  for (const auto &[label, radical] : radicals) {
    out.rad_dur_sum += radical->rad_dur;
    out.rad_len_sum += radical->rad_len;
    if (radical->rad_rt_rel) out.rad_rt_sum += *radical->rad_rt_rel;
  }
  return out;
}

std::string export_time(double ms) { return format_fixed(ms, 0); }
std::string export_length(double mm) { return format_fixed(mm, 3); }
std::string export_pressure(double pressure) { return format_fixed(pressure, 0); }
std::string export_maybe(const Maybe &value, std::string (*format)(double)) {
  return value ? format(*value) : "NA";
}

std::vector<std::string> long_format_fields(const MetricRow &row) {
  const CharacterMetrics &c = row.character;
  const RadicalMetrics &r = row.radical;
  const StrokeMetrics &s = row.stroke;
  return {row.subject,
          std::to_string(row.trial_id),
          std::to_string(row.row_index),
          std::to_string(row.self_report),
          row.target,
          export_time(c.char_dur),
          export_time(c.char_rt),
          export_length(c.char_len),
          export_pressure(c.char_press_avg),
          std::to_string(r.rad_label),
          export_time(r.rad_dur),
          export_maybe(r.rad_rt_rel, export_time),
          export_length(r.rad_len),
          export_maybe(r.rad_dist, export_length),
          export_pressure(r.rad_press_avg),
          std::to_string(s.stroke_label),
          export_time(s.stroke_dur),
          export_maybe(s.stroke_rt_rel, export_time),
          export_length(s.stroke_len),
          export_maybe(s.stroke_dist, export_length),
          export_pressure(s.stroke_press_avg)};
}

std::string format_long_format(const std::vector<MetricRow> &rows) {
  std::vector<std::string> header(kLongFormatColumns.begin(), kLongFormatColumns.end());
  std::vector<std::vector<std::string>> fields;
  fields.reserve(rows.size());
  for (const MetricRow &row : rows) fields.push_back(long_format_fields(row));
  return write_table(header, fields, '\t');
}

std::vector<MetricRow> parse_long_format(std::string_view text) {
  const TextTable table = parse_table(text);
  std::array<std::size_t, kLongFormatColumns.size()> col{};
  for (std::size_t i = 0; i < kLongFormatColumns.size(); ++i) {
    col[i] = table.require(kLongFormatColumns[i]);
  }

  std::vector<MetricRow> rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto &f = table.rows[r];
    auto number = [&](std::size_t i) {
      auto value = parse_double(f[col[i]]);
      if (!value) {
        throw MalformedRow(table.line_numbers[r],
                           fmt::format("bad {} value '{}'", kLongFormatColumns[i], f[col[i]]));
      }
      return *value;
    };
    auto maybe = [&](std::size_t i) -> Maybe {
      if (trim(f[col[i]]) == "NA") return std::nullopt;
      return number(i);
    };
    auto integer = [&](std::size_t i) {
      auto value = parse_int(f[col[i]]);
      if (!value) {
        throw MalformedRow(table.line_numbers[r],
                           fmt::format("bad {} value '{}'", kLongFormatColumns[i], f[col[i]]));
      }
      return *value;
    };
    MetricRow row;
    row.subject = std::string(trim(f[col[0]]));
    row.trial_id = integer(1);
    row.row_index = integer(2);
    row.self_report = integer(3);
    row.target = std::string(trim(f[col[4]]));
    row.character = {number(5), number(6), number(7), number(8)};
    row.radical.rad_label = static_cast<int>(integer(9));
    row.radical.rad_dur = number(10);
    row.radical.rad_rt_rel = maybe(11);
    row.radical.rad_len = number(12);
    row.radical.rad_dist = maybe(13);
    row.radical.rad_press_avg = number(14);
    row.stroke.stroke_label = static_cast<int>(integer(15));
    row.stroke.stroke_dur = number(16);
    row.stroke.stroke_rt_rel = maybe(17);
    row.stroke.stroke_len = number(18);
    row.stroke.stroke_dist = maybe(19);
    row.stroke.stroke_press_avg = number(20);
    rows.push_back(std::move(row));
  }

  // abs_rt: walk each trial's strokes in production order.
  std::map<TrialKey, std::vector<MetricRow *>> by_trial;
  for (MetricRow &row : rows) by_trial[row.key()].push_back(&row);
  for (auto &[key, members] : by_trial) {
    std::sort(members.begin(), members.end(), [](const MetricRow *a, const MetricRow *b) {
      return a->stroke.stroke_label < b->stroke.stroke_label;
    });
    double offset = members.front()->character.char_rt;
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i > 0) {
        offset += members[i - 1]->stroke.stroke_dur +
                  members[i]->stroke.stroke_rt_rel.value_or(0);
      }
      members[i]->stroke.abs_rt = offset;
    }
  }
  return rows;
}

}  // namespace penstream
