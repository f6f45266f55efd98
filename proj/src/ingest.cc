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

#include "penstream/ingest.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

#include <fmt/format.h>

#include "penstream/errors.h"

namespace penstream {
namespace {

double time_scale(TimeUnit units) {
  return units == TimeUnit::kSeconds ? 1000.0 : 1.0;
}

bool is_missing(std::string_view field) {
  field = trim(field);
  return field.empty() || field == "NA" || field == "NaN" || field == "nan";
}

double require_double(const TextTable &table, std::size_t row, std::size_t col) {
  auto value = parse_double(table.rows[row][col]);
  if (!value || !std::isfinite(*value)) {
    throw MalformedRow(table.line_numbers[row],
                       fmt::format("non-numeric {} value '{}'", table.header[col],
                                   table.rows[row][col]));
  }
  return *value;
}

std::int64_t require_int(const TextTable &table, std::size_t row, std::size_t col) {
  auto value = parse_int(table.rows[row][col]);
  if (!value) {
    throw MalformedRow(table.line_numbers[row],
                       fmt::format("non-integer {} value '{}'", table.header[col],
                                   table.rows[row][col]));
  }
  return *value;
}

bool parse_flag(const TextTable &table, std::size_t row, std::size_t col) {
  const std::string text = to_lower(trim(table.rows[row][col]));
  if (text.empty() || text == "0" || text == "false" || text == "no") return false;
  if (text == "1" || text == "true" || text == "yes") return true;
  throw MalformedRow(table.line_numbers[row],
                     fmt::format("bad {} flag '{}'", table.header[col], text));
}

// A trial variable carried on every sample row. The first row of a trial sets
// it; later rows must agree.
template <typename T>
void merge_variable(std::optional<T> &slot, std::optional<T> value,
                    const TextTable &table, std::size_t row, std::size_t col) {
  if (!value) return;
  if (!slot) {
    slot = value;
  } else if (*slot != *value) {
    throw MalformedRow(table.line_numbers[row],
                       fmt::format("inconsistent {} within trial", table.header[col]));
  }
}

struct PendingTrial {
  std::vector<PenSample> samples;
  std::optional<double> aud_onset, aud_offset, trial_start, trial_end;
  std::optional<std::int64_t> self_report, row_index;
  std::optional<std::string> target;
  std::optional<bool> revised;
};

std::optional<SegmentLevel> parse_level(std::string_view text) {
  const std::string level = to_lower(trim(text));
  if (level == "character" || level == "char") return SegmentLevel::kCharacter;
  if (level == "radical" || level == "rad") return SegmentLevel::kRadical;
  if (level == "stroke") return SegmentLevel::kStroke;
  return std::nullopt;
}

bool span_less(const LabeledSpan &a, const LabeledSpan &b) {
  if (a.level != b.level) return a.level < b.level;
  if (a.t_start != b.t_start) return a.t_start < b.t_start;
  return a.t_end < b.t_end;
}

}  // namespace

std::vector<TrialRecord> parse_pen_sample_report(std::string_view text,
                                                 const IngestOptions &options) {
  const TextTable table = parse_table(text);
  const auto &aliases = options.aliases;
  const std::size_t c_subject = table.require(column::kSubject, aliases);
  const std::size_t c_trial = table.require(column::kTrialId, aliases);
  const std::size_t c_time = table.require(column::kTime, aliases);
  const std::size_t c_x = table.require(column::kX, aliases);
  const std::size_t c_y = table.require(column::kY, aliases);
  const std::size_t c_pressure = table.require(column::kPressure, aliases);
  const auto c_aud_onset = table.find(column::kAudOnset, aliases);
  const auto c_aud_offset = table.find(column::kAudOffset, aliases);
  const auto c_start = table.find(column::kTrialStart, aliases);
  const auto c_end = table.find(column::kTrialEnd, aliases);
  const auto c_report = table.find(column::kSelfReport, aliases);
  const auto c_target = table.find(column::kTarget, aliases);
  const auto c_row_index = table.find(column::kRowIndex, aliases);
  const auto c_revised = table.find(column::kRevised, aliases);

  const double scale = time_scale(options.units);
  auto optional_time = [&](std::optional<std::size_t> col,
                           std::size_t row) -> std::optional<double> {
    if (!col || is_missing(table.rows[row][*col])) return std::nullopt;
    return require_double(table, row, *col) * scale;
  };
  auto optional_int = [&](std::optional<std::size_t> col,
                          std::size_t row) -> std::optional<std::int64_t> {
    if (!col || is_missing(table.rows[row][*col])) return std::nullopt;
    return require_int(table, row, *col);
  };

  std::map<TrialKey, PendingTrial> pending;
  for (std::size_t row = 0; row < table.rows.size(); ++row) {
    const auto &fields = table.rows[row];
    TrialKey key{std::string(trim(fields[c_subject])),
                 require_int(table, row, c_trial)};
    PenSample sample;
    sample.t = require_double(table, row, c_time) * scale;
    sample.x = require_double(table, row, c_x);
    sample.y = require_double(table, row, c_y);
    sample.pressure = require_double(table, row, c_pressure);
    if (sample.pressure < 0) {
      throw MalformedRow(table.line_numbers[row], "negative pressure");
    }

    PendingTrial &trial = pending[key];
    trial.samples.push_back(sample);
    if (c_aud_onset) merge_variable(trial.aud_onset, optional_time(c_aud_onset, row), table, row, *c_aud_onset);
    if (c_aud_offset) merge_variable(trial.aud_offset, optional_time(c_aud_offset, row), table, row, *c_aud_offset);
    if (c_start) merge_variable(trial.trial_start, optional_time(c_start, row), table, row, *c_start);
    if (c_end) merge_variable(trial.trial_end, optional_time(c_end, row), table, row, *c_end);
    if (c_report) merge_variable(trial.self_report, optional_int(c_report, row), table, row, *c_report);
    if (c_row_index) merge_variable(trial.row_index, optional_int(c_row_index, row), table, row, *c_row_index);
    if (c_target) {
      merge_variable(trial.target, std::optional<std::string>(std::string(trim(fields[*c_target]))),
                     table, row, *c_target);
    }
    if (c_revised) {
      merge_variable(trial.revised, std::optional<bool>(parse_flag(table, row, *c_revised)),
                     table, row, *c_revised);
    }
  }

  std::vector<TrialRecord> trials;
  trials.reserve(pending.size());
  for (auto &[key, p] : pending) {
    TrialRecord record;
    record.subject_id = key.subject;
    record.trial_id = key.trial_id;
    record.samples = std::move(p.samples);
    std::stable_sort(record.samples.begin(), record.samples.end(),
                     [](const PenSample &a, const PenSample &b) { return a.t < b.t; });
    const double first_t = record.samples.front().t;
    const double last_t = record.samples.back().t;
    record.trial_start = p.trial_start.value_or(first_t);
    record.trial_end = p.trial_end.value_or(last_t);
    record.aud_onset = p.aud_onset.value_or(record.trial_start);
    record.aud_offset = p.aud_offset.value_or(record.aud_onset);
    record.self_report = p.self_report.value_or(0);
    record.row_index = p.row_index.value_or(key.trial_id);
    record.target = p.target.value_or("");
    record.revised = p.revised.value_or(false);
    trials.push_back(std::move(record));
  }
  return trials;
}

std::string serialize_pen_sample_report(const std::vector<TrialRecord> &trials) {
  const std::vector<std::string> header = {
      std::string(column::kSubject),    std::string(column::kTrialId),
      std::string(column::kRowIndex),   std::string(column::kTarget),
      std::string(column::kSelfReport), std::string(column::kRevised),
      std::string(column::kAudOnset),   std::string(column::kAudOffset),
      std::string(column::kTrialStart), std::string(column::kTrialEnd),
      std::string(column::kTime),       std::string(column::kX),
      std::string(column::kY),          std::string(column::kPressure)};

  std::vector<const TrialRecord *> ordered;
  for (const auto &trial : trials) ordered.push_back(&trial);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const TrialRecord *a, const TrialRecord *b) {
                     return a->key() < b->key();
                   });

  std::vector<std::vector<std::string>> rows;
  for (const TrialRecord *trial : ordered) {
    const std::vector<std::string> prefix = {
        trial->subject_id,
        std::to_string(trial->trial_id),
        std::to_string(trial->row_index),
        trial->target,
        std::to_string(trial->self_report),
        trial->revised ? "1" : "0",
        format_double(trial->aud_onset),
        format_double(trial->aud_offset),
        format_double(trial->trial_start),
        format_double(trial->trial_end)};
    for (const PenSample &s : trial->samples) {
      std::vector<std::string> row = prefix;
      row.push_back(format_double(s.t));
      row.push_back(format_double(s.x));
      row.push_back(format_double(s.y));
      row.push_back(format_double(s.pressure));
      rows.push_back(std::move(row));
    }
  }
  return write_table(header, rows, '\t');
}

std::string_view level_name(SegmentLevel level) {
  switch (level) {
    case SegmentLevel::kCharacter:
      return "character";
    case SegmentLevel::kRadical:
      return "radical";
    case SegmentLevel::kStroke:
      return "stroke";
  }
  return "radical";
}

std::vector<LabeledSpan> SegmentsReport::radicals(const TrialKey &key) const {
  std::vector<LabeledSpan> out;
  auto it = trials.find(key);
  if (it == trials.end()) return out;
  for (const auto &span : it->second) {
    if (span.level == SegmentLevel::kRadical) out.push_back(span);
  }
  return out;
}

void SegmentsReport::merge(const SegmentsReport &other) {
  for (const auto &[key, spans] : other.trials) {
    auto &target = trials[key];
    target.insert(target.end(), spans.begin(), spans.end());
    check_no_overlap(key, target);
  }
}

void check_no_overlap(const TrialKey &key, std::vector<LabeledSpan> &spans) {
  std::stable_sort(spans.begin(), spans.end(), span_less);
  for (std::size_t i = 1; i < spans.size(); ++i) {
    const LabeledSpan &prev = spans[i - 1];
    const LabeledSpan &cur = spans[i];
    if (prev.level == cur.level && cur.t_start < prev.t_end) {
      throw OverlappingSpans(key.str(), std::string(level_name(cur.level)));
    }
  }
}

SegmentsReport parse_segments_report(std::string_view text,
                                     const IngestOptions &options) {
  const TextTable table = parse_table(text);
  const auto &aliases = options.aliases;
  const std::size_t c_subject = table.require(column::kSubject, aliases);
  const std::size_t c_trial = table.require(column::kTrialId, aliases);
  const std::size_t c_level = table.require("level", aliases);
  const std::size_t c_label = table.require("label", aliases);
  const std::size_t c_start = table.require("t_start", aliases);
  const std::size_t c_end = table.require("t_end", aliases);
  const double scale = time_scale(options.units);

  SegmentsReport report;
  for (std::size_t row = 0; row < table.rows.size(); ++row) {
    const auto &fields = table.rows[row];
    TrialKey key{std::string(trim(fields[c_subject])),
                 require_int(table, row, c_trial)};
    auto level = parse_level(fields[c_level]);
    if (!level) {
      throw MalformedRow(table.line_numbers[row],
                         fmt::format("unknown segment level '{}'", fields[c_level]));
    }
    LabeledSpan span{*level, std::string(trim(fields[c_label])),
                     require_double(table, row, c_start) * scale,
                     require_double(table, row, c_end) * scale};
    if (span.t_start > span.t_end) {
      throw MalformedRow(table.line_numbers[row], "t_start after t_end");
    }
    report.trials[key].push_back(std::move(span));
  }
  for (auto &[key, spans] : report.trials) check_no_overlap(key, spans);
  return report;
}

std::string serialize_segments_report(const SegmentsReport &report) {
  std::vector<std::vector<std::string>> rows;
  for (const auto &[key, spans] : report.trials) {
    for (const auto &span : spans) {
      rows.push_back({key.subject, std::to_string(key.trial_id),
                      std::string(level_name(span.level)), span.label,
                      format_double(span.t_start), format_double(span.t_end)});
    }
  }
  return write_table({std::string(column::kSubject), std::string(column::kTrialId),
                      "level", "label", "t_start", "t_end"},
                     rows, '\t');
}

SegmentsReport segments_from_sample_labels(std::string_view text,
                                           const IngestOptions &options) {
  const TextTable table = parse_table(text);
  const auto &aliases = options.aliases;
  const std::size_t c_subject = table.require(column::kSubject, aliases);
  const std::size_t c_trial = table.require(column::kTrialId, aliases);
  const std::size_t c_time = table.require(column::kTime, aliases);
  const auto c_level = table.find(column::kSegmentLevel, aliases);
  const auto c_label = table.find(column::kSegmentLabel, aliases);
  SegmentsReport report;
  if (!c_level || !c_label) return report;
  const double scale = time_scale(options.units);

  struct Bounds {
    double lo, hi;
  };
  std::map<TrialKey, std::map<std::pair<SegmentLevel, std::string>, Bounds>> found;
  for (std::size_t row = 0; row < table.rows.size(); ++row) {
    const auto &fields = table.rows[row];
    if (is_missing(fields[*c_level])) continue;
    auto level = parse_level(fields[*c_level]);
    if (!level) {
      throw MalformedRow(table.line_numbers[row],
                         fmt::format("unknown segment level '{}'", fields[*c_level]));
    }
    TrialKey key{std::string(trim(fields[c_subject])),
                 require_int(table, row, c_trial)};
    const double t = require_double(table, row, c_time) * scale;
    auto [it, inserted] = found[key].try_emplace(
        {*level, std::string(trim(fields[*c_label]))}, Bounds{t, t});
    if (!inserted) {
      it->second.lo = std::min(it->second.lo, t);
      it->second.hi = std::max(it->second.hi, t);
    }
  }
  for (auto &[key, labels] : found) {
    auto &spans = report.trials[key];
    for (const auto &[id, bounds] : labels) {
      spans.push_back({id.first, id.second, bounds.lo, bounds.hi});
    }
    check_no_overlap(key, spans);
  }
  return report;
}

ConditionTable parse_condition_file(std::string_view text) {
  TextTable table = parse_table(text);
  return {std::move(table.header), std::move(table.rows)};
}

namespace {

enum class PlaceholderType { kInteger, kReal, kString };

bool matches_type(std::string_view field, PlaceholderType type) {
  field = trim(field);
  if (field.empty()) return false;
  const bool is_int = parse_int(field).has_value();
  const auto as_double = parse_double(field);
  const bool is_number = as_double.has_value();
  switch (type) {
    case PlaceholderType::kInteger:
      return is_int;
    case PlaceholderType::kReal:
      return is_number && !is_int && std::isfinite(*as_double);
    case PlaceholderType::kString:
      return !is_number;
  }
  return false;
}

std::string_view type_name(PlaceholderType type) {
  switch (type) {
    case PlaceholderType::kInteger:
      return "integer";
    case PlaceholderType::kReal:
      return "real";
    case PlaceholderType::kString:
      return "string";
  }
  return "";
}

}  // namespace

std::vector<std::string> validate_condition_file(const ConditionTable &condition) {
  TextTable table;
  table.header = condition.header;

  struct Rule {
    std::string_view name;
    PlaceholderType type;
    bool required;
  };
  static constexpr Rule kRules[] = {
      {"DV_TRIAL_ID", PlaceholderType::kInteger, true},
      {"DV_AUD_ONSET", PlaceholderType::kReal, true},
      {"DV_AUD_OFFSET", PlaceholderType::kReal, true},
      {"DV_TRIAL_START", PlaceholderType::kReal, true},
      {"DV_TRIAL_END", PlaceholderType::kReal, true},
      {"participant_id", PlaceholderType::kString, false},
      {"self_report", PlaceholderType::kInteger, false},
  };

  std::vector<std::string> violations;
  for (const Rule &rule : kRules) {
    auto col = table.find(rule.name);
    if (!col) {
      if (rule.required) violations.push_back(fmt::format("missing column {}", rule.name));
      continue;
    }
    for (const auto &row : condition.rows) {
      if (*col >= row.size() || !matches_type(row[*col], rule.type)) {
        violations.push_back(fmt::format("{} placeholder must be {}-typed",
                                         rule.name, type_name(rule.type)));
        break;
      }
    }
  }

  auto row_index = table.find("ROW_INDEX");
  if (!row_index) {
    violations.emplace_back("missing column ROW_INDEX");
    return violations;
  }
  std::set<std::int64_t> seen;
  for (std::size_t r = 0; r < condition.rows.size(); ++r) {
    const auto &row = condition.rows[r];
    const std::string field = *row_index < row.size() ? row[*row_index] : "";
    auto value = parse_int(field);
    if (!value || *value <= 0) {
      violations.push_back(fmt::format(
          "ROW_INDEX value '{}' on data row {} is not a positive integer", field, r + 1));
    } else if (!seen.insert(*value).second) {
      violations.push_back(fmt::format("ROW_INDEX value {} is duplicated", *value));
    }
  }
  return violations;
}

}  // namespace penstream
