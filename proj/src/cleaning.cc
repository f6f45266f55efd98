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

#include "penstream/cleaning.h"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "penstream/errors.h"
#include "penstream/text_table.h"

namespace penstream {
namespace {

std::optional<Coding> parse_coding(std::string_view text) {
  const std::string value = to_lower(trim(text));
  if (value == "correct") return Coding::kCorrect;
  if (value == "incorrect") return Coding::kIncorrect;
  if (value == "revised") return Coding::kRevised;
  return std::nullopt;
}

std::string normalize_header(std::string_view name) {
  std::string out = to_lower(trim(name));
  for (char &c : out) {
    if (c == ' ' || c == '-') c = '_';
  }
  return out;
}

// Drops `value` when it falls outside [min, max]; counts what was seen.
void filter(Maybe &value, double min, double max, MeasureExclusion &stats) {
  if (!value) return;
  ++stats.observed;
  if (*value > max || *value < min) {
    ++stats.removed;
    value.reset();
  }
}

struct Mean {
  double sum = 0;
  std::size_t n = 0;
  void add(const Maybe &v) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  Maybe value() const { return n == 0 ? Maybe{} : Maybe{sum / static_cast<double>(n)}; }
};

std::string maybe_cell(const Maybe &value) {
  return value ? format_double(*value) : "NA";
}

constexpr double kNoMin = -std::numeric_limits<double>::infinity();

}  // namespace

std::string_view coding_name(Coding coding) {
  switch (coding) {
    case Coding::kCorrect:
      return "correct";
    case Coding::kIncorrect:
      return "incorrect";
    case Coding::kRevised:
      return "revised";
  }
  return "correct";
}

std::string format_trial_codings(const std::vector<TrialCoding> &codings) {
  std::vector<std::vector<std::string>> rows;
  for (const auto &c : codings) {
    rows.push_back({c.key.subject, std::to_string(c.key.trial_id),
                    std::to_string(c.row_index), c.target,
                    std::to_string(c.self_report), std::string(coding_name(c.coding)),
                    c.responded ? "1" : "0"});
  }
  return write_table({"Subject", "DV_TRIAL_ID", "ROW_INDEX", "target", "self_report",
                      "coding", "responded"},
                     rows, '\t');
}

std::vector<TrialCoding> parse_trial_codings(std::string_view text) {
  const TextTable table = parse_table(text);
  const std::size_t c_subject = table.require("Subject");
  const std::size_t c_trial = table.require("DV_TRIAL_ID");
  const std::size_t c_target = table.require("target");
  const std::size_t c_report = table.require("self_report");
  const std::size_t c_coding = table.require("coding");
  const auto c_row_index = table.find("ROW_INDEX");
  const auto c_responded = table.find("responded");

  std::vector<TrialCoding> codings;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto &f = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    TrialCoding c;
    c.key.subject = std::string(trim(f[c_subject]));
    auto trial = parse_int(f[c_trial]);
    auto report = parse_int(f[c_report]);
    auto coding = parse_coding(f[c_coding]);
    if (!trial) throw MalformedRow(line, "bad DV_TRIAL_ID");
    if (!report) throw MalformedRow(line, "bad self_report");
    if (!coding) throw MalformedRow(line, fmt::format("unknown coding '{}'", f[c_coding]));
    c.key.trial_id = *trial;
    c.self_report = *report;
    c.coding = *coding;
    c.target = std::string(trim(f[c_target]));
    c.row_index = *trial;
    if (c_row_index) {
      auto row_index = parse_int(f[*c_row_index]);
      if (!row_index) throw MalformedRow(line, "bad ROW_INDEX");
      c.row_index = *row_index;
    }
    if (c_responded) c.responded = trim(f[*c_responded]) != "0";
    codings.push_back(std::move(c));
  }
  return codings;
}

void validate_policy(const ExclusionPolicy &p) {
  for (double threshold : {p.char_rt_max, p.char_dur_min, p.char_dur_max, p.rad_rt_max,
                           p.rad_dur_max, p.stroke_rt_max, p.stroke_dur_max}) {
    if (!(threshold > 0)) throw ConfigError("exclusion thresholds must be positive");
  }
  if (!(p.char_dur_min < p.char_dur_max)) {
    throw ConfigError("char_dur_min must be below char_dur_max");
  }
}

const MeasureExclusion &ExclusionStats::find(std::string_view level,
                                             std::string_view measure) const {
  for (const auto &m : measures) {
    if (m.level == level && m.measure == measure) return m;
  }
  throw std::out_of_range(fmt::format("no exclusion stats for {} {}", level, measure));
}

std::pair<RetainedData, ExclusionStats> apply_exclusions(
    const std::vector<MetricRow> &rows, const std::vector<TrialCoding> &codings,
    const ExclusionPolicy &policy) {
  std::map<TrialKey, const TrialCoding *> by_key;
  for (const auto &c : codings) by_key[c.key] = &c;

  ExclusionStats stats;
  stats.trials = codings.size();
  stats.measures = {{"character", "latency"}, {"character", "duration"},
                    {"radical", "latency"},   {"radical", "duration"},
                    {"stroke", "latency"},    {"stroke", "duration"}};
  MeasureExclusion &char_rt = stats.measures[0];
  MeasureExclusion &char_dur = stats.measures[1];
  MeasureExclusion &rad_rt = stats.measures[2];
  MeasureExclusion &rad_dur = stats.measures[3];
  MeasureExclusion &stroke_rt = stats.measures[4];
  MeasureExclusion &stroke_dur = stats.measures[5];

  RetainedData retained;
  std::set<TrialKey> kept;
  for (const auto &c : codings) {
    if (policy.drop_incorrect && c.coding == Coding::kIncorrect) {
      ++stats.incorrect_removed;
    } else if (policy.drop_revised && c.coding == Coding::kRevised) {
      ++stats.revised_removed;
    } else {
      kept.insert(c.key);
      retained.trials.push_back(c.key);
    }
  }

  std::set<TrialKey> seen_trials;
  std::set<std::pair<TrialKey, int>> seen_radicals;
  for (const MetricRow &row : rows) {
    const TrialKey key = row.key();
    if (!by_key.contains(key)) throw UnlabeledTrial(key.str());
    if (!kept.contains(key)) continue;

    if (seen_trials.insert(key).second) {
      const CharacterMetrics &m = row.character;
      CharacterObservation obs{key, row.target, m.char_rt, m.char_dur, m.char_len,
                               m.char_press_avg};
      filter(obs.char_rt, kNoMin, policy.char_rt_max, char_rt);
      filter(obs.char_dur, policy.char_dur_min, policy.char_dur_max, char_dur);
      retained.characters.push_back(std::move(obs));
    }
    if (seen_radicals.insert({key, row.radical.rad_label}).second) {
      const RadicalMetrics &m = row.radical;
      RadicalObservation obs{key,       row.target, m.rad_label, m.rad_rt_rel,
                             m.rad_dur, m.rad_len,  m.rad_dist,  m.rad_press_avg};
      filter(obs.rad_rt_rel, kNoMin, policy.rad_rt_max, rad_rt);
      filter(obs.rad_dur, kNoMin, policy.rad_dur_max, rad_dur);
      retained.radicals.push_back(std::move(obs));
    }
    const StrokeMetrics &m = row.stroke;
    StrokeObservation obs{key,          row.target,   m.stroke_label,
                          m.stroke_rt_rel, m.stroke_dur, m.stroke_len,
                          m.stroke_dist,   m.stroke_press_avg};
    filter(obs.stroke_rt_rel, kNoMin, policy.stroke_rt_max, stroke_rt);
    filter(obs.stroke_dur, kNoMin, policy.stroke_dur_max, stroke_dur);
    retained.strokes.push_back(std::move(obs));
  }
  return {std::move(retained), std::move(stats)};
}

std::string format_exclusion_stats(const ExclusionStats &stats) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"trial", "incorrect", std::to_string(stats.trials),
                  std::to_string(stats.incorrect_removed),
                  format_double(stats.trials ? double(stats.incorrect_removed) / double(stats.trials) : 0)});
  rows.push_back({"trial", "revised", std::to_string(stats.trials),
                  std::to_string(stats.revised_removed),
                  format_double(stats.trials ? double(stats.revised_removed) / double(stats.trials) : 0)});
  for (const auto &m : stats.measures) {
    rows.push_back({m.level, m.measure, std::to_string(m.observed),
                    std::to_string(m.removed), format_double(m.fraction())});
  }
  return write_table({"level", "measure", "observed", "removed", "fraction"}, rows, '\t');
}

std::string display_name(std::string_view name) {
  static const std::map<std::string_view, std::string_view> kNames = {
      {"phonogram", "Phonogram"},
      {"sound_radical_order", "Sound radical order"},
      {"regularity", "Regularity"},
      {"homophone_density", "Homophone density"},
      {"number_of_meanings", "Number of meanings"},
      {"imageability", "Imageability"},
      {"concreteness", "Concreteness"},
      {"frequency", "Frequency"},
      {"age_of_acquisition", "Age of acquisition"},
      {"number_of_strokes", "Number of strokes"},
      {"number_of_radicals", "Number of radicals"},
      {"left_right", "Left-right"},
      {"top_bottom", "Top-bottom"},
      {"word_familiarity", "Word familiarity"},
      {"char_len", "Character length"},
      {"rad_len", "Radical length"},
      {"rad_dist", "Radical distance"},
      {"stroke_len", "Stroke length"},
      {"stroke_dist", "Stroke distance"},
  };
  auto it = kNames.find(name);
  return it == kNames.end() ? std::string(name) : std::string(it->second);
}

LexicalTable parse_lexical_table(std::string_view text) {
  TextTable table = parse_table(text);
  std::vector<std::string> original = table.header;
  for (auto &name : table.header) name = normalize_header(name);
  auto key = table.find("character");
  if (!key) key = table.find("target");
  if (!key) key = table.find("char");
  if (!key) throw MissingColumn("character");
  std::array<std::size_t, kLexicalPredictors.size()> cols{};
  for (std::size_t i = 0; i < kLexicalPredictors.size(); ++i) {
    cols[i] = table.require(kLexicalPredictors[i]);
  }

  LexicalTable lexical;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto &f = table.rows[r];
    std::array<double, kLexicalPredictors.size()> values{};
    for (std::size_t i = 0; i < cols.size(); ++i) {
      auto v = parse_double(f[cols[i]]);
      if (!v) {
        throw MalformedRow(table.line_numbers[r],
                           fmt::format("bad {} value '{}'", original[cols[i]], f[cols[i]]));
      }
      values[i] = *v;
    }
    std::string character(trim(f[*key]));
    if (!lexical.entries.emplace(character, values).second) {
      throw MalformedRow(table.line_numbers[r], "duplicate character " + character);
    }
  }
  return lexical;
}

std::string format_lexical_table(const LexicalTable &table) {
  std::vector<std::string> header = {"character"};
  for (auto name : kLexicalPredictors) header.emplace_back(name);
  std::vector<std::vector<std::string>> rows;
  for (const auto &[character, values] : table.entries) {
    std::vector<std::string> row = {character};
    for (double v : values) row.push_back(format_double(v));
    rows.push_back(std::move(row));
  }
  return write_table(header, rows, '\t');
}

bool ItemTable::has_column(std::string_view name) {
  return name == "amnesia_rate" ||
         std::find(kItemMeasures.begin(), kItemMeasures.end(), name) != kItemMeasures.end() ||
         std::find(kLexicalPredictors.begin(), kLexicalPredictors.end(), name) !=
             kLexicalPredictors.end();
}

Maybe ItemTable::value(const ItemRow &row, std::string_view name) const {
  if (name == "amnesia_rate") return row.amnesia_rate;
  for (std::size_t i = 0; i < kItemMeasures.size(); ++i) {
    if (kItemMeasures[i] == name) return row.measures[i];
  }
  for (std::size_t i = 0; i < kLexicalPredictors.size(); ++i) {
    if (kLexicalPredictors[i] == name) return row.predictors[i];
  }
  throw ConfigError(fmt::format("unknown item column '{}'", name));
}

ItemTable aggregate_items(const RetainedData &retained,
                          const std::vector<TrialCoding> &codings,
                          const LexicalTable &lexical, AmnesiaDenominator denominator) {
  struct Accumulator {
    std::size_t trials = 0;
    std::size_t amnesia = 0;
    std::array<Mean, kItemMeasures.size()> means;
  };
  std::map<std::string, Accumulator> items;

  const std::set<TrialKey> kept(retained.trials.begin(), retained.trials.end());
  for (const auto &c : codings) {
    if (denominator == AmnesiaDenominator::kRetainedTrials && !kept.contains(c.key)) continue;
    Accumulator &acc = items[c.target];
    ++acc.trials;
    if (c.self_report == static_cast<int>(SelfReport::kAmnesia)) ++acc.amnesia;
  }
  for (const auto &o : retained.characters) {
    auto &m = items[o.target].means;
    m[0].add(o.char_rt);
    m[1].add(o.char_dur);
    m[2].add(o.char_len);
    m[3].add(o.char_press_avg);
  }
  for (const auto &o : retained.radicals) {
    auto &m = items[o.target].means;
    m[4].add(o.rad_rt_rel);
    m[5].add(o.rad_dur);
    m[6].add(o.rad_len);
    m[7].add(o.rad_dist);
    m[8].add(o.rad_press_avg);
  }
  for (const auto &o : retained.strokes) {
    auto &m = items[o.target].means;
    m[9].add(o.stroke_rt_rel);
    m[10].add(o.stroke_dur);
    m[11].add(o.stroke_len);
    m[12].add(o.stroke_dist);
    m[13].add(o.stroke_press_avg);
  }

  ItemTable table;
  for (const auto &[character, acc] : items) {
    auto entry = lexical.entries.find(character);
    if (entry == lexical.entries.end()) throw MissingLexicalEntry(character);
    ItemRow row;
    row.character = character;
    row.trials = acc.trials;
    row.amnesia_rate =
        acc.trials == 0 ? 0.0 : static_cast<double>(acc.amnesia) / static_cast<double>(acc.trials);
    for (std::size_t i = 0; i < kItemMeasures.size(); ++i) row.measures[i] = acc.means[i].value();
    row.predictors = entry->second;
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string format_item_table(const ItemTable &table) {
  std::vector<std::string> header = {"character", "trials", "amnesia_rate"};
  for (auto name : kItemMeasures) header.emplace_back(name);
  for (auto name : kLexicalPredictors) header.emplace_back(name);
  std::vector<std::vector<std::string>> rows;
  for (const auto &item : table.rows) {
    std::vector<std::string> row = {item.character, std::to_string(item.trials),
                                    format_double(item.amnesia_rate)};
    for (const auto &m : item.measures) row.push_back(maybe_cell(m));
    for (double p : item.predictors) row.push_back(format_double(p));
    rows.push_back(std::move(row));
  }
  return write_table(header, rows, '\t');
}

ItemTable parse_item_table(std::string_view text) {
  const TextTable t = parse_table(text);
  const std::size_t c_character = t.require("character");
  const std::size_t c_trials = t.require("trials");
  const std::size_t c_amnesia = t.require("amnesia_rate");
  std::array<std::size_t, kItemMeasures.size()> c_measures{};
  for (std::size_t i = 0; i < kItemMeasures.size(); ++i) c_measures[i] = t.require(kItemMeasures[i]);
  std::array<std::size_t, kLexicalPredictors.size()> c_predictors{};
  for (std::size_t i = 0; i < kLexicalPredictors.size(); ++i) {
    c_predictors[i] = t.require(kLexicalPredictors[i]);
  }

  ItemTable table;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto &f = t.rows[r];
    const std::size_t line = t.line_numbers[r];
    auto number = [&](std::size_t col) {
      auto v = parse_double(f[col]);
      if (!v) throw MalformedRow(line, fmt::format("bad {} value '{}'", t.header[col], f[col]));
      return *v;
    };
    ItemRow row;
    row.character = std::string(trim(f[c_character]));
    auto trials = parse_int(f[c_trials]);
    if (!trials || *trials < 0) throw MalformedRow(line, "bad trials count");
    row.trials = static_cast<std::size_t>(*trials);
    row.amnesia_rate = number(c_amnesia);
    for (std::size_t i = 0; i < kItemMeasures.size(); ++i) {
      if (trim(f[c_measures[i]]) == "NA") continue;
      row.measures[i] = number(c_measures[i]);
    }
    for (std::size_t i = 0; i < kLexicalPredictors.size(); ++i) {
      row.predictors[i] = number(c_predictors[i]);
    }
    table.rows.push_back(std::move(row));
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [](const ItemRow &a, const ItemRow &b) { return a.character < b.character; });
  return table;
}

}  // namespace penstream
