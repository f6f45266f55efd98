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


#include "penstream/trial_bundle.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "penstream/errors.h"
#include "penstream/segmentation.h"

namespace penstream {
namespace {

using Json = nlohmann::ordered_json;

Json spans_json(const std::vector<LabeledSpan> &spans) {
  Json out = Json::array();
  for (const LabeledSpan &s : spans) {
    out.push_back({{"label", s.label}, {"t_start", s.t_start}, {"t_end", s.t_end}});
  }
  return out;
}

std::vector<LabeledSpan> spans_from(const Json &array) {
  std::vector<LabeledSpan> spans;
  for (const Json &s : array) {
    spans.push_back({SegmentLevel::kRadical, s.at("label").get<std::string>(),
                     s.at("t_start").get<double>(), s.at("t_end").get<double>()});
  }
  return spans;
}

template <typename F>
void for_each_line(std::string_view text, F &&f) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    Json record;
    try {
      record = Json::parse(line);
      const int version = record.at("v").get<int>();
      if (version != kBundleVersion) {
        throw MalformedRow(line_no, "unsupported version " + std::to_string(version));
      }
      f(record);
    } catch (const Json::exception &e) {
      throw MalformedRow(line_no, e.what());
    } catch (const std::invalid_argument &e) {
      throw MalformedRow(line_no, e.what());
    }
  }
}

}  // namespace

std::vector<LabeledSpan> radical_spans_of(const TrialRecord &trial, const SegmentTree &tree) {
  std::vector<LabeledSpan> spans;
  for (const RadicalNode &radical : tree.radicals) {
    if (radical.strokes.empty()) continue;
    const TreeStroke &first = tree.strokes[radical.strokes.front()];
    const TreeStroke &last = tree.strokes[radical.strokes.back()];
    spans.push_back({SegmentLevel::kRadical, radical.label,
                     trial.samples[first.span.first_index].t,
                     trial.samples[last.span.last_index].t});
  }
  return spans;
}

std::string export_bundles(const std::vector<TrialRecord> &trials,
                           const std::vector<SegmentTree> &trees, const TabletSpec &tablet) {
  if (trials.size() != trees.size()) throw DataError("one segment tree per trial expected");
  std::vector<std::size_t> order(trials.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return trials[a].key() < trials[b].key(); });

  std::string out;
  for (std::size_t i : order) {
    const TrialRecord &t = trials[i];
    Json samples = Json::array();
    for (const PenSample &s : t.samples) samples.push_back({s.t, s.x, s.y, s.pressure});
    Json strokes = Json::array();
    for (const StrokeSpan &s : detect_strokes(t)) strokes.push_back({s.first_index, s.last_index});
    Json record = {
        {"v", kBundleVersion},
        {"subject", t.subject_id},
        {"trial_id", t.trial_id},
        {"row_index", t.row_index},
        {"target", t.target},
        {"self_report", t.self_report},
        {"revised", t.revised},
        {"aud_onset", t.aud_onset},
        {"aud_offset", t.aud_offset},
        {"trial_start", t.trial_start},
        {"trial_end", t.trial_end},
        {"tablet",
         {{"lpmm", tablet.lpmm},
          {"sample_rate_hz", tablet.sample_rate_hz},
          {"width_mm", tablet.width_mm},
          {"height_mm", tablet.height_mm}}},
        {"samples", std::move(samples)},
        {"strokes", std::move(strokes)},
        {"radicals", spans_json(radical_spans_of(t, trees[i]))},
    };
    out += record.dump();
    out += '\n';
  }
  return out;
}

std::vector<TrialBundle> parse_bundles(std::string_view text) {
  std::vector<TrialBundle> bundles;
  for_each_line(text, [&](const Json &r) {
    TrialBundle b;
    TrialRecord &t = b.trial;
    t.subject_id = r.at("subject").get<std::string>();
    t.trial_id = r.at("trial_id").get<std::int64_t>();
    t.row_index = r.at("row_index").get<std::int64_t>();
    t.target = r.at("target").get<std::string>();
    t.self_report = r.at("self_report").get<std::int64_t>();
    t.revised = r.value("revised", false);
    t.aud_onset = r.at("aud_onset").get<double>();
    t.aud_offset = r.at("aud_offset").get<double>();
    t.trial_start = r.at("trial_start").get<double>();
    t.trial_end = r.at("trial_end").get<double>();
    const Json &tablet = r.at("tablet");
    b.tablet.lpmm = tablet.at("lpmm").get<double>();
    b.tablet.sample_rate_hz = tablet.value("sample_rate_hz", b.tablet.sample_rate_hz);
    b.tablet.width_mm = tablet.value("width_mm", 0.0);
    b.tablet.height_mm = tablet.value("height_mm", 0.0);
    for (const Json &s : r.at("samples")) {
      if (s.size() != 4) throw std::invalid_argument("sample needs [t, x, y, pressure]");
      t.samples.push_back({s[0].get<double>(), s[1].get<double>(), s[2].get<double>(),
                           s[3].get<double>()});
    }
    for (const Json &s : r.at("strokes")) {
      b.strokes.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
    }
    b.radicals = spans_from(r.value("radicals", Json::array()));
    bundles.push_back(std::move(b));
  });
  return bundles;
}

std::string format_annotations(const SegmentsReport &report) {
  std::string out;
  for (const auto &[key, spans] : report.trials) {
    std::vector<LabeledSpan> radicals;
    for (const LabeledSpan &s : spans) {
      if (s.level == SegmentLevel::kRadical) radicals.push_back(s);
    }
    Json record = {{"v", kBundleVersion},
                   {"subject", key.subject},
                   {"trial_id", key.trial_id},
                   {"radicals", spans_json(radicals)}};
    out += record.dump();
    out += '\n';
  }
  return out;
}

SegmentsReport read_annotations(std::string_view text) {
  SegmentsReport report;
  for_each_line(text, [&](const Json &r) {
    const TrialKey key{r.at("subject").get<std::string>(), r.at("trial_id").get<std::int64_t>()};
    auto spans = spans_from(r.value("radicals", Json::array()));
    check_no_overlap(key, spans);
    if (!spans.empty()) report.trials[key] = std::move(spans);
  });
  return report;
}

SegmentsReport import_annotations(std::string_view text, const std::vector<TrialBundle> &bundles) {
  std::map<TrialKey, const TrialBundle *> by_key;
  for (const TrialBundle &b : bundles) by_key[b.trial.key()] = &b;

  SegmentsReport report;
  for_each_line(text, [&](const Json &r) {
    const TrialKey key{r.at("subject").get<std::string>(), r.at("trial_id").get<std::int64_t>()};
    auto spans = spans_from(r.value("radicals", Json::array()));
    auto it = by_key.find(key);
    if (it == by_key.end()) throw DataError("annotations for unknown trial " + key.str());
    check_no_overlap(key, spans);
    const TrialRecord &trial = it->second->trial;
    build_segment_tree(trial, detect_strokes(trial), spans);
    if (!spans.empty()) report.trials[key] = std::move(spans);
  });
  return report;
}

}  // namespace penstream
