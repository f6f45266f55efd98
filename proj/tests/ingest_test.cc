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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "penstream/errors.h"
#include "penstream/synth.h"
#include "test_util.h"

namespace penstream {
namespace {

TrialRecord synth_trial(std::uint64_t seed, const std::string &subject = "1", std::int64_t id = 1) {
  SynthSpec spec = random_spec(seed);
  spec.subject = subject;
  spec.trial_id = id;
  return generate_trial(spec).trial;
}

TEST(PenSampleReport, MinimalInputGivesOneHoveringSample) {
  const auto trials = parse_pen_sample_report("subject\tDV_TRIAL_ID\ttime\tx\ty\tpressure\n1\t1\t0\t0\t0\t0\n");
  ASSERT_EQ(trials.size(), 1u);
  ASSERT_EQ(trials[0].samples.size(), 1u);
  EXPECT_FALSE(trials[0].samples[0].pressed());
  EXPECT_TRUE(validate_trial(trials[0]).empty());
}

TEST(PenSampleReport, ShuffledRowsAreSortedByTime) {
  const TrialRecord original = synth_trial(3);
  const std::string text = serialize_pen_sample_report({original});
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t end = text.find('\n', start);
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  std::mt19937_64 rng(11);
  std::shuffle(lines.begin() + 1, lines.end(), rng);
  std::string shuffled;
  for (const auto &line : lines) shuffled += line + "\n";
  const auto parsed = parse_pen_sample_report(shuffled);
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(parsed[0], original);
}

TEST(PenSampleReport, MissingPressureColumn) {
  try {
    parse_pen_sample_report("subject\tDV_TRIAL_ID\ttime\tx\ty\n1\t1\t0\t0\t0\n");
    FAIL();
  } catch (const MissingColumn &e) {
    EXPECT_EQ(e.name(), "pressure");
  }
}

TEST(PenSampleReport, EmptyListSerializesToHeaderOnly) {
  const std::string text = serialize_pen_sample_report({});
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  EXPECT_TRUE(parse_pen_sample_report(text).empty());
}

TEST(PenSampleReport, RoundTripsOneTrial) {
  const TrialRecord trial = synth_trial(5);
  const auto parsed = parse_pen_sample_report(serialize_pen_sample_report({trial}));
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(parsed[0], trial);
}

TEST(PenSampleReport, GroupsBySubjectThenTrial) {
  const std::vector<TrialRecord> trials = {synth_trial(1, "b", 2), synth_trial(2, "a", 9),
                                           synth_trial(3, "b", 1), synth_trial(4, "a", 3)};
  const std::string text = serialize_pen_sample_report(trials);
  const auto parsed = parse_pen_sample_report(text);
  ASSERT_EQ(parsed.size(), 4u);
  EXPECT_EQ(parsed[0], trials[3]);
  EXPECT_EQ(parsed[1], trials[1]);
  EXPECT_EQ(parsed[2], trials[2]);
  EXPECT_EQ(parsed[3], trials[0]);
  EXPECT_EQ(serialize_pen_sample_report(parsed), text);
}

TEST(PenSampleReport, SecondsAreScaledToMilliseconds) {
  IngestOptions options;
  options.units = TimeUnit::kSeconds;
  const auto trials = parse_pen_sample_report(
      "subject\tDV_TRIAL_ID\ttime\tx\ty\tpressure\tDV_AUD_OFFSET\n"
      "1\t1\t1.5\t0\t0\t10\t1.25\n1\t1\t1.505\t1\t0\t10\t1.25\n",
      options);
  ASSERT_EQ(trials.size(), 1u);
  EXPECT_DOUBLE_EQ(trials[0].samples[0].t, 1500);
  EXPECT_DOUBLE_EQ(trials[0].samples[1].t, 1505);
  EXPECT_DOUBLE_EQ(trials[0].aud_offset, 1250);
}

TEST(PenSampleReport, AliasesMapLocalColumnNames) {
  IngestOptions options;
  options.aliases = {{"participant", "subject"}, {"ms", "time"}, {"p", "pressure"}};
  const auto trials = parse_pen_sample_report(
      "participant\tDV_TRIAL_ID\tms\tx\ty\tp\n7\t2\t10\t0\t0\t3\n", options);
  ASSERT_EQ(trials.size(), 1u);
  EXPECT_EQ(trials[0].subject_id, "7");
  EXPECT_DOUBLE_EQ(trials[0].samples[0].pressure, 3);
}

TEST(PenSampleReport, DefaultsForAbsentTrialVariables) {
  const auto trials = parse_pen_sample_report(
      "subject\tDV_TRIAL_ID\ttime\tx\ty\tpressure\n1\t4\t20\t0\t0\t0\n1\t4\t30\t0\t0\t1\n");
  const TrialRecord &t = trials.at(0);
  EXPECT_EQ(t.trial_start, 20);
  EXPECT_EQ(t.trial_end, 30);
  EXPECT_EQ(t.aud_onset, 20);
  EXPECT_EQ(t.aud_offset, 20);
  EXPECT_EQ(t.row_index, 4);
  EXPECT_EQ(t.self_report, 0);
  EXPECT_FALSE(t.revised);
}

TEST(PenSampleReport, RejectsBadRows) {
  const std::string header = "subject\tDV_TRIAL_ID\ttime\tx\ty\tpressure\tself_report\n";
  try {
    parse_pen_sample_report(header + "1\t1\t0\t0\t0\t0\t0\n1\t1\tabc\t0\t0\t0\t0\n");
    FAIL();
  } catch (const MalformedRow &e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_pen_sample_report(header + "1\t1\t0\t0\t0\t-1\t0\n"), MalformedRow);
  EXPECT_THROW(parse_pen_sample_report(header + "1\t1\t0\t0\t0\t0\t0\n1\t1\t5\t0\t0\t0\t1\n"),
               MalformedRow);
  EXPECT_THROW(parse_pen_sample_report(""), EmptyReport);
}

TEST(SegmentsReport, OneRadicalSpan) {
  const SegmentsReport report = parse_segments_report(
      "subject\tDV_TRIAL_ID\tlevel\tlabel\tt_start\tt_end\n1\t1\tradical\tA\t100\t300\n");
  ASSERT_EQ(report.trials.size(), 1u);
  const auto radicals = report.radicals({"1", 1});
  ASSERT_EQ(radicals.size(), 1u);
  EXPECT_EQ(radicals[0], (LabeledSpan{SegmentLevel::kRadical, "A", 100, 300}));
  EXPECT_TRUE(report.radicals({"1", 2}).empty());
}

TEST(SegmentsReport, OverlapIsRejectedButTouchingIsNot) {
  const std::string header = "subject\tDV_TRIAL_ID\tlevel\tlabel\tt_start\tt_end\n";
  EXPECT_THROW(parse_segments_report(header + "1\t1\tradical\tA\t100\t300\n1\t1\tradical\tB\t250\t400\n"),
               OverlappingSpans);
  EXPECT_NO_THROW(parse_segments_report(header + "1\t1\tradical\tA\t100\t300\n1\t1\tradical\tB\t300\t400\n"));
  EXPECT_NO_THROW(parse_segments_report(header + "1\t1\tradical\tA\t100\t300\n1\t1\tcharacter\tC\t100\t400\n"));
}

TEST(SegmentsReport, ThreeRadicalsComeBackOrderedAndRoundTrip) {
  const SegmentsReport report = parse_segments_report(
      "subject\tDV_TRIAL_ID\tlevel\tlabel\tt_start\tt_end\n"
      "1\t1\tradical\tC\t500\t600\n1\t1\tradical\tA\t100\t200\n1\t1\tradical\tB\t300\t400\n");
  const auto radicals = report.radicals({"1", 1});
  ASSERT_EQ(radicals.size(), 3u);
  EXPECT_EQ(radicals[0].label, "A");
  EXPECT_EQ(radicals[1].label, "B");
  EXPECT_EQ(radicals[2].label, "C");
  EXPECT_EQ(parse_segments_report(serialize_segments_report(report)), report);
}

TEST(SegmentsReport, MergeChecksOverlapAcrossSources) {
  SegmentsReport a, b;
  a.trials[{"1", 1}] = {{SegmentLevel::kRadical, "A", 0, 100}};
  b.trials[{"1", 1}] = {{SegmentLevel::kRadical, "B", 50, 150}};
  EXPECT_THROW(a.merge(b), OverlappingSpans);
}

TEST(SegmentsReport, CollectsSampleLabels) {
  const SegmentsReport report = segments_from_sample_labels(
      "subject\tDV_TRIAL_ID\ttime\tx\ty\tpressure\tsegment_level\tsegment_label\n"
      "1\t1\t10\t0\t0\t1\tradical\tL\n1\t1\t15\t0\t0\t1\tradical\tL\n"
      "1\t1\t20\t0\t0\t1\tradical\tR\n1\t1\t30\t0\t0\t1\tradical\tR\n");
  const auto radicals = report.radicals({"1", 1});
  ASSERT_EQ(radicals.size(), 2u);
  EXPECT_EQ(radicals[0], (LabeledSpan{SegmentLevel::kRadical, "L", 10, 15}));
  EXPECT_EQ(radicals[1], (LabeledSpan{SegmentLevel::kRadical, "R", 20, 30}));
}

ConditionTable fixture_conditions() {
  return parse_condition_file(testutil::slurp(testutil::data_path("fixtures/conditions.tsv")));
}

TEST(ConditionFile, AcceptsTheSevenItemExample) {
  const ConditionTable table = fixture_conditions();
  EXPECT_EQ(table.rows.size(), 7u);
  EXPECT_TRUE(validate_condition_file(table).empty());
}

TEST(ConditionFile, IntegerPlaceholderWhereRealIsRequired) {
  ConditionTable table = fixture_conditions();
  const auto col = static_cast<std::size_t>(
      std::find(table.header.begin(), table.header.end(), "DV_TRIAL_START") - table.header.begin());
  for (auto &row : table.rows) row[col] = "-1";
  EXPECT_EQ(validate_condition_file(table),
            std::vector<std::string>{"DV_TRIAL_START placeholder must be real-typed"});
}

TEST(ConditionFile, MissingRowIndexColumn) {
  ConditionTable table = fixture_conditions();
  const auto col = static_cast<std::size_t>(
      std::find(table.header.begin(), table.header.end(), "ROW_INDEX") - table.header.begin());
  table.header.erase(table.header.begin() + static_cast<std::ptrdiff_t>(col));
  for (auto &row : table.rows) row.erase(row.begin() + static_cast<std::ptrdiff_t>(col));
  EXPECT_EQ(validate_condition_file(table), std::vector<std::string>{"missing column ROW_INDEX"});
}

TEST(ConditionFile, RowIndexMustBeUniquePositive) {
  ConditionTable table = fixture_conditions();
  table.rows[2][5] = "2";
  EXPECT_EQ(validate_condition_file(table), std::vector<std::string>{"ROW_INDEX value 2 is duplicated"});
  table = fixture_conditions();
  table.rows[0][5] = "0";
  EXPECT_EQ(validate_condition_file(table).size(), 1u);
}

}  // namespace
}  // namespace penstream
