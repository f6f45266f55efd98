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

#include <gtest/gtest.h>

#include "penstream/errors.h"
#include "penstream/segmentation.h"
#include "penstream/synth.h"

namespace penstream {
namespace {

struct Built {
  std::vector<TrialRecord> trials;
  std::vector<SegmentTree> trees;
};

Built build(const std::vector<SynthSpec> &specs) {
  Built b;
  for (const auto &spec : specs) {
    const SynthTrial synth = generate_trial(spec);
    const auto spans = detect_strokes(synth.trial);
    b.trials.push_back(synth.trial);
    b.trees.push_back(build_segment_tree(synth.trial, spans, synth.radical_spans));
  }
  return b;
}

SynthSpec three_strokes() {
  SynthSpec spec;
  spec.strokes = {{{{0, 0}, {10, 0}}, {2}, {50}, 100, 5},
                  {{{0, 5}, {10, 5}}, {2}, {50}, 200, 5},
                  {{{0, 9}, {10, 9}}, {2}, {50}, 300, 5}};
  return spec;
}

TEST(Bundles, OneTrialOneRecord) {
  const Built b = build({three_strokes()});
  const std::string text = export_bundles(b.trials, b.trees, {});
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  const auto bundles = parse_bundles(text);
  ASSERT_EQ(bundles.size(), 1u);
  EXPECT_EQ(bundles[0].trial, b.trials[0]);
  EXPECT_EQ(bundles[0].strokes.size(), 3u);
  EXPECT_EQ(text.rfind("{\"v\":1,", 0), 0u);
}

TEST(Bundles, ExportImportIsTheIdentityOnTrees) {
  std::vector<SynthSpec> specs;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    SynthSpec spec = random_spec(seed);
    spec.trial_id = static_cast<std::int64_t>(seed);
    specs.push_back(spec);
  }
  const Built b = build(specs);
  TabletSpec tablet;
  tablet.lpmm = 12.5;
  const std::string text = export_bundles(b.trials, b.trees, tablet);
  const auto bundles = parse_bundles(text);
  ASSERT_EQ(bundles.size(), 100u);
  EXPECT_EQ(bundles[0].tablet.lpmm, 12.5);
  const SegmentsReport annotations = import_annotations(text, bundles);
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    const TrialBundle &bundle = bundles[i];
    const auto it = std::find_if(b.trials.begin(), b.trials.end(),
                                 [&](const TrialRecord &t) { return t.key() == bundle.trial.key(); });
    const std::size_t k = static_cast<std::size_t>(it - b.trials.begin());
    const SegmentTree rebuilt = build_segment_tree(bundle.trial, bundle.strokes,
                                                   annotations.radicals(bundle.trial.key()));
    ASSERT_EQ(rebuilt, b.trees[k]) << bundle.trial.key().str();
  }
  // A .segments.jsonl file of the same spans imports to the same report.
  EXPECT_EQ(import_annotations(format_annotations(annotations), bundles), annotations);
}

TEST(Bundles, CorpusRecordCountEqualsTrialCount) {
  CorpusOptions options;
  options.sessions = 1;
  const Corpus corpus = generate_corpus(options);
  Built b;
  for (const auto &t : corpus.sessions[0].trials) {
    const auto spans = detect_strokes(t.trial);
    if (spans.empty()) continue;
    b.trials.push_back(t.trial);
    b.trees.push_back(build_segment_tree(t.trial, spans, t.radical_spans));
  }
  EXPECT_EQ(parse_bundles(export_bundles(b.trials, b.trees, {})).size(), b.trials.size());
}

TEST(Annotations, TwoRadicalGrouping) {
  const Built b = build({three_strokes()});
  const auto bundles = parse_bundles(export_bundles(b.trials, b.trees, {}));
  const std::string edited =
      "{\"v\":1,\"subject\":\"1\",\"trial_id\":1,\"radicals\":["
      "{\"label\":\"L\",\"t_start\":100,\"t_end\":210},{\"label\":\"R\",\"t_start\":300,\"t_end\":310}]}\n";
  const SegmentsReport report = import_annotations(edited, bundles);
  const auto spans = report.radicals({"1", 1});
  ASSERT_EQ(spans.size(), 2u);
  const SegmentTree tree = build_segment_tree(bundles[0].trial, bundles[0].strokes, spans);
  ASSERT_EQ(tree.radicals.size(), 2u);
  EXPECT_EQ(tree.radicals[0].strokes, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(tree.radicals[1].strokes, (std::vector<std::size_t>{2}));
}

TEST(Annotations, Errors) {
  const Built b = build({three_strokes()});
  const auto bundles = parse_bundles(export_bundles(b.trials, b.trees, {}));
  const std::string overlap =
      "{\"v\":1,\"subject\":\"1\",\"trial_id\":1,\"radicals\":["
      "{\"label\":\"L\",\"t_start\":100,\"t_end\":250},{\"label\":\"R\",\"t_start\":200,\"t_end\":310}]}\n";
  EXPECT_THROW(read_annotations(overlap), OverlappingSpans);
  const std::string orphan =
      "{\"v\":1,\"subject\":\"1\",\"trial_id\":1,\"radicals\":[{\"label\":\"L\",\"t_start\":100,\"t_end\":210}]}\n";
  try {
    import_annotations(orphan, bundles);
    FAIL();
  } catch (const UnassignedStroke &e) {
    EXPECT_EQ(e.stroke(), 3u);
  }
  const std::string unknown = "{\"v\":1,\"subject\":\"9\",\"trial_id\":1,\"radicals\":[]}\n";
  EXPECT_THROW(import_annotations(unknown, bundles), DataError);
}

TEST(Annotations, MalformedLineIsNamed) {
  const std::string text =
      "{\"v\":1,\"subject\":\"1\",\"trial_id\":1,\"radicals\":[]}\n\nnot json\n";
  try {
    read_annotations(text);
    FAIL();
  } catch (const MalformedRow &e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    read_annotations("{\"v\":2,\"subject\":\"1\",\"trial_id\":1,\"radicals\":[]}\n");
    FAIL();
  } catch (const MalformedRow &e) {
    EXPECT_EQ(e.line(), 1u);
  }
  EXPECT_THROW(parse_bundles("{\"v\":1}\n"), MalformedRow);
}

}  // namespace
}  // namespace penstream
