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


// Acceptance checks. Prints one PASS or FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli_util.h"
#include "oracles.h"
#include "penstream/cleaning.h"
#include "penstream/errors.h"
#include "penstream/ingest.h"
#include "penstream/metrics.h"
#include "penstream/segmentation.h"
#include "penstream/stats.h"
#include "penstream/synth.h"

namespace {

using namespace penstream;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string &what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

long long thousandths(double mm) { return std::llround(mm * 1000); }

const MetricRow *stroke_row(const std::vector<MetricRow> &rows, int label) {
  for (const auto &r : rows) {
    if (r.stroke.stroke_label == label) return &r;
  }
  return nullptr;
}

Outcome reference_trial_consistency() {
  Outcome o;
  const auto started = std::chrono::steady_clock::now();
  const auto rows = parse_long_format(testutil::slurp(testutil::data_path("fixtures/dao_trial.tsv")));
  o.require(rows.size() == 11, "expected 11 rows for strokes 3-13");
  if (!o.pass) return o;

  const RadicalComposition r2 = compose_radical(rows, 2);
  const RadicalComposition r3 = compose_radical(rows, 3);
  o.require(r2.stroke_dur_sum == 299 && r2.internal_rt_sum == 245, "radical 2 duration parts");
  o.require(r2.stroke_dur_sum + r2.internal_rt_sum == 544 && stroke_row(rows, 6)->radical.rad_dur == 544,
            "radical 2 duration 299 + 245 = 544");
  o.require(r3.stroke_dur_sum == 617 && r3.internal_rt_sum == 307, "radical 3 duration parts");
  o.require(r3.stroke_dur_sum + r3.internal_rt_sum == 924 && stroke_row(rows, 10)->radical.rad_dur == 924,
            "radical 3 duration 617 + 307 = 924");

  auto within = [](double a, double b) { return std::llabs(thousandths(a) - thousandths(b)) <= 5; };
  o.require(within(r2.stroke_len_sum, 7.245) && within(stroke_row(rows, 6)->radical.rad_len, 7.245),
            "radical 2 length sums to 7.245");
  o.require(within(r3.stroke_len_sum, 17.33) && within(stroke_row(rows, 10)->radical.rad_len, 17.33),
            "radical 3 length sums to 17.33");

  const CharacterComposition c = compose_character(rows);
  o.require(c.rad_dur_sum == 2317 && c.rad_rt_sum == 203, "character duration parts 2317 and 203");
  o.require(c.rad_dur_sum + c.rad_rt_sum == rows[0].character.char_dur && rows[0].character.char_dur == 2520,
            "character duration 2317 + 203 = 2520");
  o.require(thousandths(c.rad_len_sum) == 42465, "radical lengths sum to 42.465");
  o.require(within(c.rad_len_sum, rows[0].character.char_len) && export_length(rows[0].character.char_len) == "42.46",
            "character length 42.465 matches exported 42.46");

  const MetricRow *s6 = stroke_row(rows, 6);
  const MetricRow *s10 = stroke_row(rows, 10);
  o.require(s6->radical.rad_rt_rel == 123 && s6->stroke.stroke_rt_rel == 123, "radical 2 latency = stroke 6 latency = 123");
  o.require(thousandths(*s10->radical.rad_dist) == 1535 && thousandths(*s10->stroke.stroke_dist) == 1535,
            "radical 3 distance = stroke 10 distance = 1.535");
  std::vector<MetricRow> complete;
  for (const auto &r : rows) {
    if (r.radical.rad_label >= 2) complete.push_back(r);
  }
  o.require(first_member_consistency(complete, 5e-4).empty(), "first-member equalities for radicals 2 and 3");

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  o.require(seconds < 1, fmt::format("runtime {:.3f} s exceeds 1 s", seconds));
  if (o.pass) o.detail = fmt::format("all identities hold, {:.3f} s", seconds);
  return o;
}

Outcome synthetic_end_to_end() {
  Outcome o;
  const auto started = std::chrono::steady_clock::now();
  std::size_t rows_checked = 0;
  for (std::uint64_t seed = 1; seed <= 500 && o.pass; ++seed) {
    const SynthSpec spec = random_spec(seed);
    const SynthTrial synth = generate_trial(spec);
    SegmentsReport segments;
    if (!synth.radical_spans.empty()) segments.trials[synth.trial.key()] = synth.radical_spans;

    const auto trials = parse_pen_sample_report(serialize_pen_sample_report({synth.trial}));
    const SegmentsReport parsed_segments = parse_segments_report(serialize_segments_report(segments));
    if (trials.size() != 1) {
      o.require(false, fmt::format("seed {}: {} trials after parse", seed, trials.size()));
      break;
    }
    const TrialRecord &trial = trials[0];
    const auto spans = detect_strokes(trial);
    const SegmentTree tree = build_segment_tree(trial, spans, parsed_segments.radicals(trial.key()));
    const auto rows = compute_metrics(trial, tree, {spec.lpmm});
    const std::string diff = oracle::compare_rows(rows, synth.expected, 1e-9);
    o.require(diff.empty(), fmt::format("seed {}: {}", seed, diff));
    rows_checked += rows.size();
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  o.require(seconds < 30, fmt::format("runtime {:.2f} s exceeds 30 s", seconds));
  if (o.pass) o.detail = fmt::format("500 specs, {} stroke rows equal, {:.2f} s", rows_checked, seconds);
  return o;
}

MetricRow exclusion_row(std::int64_t trial, double char_rt, double char_dur, int rad, Maybe rad_rt,
                        double rad_dur, int stroke, Maybe stroke_rt, double stroke_dur) {
  MetricRow row;
  row.subject = "p";
  row.trial_id = trial;
  row.row_index = trial;
  row.target = "A";
  row.character = {char_dur, char_rt, 10, 100};
  row.radical = {rad, rad_dur, rad_rt, 5, rad_rt ? Maybe{1.0} : Maybe{}, 100};
  row.stroke = {stroke, stroke_dur, stroke_rt, 2, stroke_rt ? Maybe{1.0} : Maybe{}, 100, 0};
  return row;
}

TrialCoding exclusion_coding(std::int64_t trial, Coding c = Coding::kCorrect) {
  return {{"p", trial}, trial, "A", 0, c, true};
}

Outcome exclusion_thresholds() {
  Outcome o;
  // value -> expected survival, per measure
  struct Probe {
    const char *name;
    double value;
    bool kept;
  };
  const Probe probes[] = {
      {"char_rt", 10000, true},    {"char_rt", 10001, false},  {"char_rt", 10500, false},
      {"char_dur", 1000, true},    {"char_dur", 999, false},   {"char_dur", 900, false},
      {"char_dur", 10000, true},   {"char_dur", 10001, false}, {"rad_rt", 2000, true},
      {"rad_rt", 2001, false},     {"rad_dur", 2000, true},    {"rad_dur", 2001, false},
      {"stroke_rt", 1999, true},   {"stroke_rt", 2000, true},  {"stroke_rt", 2001, false},
      {"stroke_dur", 2000, true},  {"stroke_dur", 2001, false}};
  for (const Probe &p : probes) {
    const std::string name = p.name;
    MetricRow row = exclusion_row(1, 500, 1500, 2, 100, 500, 2, 100, 100);
    if (name == "char_rt") row.character.char_rt = p.value;
    if (name == "char_dur") row.character.char_dur = p.value;
    if (name == "rad_rt") row.radical.rad_rt_rel = p.value;
    if (name == "rad_dur") row.radical.rad_dur = p.value;
    if (name == "stroke_rt") row.stroke.stroke_rt_rel = p.value;
    if (name == "stroke_dur") row.stroke.stroke_dur = p.value;
    const auto [retained, stats] = apply_exclusions({row}, {exclusion_coding(1)}, {});
    bool kept = false;
    if (name == "char_rt") kept = retained.characters[0].char_rt.has_value();
    if (name == "char_dur") kept = retained.characters[0].char_dur.has_value();
    if (name == "rad_rt") kept = retained.radicals[0].rad_rt_rel.has_value();
    if (name == "rad_dur") kept = retained.radicals[0].rad_dur.has_value();
    if (name == "stroke_rt") kept = retained.strokes[0].stroke_rt_rel.has_value();
    if (name == "stroke_dur") kept = retained.strokes[0].stroke_dur.has_value();
    o.require(kept == p.kept, fmt::format("{} = {} should be {}", name, p.value, p.kept ? "kept" : "excluded"));
  }

  // Hand-counted fixture.
  const std::vector<MetricRow> rows = {
      exclusion_row(1, 12000, 1500, 1, {}, 2500, 1, {}, 300),
      exclusion_row(1, 12000, 1500, 1, {}, 2500, 2, 2001, 200),
      exclusion_row(1, 12000, 1500, 2, 1999, 700, 3, 1999, 2001),
      exclusion_row(2, 800, 900, 1, {}, 1000, 1, {}, 400),
      exclusion_row(2, 800, 900, 1, {}, 1000, 2, 150, 2500),
      exclusion_row(3, 20000, 100, 1, {}, 9000, 1, {}, 9000),
      exclusion_row(4, 20000, 100, 1, {}, 9000, 1, {}, 9000),
      exclusion_row(5, 10000, 10001, 1, {}, 2000, 1, {}, 2000)};
  const std::vector<TrialCoding> codings = {exclusion_coding(1), exclusion_coding(2),
                                            exclusion_coding(3, Coding::kIncorrect),
                                            exclusion_coding(4, Coding::kRevised), exclusion_coding(5)};
  const auto [retained, stats] = apply_exclusions(rows, codings, {});
  struct Count {
    const char *level, *measure;
    std::size_t removed, observed;
  };
  const Count counts[] = {{"character", "latency", 1, 3}, {"character", "duration", 2, 3},
                          {"radical", "latency", 0, 1},   {"radical", "duration", 1, 4},
                          {"stroke", "latency", 1, 3},    {"stroke", "duration", 2, 6}};
  for (const Count &c : counts) {
    const MeasureExclusion &m = stats.find(c.level, c.measure);
    o.require(m.observed == c.observed && m.removed == c.removed,
              fmt::format("{} {}: {}/{} vs hand count {}/{}", c.level, c.measure, m.removed, m.observed,
                          c.removed, c.observed));
    o.require(m.fraction() == static_cast<double>(c.removed) / static_cast<double>(c.observed),
              fmt::format("{} {} fraction", c.level, c.measure));
  }
  o.require(stats.trials == 5 && stats.incorrect_removed == 1 && stats.revised_removed == 1,
            "coding exclusions 1 incorrect and 1 revised of 5");
  if (o.pass) o.detail = fmt::format("{} boundary probes and 6 hand-counted fractions", std::size(probes));
  return o;
}

std::vector<std::vector<double>> rows_of(const Eigen::MatrixXd &m) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)].push_back(m(i, j));
  }
  return out;
}

std::vector<std::vector<double>> cols_of(const Eigen::MatrixXd &m) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(j)].push_back(m(i, j));
  }
  return out;
}

DesignMatrix named(const Eigen::MatrixXd &values) {
  DesignMatrix d{values, {}};
  for (Eigen::Index j = 0; j < values.cols(); ++j) d.names.push_back("x" + std::to_string(j + 1));
  return d;
}

Outcome ols_engine() {
  Outcome o;
  std::mt19937_64 rng(2026);
  std::normal_distribution<double> normal;
  double worst_beta = 0, worst_se = 0, worst_t = 0, worst_p = 0, worst_ortho = 0;
  for (int problem = 0; problem < 100 && o.pass; ++problem) {
    const int p = 1 + static_cast<int>(rng() % 16);
    const int n = p + 5 + static_cast<int>(rng() % static_cast<unsigned>(500 - p - 5 + 1));
    Eigen::MatrixXd x(n, p);
    for (int i = 0; i < n; ++i) {
      x(i, 0) = 1;
      for (int j = 1; j < p; ++j) x(i, j) = normal(rng);
    }
    Eigen::VectorXd beta(p);
    for (int j = 0; j < p; ++j) beta(j) = std::uniform_real_distribution<double>(-2, 2)(rng);
    Eigen::VectorXd y = x * beta;
    for (int i = 0; i < n; ++i) y(i) += normal(rng);

    DesignMatrix design = named(x);
    design.names[0] = std::string(kInterceptName);
    const FitResult fit = ols_fit(design, y);
    const auto want = oracle::normal_equations(rows_of(x), std::vector<double>(y.data(), y.data() + n));
    for (int j = 0; j < p; ++j) {
      const Coefficient &c = fit.coefficients[static_cast<std::size_t>(j)];
      worst_beta = std::max(worst_beta, std::abs(c.beta - want.beta[j]));
      worst_se = std::max(worst_se, std::abs(c.se - want.se[j]));
      worst_t = std::max(worst_t, std::abs(c.t - want.t[j]) / std::max(1.0, std::abs(want.t[j])));
      worst_p = std::max(worst_p, std::abs(c.p - want.p[j]));
    }
    worst_ortho = std::max(worst_ortho, (x.transpose() * fit.residuals).cwiseAbs().maxCoeff());
  }
  o.require(worst_beta <= 1e-8, fmt::format("beta differs by {:.3g}", worst_beta));
  o.require(worst_se <= 1e-8, fmt::format("SE differs by {:.3g}", worst_se));
  o.require(worst_t <= 1e-8, fmt::format("t differs by {:.3g} relative", worst_t));
  o.require(worst_p <= 1e-6, fmt::format("p differs by {:.3g}", worst_p));
  o.require(worst_ortho < 1e-8, fmt::format("|X'r| reaches {:.3g}", worst_ortho));
  if (o.pass) {
    o.detail = fmt::format("100 problems; max |dbeta| {:.2g}, |dSE| {:.2g}, rel |dt| {:.2g}, |dp| {:.2g}, |X'r| {:.2g}",
                           worst_beta, worst_se, worst_t, worst_p, worst_ortho);
  }
  return o;
}

Outcome vif_pruning() {
  Outcome o;
  // Full 2^4 factorial: main effects and two-way products are orthogonal.
  Eigen::MatrixXd orthogonal(16, 10);
  for (int run = 0; run < 16; ++run) {
    double f[4];
    for (int b = 0; b < 4; ++b) f[b] = (run >> b) & 1 ? 1.0 : -1.0;
    int c = 0;
    for (int b = 0; b < 4; ++b) orthogonal(run, c++) = f[b];
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) orthogonal(run, c++) = f[a] * f[b];
    }
  }
  double worst = 0;
  for (double v : variance_inflation(orthogonal)) worst = std::max(worst, std::abs(v - 1));
  o.require(worst <= 1e-10, fmt::format("orthogonal VIF off by {:.3g}", worst));
  o.require(vif_stepwise(named(orthogonal), 5).retained.size() == 10, "orthogonal design lost a column");

  std::mt19937_64 rng(55);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd dup(60, 4);
  for (int i = 0; i < 60; ++i) {
    for (int j = 0; j < 4; ++j) dup(i, j) = normal(rng);
  }
  dup.col(3) = dup.col(1);
  const VifSelection first = vif_stepwise(named(dup), 5);
  const VifSelection again = vif_stepwise(named(dup), 5);
  o.require(first.log.size() == 2 && first.log[0].dropped == std::string("x4"),
            "duplicate column x4 should be the one dropped");
  o.require(first.retained == std::vector<std::string>{"x1", "x2", "x3"}, "duplicate pruning retained set");
  o.require(format_vif_log(first) == format_vif_log(again), "duplicate pruning is not deterministic");

  std::size_t drops = 0;
  for (int design = 0; design < 50 && o.pass; ++design) {
    const int k = 4 + static_cast<int>(rng() % 7);
    const int n = 40 + static_cast<int>(rng() % 160);
    Eigen::MatrixXd m(n, k);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < k; ++j) m(i, j) = normal(rng);
    }
    // A few columns are noisy blends of earlier ones.
    for (int j = 2; j < k; ++j) {
      if (rng() % 3 != 0) continue;
      const int a = static_cast<int>(rng() % static_cast<unsigned>(j));
      const int b = static_cast<int>(rng() % static_cast<unsigned>(j));
      const double noise = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
      m.col(j) = m.col(a) + 0.5 * m.col(b) + noise * m.col(j);
    }
    std::vector<std::size_t> kept;
    const auto steps = oracle::vif_stepwise(cols_of(m), 5, &kept);
    const VifSelection got = vif_stepwise(named(m), 5);
    o.require(got.log.size() == steps.size(), fmt::format("design {}: {} steps vs {}", design, got.log.size(), steps.size()));
    if (!o.pass) break;
    for (std::size_t s = 0; s < steps.size(); ++s) {
      const std::optional<std::string> want_drop =
          steps[s].dropped ? std::optional<std::string>("x" + std::to_string(*steps[s].dropped + 1)) : std::nullopt;
      o.require(got.log[s].dropped == want_drop, fmt::format("design {} step {}: dropped column differs", design, s + 1));
      drops += want_drop.has_value();
      for (std::size_t j = 0; j < steps[s].vifs.size(); ++j) {
        const double a = got.log[s].vifs[j].second, b = steps[s].vifs[j];
        o.require((std::isinf(a) && std::isinf(b)) || oracle::close(a, b, 1e-8),
                  fmt::format("design {} step {}: VIF {} vs {}", design, s + 1, a, b));
      }
    }
    std::vector<std::string> want_kept;
    for (std::size_t j : kept) want_kept.push_back("x" + std::to_string(j + 1));
    o.require(got.retained == want_kept, fmt::format("design {}: retained set differs", design));
  }
  if (o.pass) {
    o.detail = fmt::format("orthogonal max |VIF-1| {:.2g}; duplicate drops x4; 50 designs match ({} drops)", worst, drops);
  }
  return o;
}

Outcome level_recovery() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::normal_distribution<double> normal;
  double worst = 0;
  for (int c = 0; c < 25; ++c) {
    const int n = 20 + static_cast<int>(rng() % 60);
    const int k = 1 + static_cast<int>(rng() % 5);
    DesignMatrix predictors = named(Eigen::MatrixXd(n, k));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < k; ++j) predictors.values(i, j) = normal(rng) * 3 + 10;
    }
    Eigen::MatrixXd z(n, k);
    for (int j = 0; j < k; ++j) z.col(j) = z_transform(predictors.values.col(j));
    const double offset = std::uniform_real_distribution<double>(-300, 300)(rng);
    Eigen::VectorXd delta(k);
    for (int j = 0; j < k; ++j) delta(j) = std::uniform_real_distribution<double>(-50, 50)(rng);
    LevelData higher, lower;
    higher.name = "higher";
    lower.name = "lower";
    for (int i = 0; i < n; ++i) higher.items.push_back("c" + std::to_string(i));
    lower.items = higher.items;
    lower.response = Eigen::VectorXd(n);
    for (int i = 0; i < n; ++i) lower.response(i) = 400 + normal(rng) * 80;
    higher.response = lower.response + z * delta + Eigen::VectorXd::Constant(n, offset);

    const LevelDesign d = build_level_design(higher, lower, predictors);
    const FitResult fit = ols_fit(d.design, d.response);
    auto check = [&](const std::string &term, double want) {
      const double err = std::abs(fit.coefficient(term).beta - want);
      worst = std::max(worst, err);
      o.require(err <= 1e-6, fmt::format("case {}: {} = {} vs {}", c, term, fit.coefficient(term).beta, want));
    };
    check("Level", offset);
    for (int j = 0; j < k; ++j) check("Level×x" + std::to_string(j + 1), delta(j));
    check(std::string(kInterceptName), (higher.response.mean() + lower.response.mean()) / 2);
  }
  if (o.pass) o.detail = fmt::format("25 stacks; max error {:.2g}", worst);
  return o;
}

struct CorpusRuns {
  std::map<std::string, std::string> first, second, parallel;
  int codes[3] = {-1, -1, -1};
};

CorpusRuns &corpus_runs() {
  static CorpusRuns runs = [] {
    CorpusRuns r;
    testutil::TempDir a("accept_a"), b("accept_b"), c("accept_c");
    r.codes[0] = testutil::run_corpus(a.path(), 1);
    r.codes[1] = testutil::run_corpus(b.path(), 1);
    r.codes[2] = testutil::run_corpus(c.path(), 8);
    if (r.codes[0] == 0) r.first = testutil::read_tree(a.path() / "out");
    if (r.codes[1] == 0) r.second = testutil::read_tree(b.path() / "out");
    if (r.codes[2] == 0) r.parallel = testutil::read_tree(c.path() / "out");
    return r;
  }();
  return runs;
}

std::string first_difference(const std::map<std::string, std::string> &a,
                             const std::map<std::string, std::string> &b) {
  for (const auto &[path, content] : a) {
    auto it = b.find(path);
    if (it == b.end()) return path + " missing";
    if (it->second != content) return path + " differs";
  }
  for (const auto &[path, content] : b) {
    if (!a.contains(path)) return path + " extra";
  }
  return "";
}

Outcome determinism() {
  Outcome o;
  const CorpusRuns &runs = corpus_runs();
  o.require(runs.codes[0] == 0 && runs.codes[1] == 0 && runs.codes[2] == 0,
            fmt::format("pipeline exit codes {} {} {}", runs.codes[0], runs.codes[1], runs.codes[2]));
  if (!o.pass) return o;
  const std::string rerun = first_difference(runs.first, runs.second);
  o.require(rerun.empty(), "rerun: " + rerun);
  const std::string jobs = first_difference(runs.first, runs.parallel);
  o.require(jobs.empty(), "jobs 1 vs 8: " + jobs);
  if (o.pass) o.detail = fmt::format("{} files byte-identical across 2 reruns and jobs 1 vs 8", runs.first.size());
  return o;
}

std::vector<std::string> split_tabs(const std::string &line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

Outcome format_goldens() {
  Outcome o;
  const std::string fixture = testutil::slurp(testutil::data_path("fixtures/dao_trial.tsv"));
  const std::vector<std::string> reference = split_tabs(fixture.substr(0, fixture.find('\n')));
  const std::string produced = format_long_format({});
  const std::vector<std::string> header = split_tabs(produced.substr(0, produced.find('\n')));
  o.require(reference.size() == 21 && header == reference, "long-format header differs from the reference 21 columns");

  const CorpusRuns &runs = corpus_runs();
  o.require(runs.codes[0] == 0, "pipeline failed");
  if (o.pass) {
    const std::string &long_format = runs.first.at("metrics/long_format.tsv");
    o.require(split_tabs(long_format.substr(0, long_format.find('\n'))) == reference,
              "pipeline long-format header differs");
    const auto golden = testutil::data_path("golden");
    for (const char *table : testutil::kGoldenTables) {
      o.require(runs.first.at(table) == testutil::slurp(golden / table), std::string("golden mismatch: ") + table);
    }
    o.require(testutil::hash_manifest(runs.first) == testutil::slurp(golden / "corpus_seed1.sha256"),
              "golden hash manifest mismatch");
  }

  const ConditionTable base =
      parse_condition_file(testutil::slurp(testutil::data_path("fixtures/conditions.tsv")));
  o.require(validate_condition_file(base).empty(), "condition fixture rejected");
  const std::map<std::string, std::vector<std::string>> replacements = {
      {"DV_TRIAL_ID", {"-1.1", "x", ""}},      {"DV_AUD_ONSET", {"-1", "x", ""}},
      {"DV_AUD_OFFSET", {"-1", "x", ""}},      {"DV_TRIAL_START", {"-1", "x", ""}},
      {"DV_TRIAL_END", {"-1", "x", ""}},       {"participant_id", {"-1", "-1.1"}},
      {"self_report", {"-1.1", "x", ""}},      {"ROW_INDEX", {"0", "-3", "2.5", "x", ""}}};
  std::size_t mutations = 0, rejected = 0;
  auto try_mutation = [&](const ConditionTable &table, const std::string &what) {
    ++mutations;
    if (!validate_condition_file(table).empty()) {
      ++rejected;
    } else {
      o.require(false, "accepted mutation: " + what);
    }
  };
  for (std::size_t col = 0; col < base.header.size(); ++col) {
    auto it = replacements.find(base.header[col]);
    if (it == replacements.end()) continue;
    for (std::size_t r = 0; r < base.rows.size(); ++r) {
      for (const auto &value : it->second) {
        ConditionTable t = base;
        t.rows[r][col] = value;
        try_mutation(t, fmt::format("{} row {} = '{}'", base.header[col], r + 1, value));
      }
      if (base.header[col] == "ROW_INDEX") {
        ConditionTable t = base;
        t.rows[r][col] = base.rows[(r + 1) % base.rows.size()][col];
        try_mutation(t, fmt::format("ROW_INDEX row {} duplicated", r + 1));
      }
    }
    if (base.header[col].starts_with("DV_") || base.header[col] == "ROW_INDEX") {
      ConditionTable t = base;
      t.header[col] += "_RENAMED";
      try_mutation(t, "renamed " + base.header[col]);
    }
  }
  if (o.pass) o.detail = fmt::format("21 columns in order; goldens match; {}/{} condition-file mutations rejected", rejected, mutations);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"reference-trial-consistency", reference_trial_consistency},
      {"synthetic-end-to-end", synthetic_end_to_end},
      {"exclusion-thresholds", exclusion_thresholds},
      {"ols-engine", ols_engine},
      {"vif-pruning", vif_pruning},
      {"level-interaction-recovery", level_recovery},
      {"determinism", determinism},
      {"format-goldens", format_goldens},
  };
  int failures = 0;
  for (const auto &[name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception &e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failures += !outcome.pass;
    std::printf("%s %s: %s\n", outcome.pass ? "PASS" : "FAIL", name.c_str(), outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
