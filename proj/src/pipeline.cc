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


#include "penstream/pipeline.h"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "penstream/errors.h"
#include "penstream/segmentation.h"
#include "penstream/trial_bundle.h"

namespace fs = std::filesystem;

namespace penstream {
namespace {

bool is_table_file(const fs::path &p) {
  const auto ext = p.extension().string();
  return ext == ".tsv" || ext == ".txt" || ext == ".csv";
}

bool is_jsonl(const fs::path &p) { return p.extension() == ".jsonl"; }

std::vector<fs::path> files_in(const fs::path &dir, bool (*accept)(const fs::path &)) {
  std::vector<fs::path> out;
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && accept(entry.path())) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_segment_file(const fs::path &p) { return is_table_file(p) || is_jsonl(p); }

[[noreturn]] void rethrow_with_context(const std::string &where, const DataError &e) {
  throw DataError(where + ": " + e.what());
}

SegmentsReport load_segments(const PipelineConfig &config) {
  SegmentsReport report;
  IngestOptions options;
  options.units = config.units;
  for (const fs::path &p : config.segments) {
    const auto files = fs::is_directory(p) ? files_in(p, is_segment_file) : std::vector<fs::path>{p};
    for (const fs::path &file : files) {
      try {
        const std::string text = read_file(file);
        report.merge(is_jsonl(file) ? read_annotations(text) : parse_segments_report(text, options));
      } catch (const DataError &e) {
        rethrow_with_context(file.string(), e);
      }
    }
  }
  return report;
}

struct ParsedReport {
  std::vector<TrialRecord> trials;
  SegmentsReport labels;
};

std::string first_line(std::string_view text) {
  return std::string(text.substr(0, text.find('\n')));
}

std::string unique_stem(const TrialRecord &trial, std::set<std::string> &seen) {
  std::string stem = plot_file_stem(trial);
  if (!seen.insert(stem).second) {
    stem += fmt::format("_t{}", trial.trial_id);
    seen.insert(stem);
  }
  return stem;
}

std::string join(const std::vector<std::string> &parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

fs::path resolve_in(const fs::path &input, std::string_view name) {
  return fs::is_directory(input) ? input / name : input;
}

}  // namespace

void validate_config(const PipelineConfig &config) {
  if (!(config.tablet.lpmm > 0)) throw ConfigError("lpmm must be positive");
  if (config.jobs < 1) throw ConfigError("jobs must be at least 1");
  if (!(config.vif_threshold > 1)) throw ConfigError("VIF threshold must exceed 1");
  validate_policy(config.policy);
  validate_plot_spec(config.plot);
  if (!config.input.empty() && !fs::exists(config.input)) {
    throw ConfigError("input " + config.input.string() + " does not exist");
  }
  for (const auto &p : config.segments) {
    if (!fs::exists(p)) throw ConfigError("segments " + p.string() + " does not exist");
  }
  if (!config.lexical.empty() && !fs::exists(config.lexical)) {
    throw ConfigError("lexical table " + config.lexical.string() + " does not exist");
  }
  if (!config.coding.empty() && !fs::exists(config.coding)) {
    throw ConfigError("coding file " + config.coding.string() + " does not exist");
  }
}

void log_to_stderr(std::string_view message) { fmt::print(stderr, "penstream: {}\n", message); }

std::string read_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomic(const fs::path &path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ConfigError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_outputs(const fs::path &dir, const OutputFiles &files) {
  for (const auto &[name, content] : files) write_file_atomic(dir / name, content);
}

std::vector<fs::path> find_reports(const fs::path &input) {
  if (input.empty()) throw ConfigError("no input given");
  if (!fs::exists(input)) throw ConfigError("input " + input.string() + " does not exist");
  const auto reports = fs::is_directory(input) ? files_in(input, is_table_file)
                                               : std::vector<fs::path>{input};
  if (reports.empty()) throw DataError("no reports found in " + input.string());
  return reports;
}

std::vector<Session> process_sessions(const PipelineConfig &config, const Logger &log) {
  const auto reports = find_reports(config.input);
  const SegmentsReport external = load_segments(config);
  IngestOptions options;
  options.units = config.units;

  const auto parsed = parallel_map(reports.size(), config.jobs, [&](std::size_t i) {
    ParsedReport out;
    try {
      const std::string text = read_file(reports[i]);
      out.trials = parse_pen_sample_report(text, options);
      if (first_line(text).find(column::kSegmentLevel) != std::string::npos) {
        out.labels = segments_from_sample_labels(text, options);
      }
    } catch (const DataError &e) {
      rethrow_with_context(reports[i].string(), e);
    }
    return out;
  });

  std::map<TrialKey, std::size_t> owner;
  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t r = 0; r < parsed.size(); ++r) {
    for (std::size_t t = 0; t < parsed[r].trials.size(); ++t) {
      const TrialKey key = parsed[r].trials[t].key();
      auto [it, fresh] = owner.emplace(key, r);
      if (!fresh) {
        throw DataError(fmt::format("trial {} appears in both {} and {}", key.str(),
                                    reports[it->second].string(), reports[r].string()));
      }
      tasks.emplace_back(r, t);
    }
  }

  auto processed = parallel_map(tasks.size(), config.jobs, [&](std::size_t i) {
    const auto [r, t] = tasks[i];
    ProcessedTrial out;
    out.trial = parsed[r].trials[t];
    const TrialKey key = out.trial.key();
    const std::string where = fmt::format("{}: trial {}", reports[r].string(), key.str());
    try {
      const auto problems = validate_trial(out.trial);
      if (!problems.empty()) throw DataError(join(problems, "; "));
      const auto spans = external.trials.count(key) ? external.radicals(key)
                                                    : parsed[r].labels.radicals(key);
      out.tree = build_segment_tree(out.trial, detect_strokes(out.trial), spans);
      const auto tree_problems = validate_tree(out.trial, out.tree);
      if (!tree_problems.empty()) throw DataError(join(tree_problems, "; "));
      if (!out.tree.empty()) out.rows = compute_metrics(out.trial, out.tree, config.tablet);
    } catch (const DataError &e) {
      rethrow_with_context(where, e);
    }
    return out;
  });

  std::vector<Session> sessions(reports.size());
  for (std::size_t r = 0; r < reports.size(); ++r) sessions[r].name = reports[r].stem().string();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    sessions[tasks[i].first].trials.push_back(std::move(processed[i]));
  }
  for (const Session &s : sessions) {
    std::size_t strokes = 0, empty = 0;
    for (const auto &t : s.trials) {
      strokes += t.rows.size();
      empty += t.tree.empty() ? 1 : 0;
    }
    log(fmt::format("{}: {} trials, {} strokes, {} without pen-down samples", s.name,
                    s.trials.size(), strokes, empty));
  }
  return sessions;
}

std::vector<TrialCoding> default_codings(const std::vector<Session> &sessions) {
  std::vector<TrialCoding> codings;
  for (const Session &s : sessions) {
    for (const ProcessedTrial &t : s.trials) {
      TrialCoding c;
      c.key = t.trial.key();
      c.row_index = t.trial.row_index;
      c.target = t.trial.target;
      c.self_report = t.trial.self_report;
      c.coding = t.trial.revised ? Coding::kRevised : Coding::kCorrect;
      c.responded = !t.tree.empty();
      codings.push_back(std::move(c));
    }
  }
  return codings;
}

std::vector<MetricRow> all_rows(const std::vector<Session> &sessions) {
  std::vector<MetricRow> rows;
  for (const Session &s : sessions) {
    for (const ProcessedTrial &t : s.trials) rows.insert(rows.end(), t.rows.begin(), t.rows.end());
  }
  return rows;
}

OutputFiles metric_outputs(const std::vector<Session> &sessions, const PipelineConfig &config) {
  OutputFiles files;
  for (const Session &s : sessions) {
    std::vector<MetricRow> rows;
    std::vector<TrialRecord> trials;
    std::vector<SegmentTree> trees;
    for (const ProcessedTrial &t : s.trials) {
      rows.insert(rows.end(), t.rows.begin(), t.rows.end());
      trials.push_back(t.trial);
      trees.push_back(t.tree);
    }
    files["metrics/" + s.name + ".tsv"] = format_long_format(rows);
    if (config.bundles) {
      files["bundles/" + s.name + ".trials.jsonl"] = export_bundles(trials, trees, config.tablet);
    }
  }
  files["metrics/long_format.tsv"] = format_long_format(all_rows(sessions));
  return files;
}

OutputFiles plot_outputs(const std::vector<Session> &sessions, const PipelineConfig &config) {
  std::vector<const ProcessedTrial *> trials;
  for (const Session &s : sessions) {
    for (const ProcessedTrial &t : s.trials) {
      if (!t.tree.empty()) trials.push_back(&t);
    }
  }
  std::set<std::string> seen;
  std::vector<std::string> stems;
  for (const ProcessedTrial *t : trials) stems.push_back(unique_stem(t->trial, seen));

  const auto rendered = parallel_map(trials.size(), config.jobs, [&](std::size_t i) {
    const ProcessedTrial &t = *trials[i];
    return std::make_pair(render_character(t.trial, t.tree, config.plot),
                          render_stroke_panels(t.trial, t.tree, t.rows, config.plot));
  });
  OutputFiles files;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    files["plots/char/" + stems[i] + ".svg"] = rendered[i].first;
    files["plots/by-stroke/" + stems[i] + ".svg"] = rendered[i].second;
  }
  return files;
}

CleanResult clean_outputs(const std::vector<MetricRow> &rows,
                          const std::vector<TrialCoding> &codings,
                          const PipelineConfig &config, const Logger &log) {
  CleanResult result;
  std::tie(result.retained, result.stats) = apply_exclusions(rows, codings, config.policy);
  result.files["trials.tsv"] = format_trial_codings(codings);
  result.files["exclusion_stats.tsv"] = format_exclusion_stats(result.stats);
  log(fmt::format("{} trials coded, {} incorrect and {} revised removed", result.stats.trials,
                  result.stats.incorrect_removed, result.stats.revised_removed));
  for (const MeasureExclusion &m : result.stats.measures) {
    log(fmt::format("{} {}: {} of {} removed", m.level, m.measure, m.removed, m.observed));
  }
  if (!config.lexical.empty()) {
    try {
      const LexicalTable lexical = parse_lexical_table(read_file(config.lexical));
      result.items = aggregate_items(result.retained, codings, lexical, config.denominator);
    } catch (const DataError &e) {
      rethrow_with_context(config.lexical.string(), e);
    }
    result.files["items.tsv"] = format_item_table(*result.items);
  } else {
    log("no lexical table configured; skipping item aggregation");
  }
  return result;
}

OutputFiles stats_outputs(const ItemTable &items, const PipelineConfig &config, const Logger &log) {
  OutputFiles files;
  const auto n = static_cast<Eigen::Index>(items.rows.size());

  // Predictors that vary across items.
  std::vector<std::string> usable;
  DesignMatrix predictors;
  for (std::string_view name : kLexicalPredictors) {
    Eigen::VectorXd column(n);
    for (Eigen::Index i = 0; i < n; ++i) column(i) = *items.value(items.rows[static_cast<std::size_t>(i)], name);
    if (n > 1 && (column.array() != column(0)).any()) {
      usable.emplace_back(name);
      predictors.names.push_back(display_name(name));
      predictors.values.conservativeResize(n, predictors.values.cols() + 1);
      predictors.values.col(predictors.values.cols() - 1) = column;
    } else {
      log(fmt::format("predictor {} is constant across items; left out", name));
    }
  }
  if (usable.empty()) throw DataError("no predictor varies across items");

  const CorrelationMatrix correlations = pearson_matrix(predictors.names, predictors.values);
  files["correlations.tsv"] = format_correlations(correlations);
  files["correlations.svg"] = render_correlation_heatmap(correlations, config.plot);

  const VifSelection selection = vif_stepwise(predictors, config.vif_threshold);
  files["vif_log.tsv"] = format_vif_log(selection);
  std::vector<std::string> retained;
  for (std::size_t j = 0; j < usable.size(); ++j) {
    if (std::find(selection.retained.begin(), selection.retained.end(), predictors.names[j]) !=
        selection.retained.end()) {
      retained.push_back(usable[j]);
    }
  }
  log(fmt::format("{} of {} predictors retained at VIF threshold {}", retained.size(),
                  usable.size(), format_double(config.vif_threshold)));

  std::vector<std::vector<std::string>> index;
  auto run = [&](const std::string &name, std::string_view kind, auto &&fit) {
    try {
      const ModelResult result = fit();
      files["models/" + name + ".tsv"] = format_model_table(result);
      index.push_back({name, std::string(kind), std::to_string(result.n), "ok"});
    } catch (const DataError &e) {
      log(fmt::format("model {} skipped: {}", name, e.what()));
      index.push_back({name, std::string(kind), "NA", e.what()});
    }
  };
  for (const ModelSpec &spec : config.models) {
    run(spec.name, "item", [&] { return fit_item_model(items, spec, retained, config.model_options); });
  }
  for (const LevelModelSpec &spec : config.level_models) {
    run(spec.name, "level",
        [&] { return fit_level_model(items, spec, retained, config.model_options); });
  }
  files["models/index.tsv"] = write_table({"model", "kind", "n", "status"}, index, '\t');
  return files;
}

void run_metrics(const PipelineConfig &config, const Logger &log) {
  validate_config(config);
  const auto sessions = process_sessions(config, log);
  OutputFiles files = metric_outputs(sessions, config);
  files["trials.tsv"] = format_trial_codings(default_codings(sessions));
  write_outputs(config.out, files);
}

void run_plots(const PipelineConfig &config, const Logger &log) {
  validate_config(config);
  write_outputs(config.out, plot_outputs(process_sessions(config, log), config));
}

void run_clean(const PipelineConfig &config, const Logger &log) {
  validate_config(config);
  const fs::path long_format = fs::is_directory(config.input)
                                   ? config.input / "metrics" / "long_format.tsv"
                                   : config.input;
  std::vector<MetricRow> rows;
  try {
    rows = parse_long_format(read_file(long_format));
  } catch (const DataError &e) {
    rethrow_with_context(long_format.string(), e);
  }
  const fs::path coding = !config.coding.empty() ? config.coding
                          : long_format.parent_path().filename() == "metrics"
                              ? long_format.parent_path().parent_path() / "trials.tsv"
                              : long_format.parent_path() / "trials.tsv";
  std::vector<TrialCoding> codings;
  try {
    codings = parse_trial_codings(read_file(coding));
  } catch (const DataError &e) {
    rethrow_with_context(coding.string(), e);
  }
  write_outputs(config.out, clean_outputs(rows, codings, config, log).files);
}

void run_stats(const PipelineConfig &config, const Logger &log) {
  validate_config(config);
  const fs::path path = resolve_in(config.input, "items.tsv");
  ItemTable items;
  try {
    items = parse_item_table(read_file(path));
  } catch (const DataError &e) {
    rethrow_with_context(path.string(), e);
  }
  write_outputs(config.out, stats_outputs(items, config, log));
}

void run_pipeline(const PipelineConfig &config, const Logger &log) {
  validate_config(config);
  const auto sessions = process_sessions(config, log);
  OutputFiles files = metric_outputs(sessions, config);
  if (config.plots) files.merge(plot_outputs(sessions, config));

  std::vector<TrialCoding> codings;
  if (!config.coding.empty()) {
    try {
      codings = parse_trial_codings(read_file(config.coding));
    } catch (const DataError &e) {
      rethrow_with_context(config.coding.string(), e);
    }
  } else {
    codings = default_codings(sessions);
  }
  CleanResult cleaned = clean_outputs(all_rows(sessions), codings, config, log);
  files.merge(cleaned.files);
  if (cleaned.items) files.merge(stats_outputs(*cleaned.items, config, log));
  write_outputs(config.out, files);
  log(fmt::format("wrote {} files to {}", files.size(), config.out.string()));
}

}  // namespace penstream
