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


// Batch driver: reports in, metric tables, exclusion summaries, item tables,
// model tables, plots and bundles out.

#ifndef PENSTREAM_PIPELINE_H_
#define PENSTREAM_PIPELINE_H_

#include <atomic>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "penstream/cleaning.h"
#include "penstream/ingest.h"
#include "penstream/metrics.h"
#include "penstream/pen_model.h"
#include "penstream/stats.h"
#include "penstream/viz.h"

namespace penstream {

struct PipelineConfig {
  std::filesystem::path input;
  std::vector<std::filesystem::path> segments;  // files or directories
  std::filesystem::path lexical;                // optional
  std::filesystem::path coding;                 // optional
  std::filesystem::path out = ".";
  TabletSpec tablet;
  TimeUnit units = TimeUnit::kMilliseconds;
  ExclusionPolicy policy;
  AmnesiaDenominator denominator = AmnesiaDenominator::kAllCodedTrials;
  double vif_threshold = 5;
  std::vector<ModelSpec> models = default_models();
  std::vector<LevelModelSpec> level_models = default_level_models();
  ModelOptions model_options;
  PlotSpec plot;
  bool plots = true;
  bool bundles = true;
  int jobs = 1;
};

// Throws ConfigError.
void validate_config(const PipelineConfig &config);

using Logger = std::function<void(std::string_view)>;
void log_to_stderr(std::string_view message);

// Relative output path -> content. Every stage returns its outputs this way;
// write_outputs is the only place files are written.
using OutputFiles = std::map<std::string, std::string>;

// Writes each file through a temporary sibling and a rename.
void write_file_atomic(const std::filesystem::path &path, std::string_view content);
void write_outputs(const std::filesystem::path &dir, const OutputFiles &files);

std::string read_file(const std::filesystem::path &path);

// Report files (.tsv, .txt, .csv) in a directory, sorted by name, or the file
// itself. Throws DataError "no reports found".
std::vector<std::filesystem::path> find_reports(const std::filesystem::path &input);

struct ProcessedTrial {
  TrialRecord trial;
  SegmentTree tree;
  std::vector<MetricRow> rows;  // empty when nothing was written
};

struct Session {
  std::string name;  // report file stem
  std::vector<ProcessedTrial> trials;
};

// Parses, segments and measures every report. Results are ordered by report
// name and trial key whatever `config.jobs` is.
std::vector<Session> process_sessions(const PipelineConfig &config, const Logger &log);

// Revised trials are coded revised, everything else correct.
std::vector<TrialCoding> default_codings(const std::vector<Session> &sessions);

std::vector<MetricRow> all_rows(const std::vector<Session> &sessions);

// metrics/<session>.tsv, metrics/long_format.tsv and bundles/.
OutputFiles metric_outputs(const std::vector<Session> &sessions, const PipelineConfig &config);
// plots/char/ and plots/by-stroke/.
OutputFiles plot_outputs(const std::vector<Session> &sessions, const PipelineConfig &config);

struct CleanResult {
  RetainedData retained;
  ExclusionStats stats;
  std::optional<ItemTable> items;  // when a lexical table is configured
  OutputFiles files;               // trials.tsv, exclusion_stats.tsv, items.tsv
};
CleanResult clean_outputs(const std::vector<MetricRow> &rows,
                          const std::vector<TrialCoding> &codings,
                          const PipelineConfig &config, const Logger &log);

// correlations.tsv/.svg, vif_log.tsv and models/.
OutputFiles stats_outputs(const ItemTable &items, const PipelineConfig &config, const Logger &log);

// Subcommand drivers. Each reads its inputs from `config`, writes under
// `config.out` and throws DataError or ConfigError.
void run_metrics(const PipelineConfig &config, const Logger &log);
void run_plots(const PipelineConfig &config, const Logger &log);
void run_clean(const PipelineConfig &config, const Logger &log);
void run_stats(const PipelineConfig &config, const Logger &log);
void run_pipeline(const PipelineConfig &config, const Logger &log);

// Applies f to 0..n-1 on up to `jobs` threads; results keep index order and
// the exception of the lowest failing index is rethrown.
template <typename F>
auto parallel_map(std::size_t n, int jobs, F &&f) -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<R> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace penstream

#endif  // PENSTREAM_PIPELINE_H_
