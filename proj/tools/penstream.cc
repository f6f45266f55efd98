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


// penstream: command-line driver for the handwriting metrics pipeline.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "penstream/errors.h"
#include "penstream/ingest.h"
#include "penstream/pipeline.h"
#include "penstream/synth.h"

namespace fs = std::filesystem;
using namespace penstream;

namespace {

struct Arguments {
  std::string config;
  std::string input;
  std::string out = ".";
  std::vector<std::string> segments;
  std::string lexical;
  std::string coding;
  double lpmm = 1;
  double sample_rate = 200;
  int jobs = 1;
  std::string units = "ms";
  std::string denominator = "all";
  double vif_threshold = 5;
  std::vector<std::string> models;
  std::vector<std::string> level_models;
  bool no_default_models = false;
  bool raw_covariates = false;
  bool keep_incorrect = false;
  bool keep_revised = false;
  bool no_plots = false;
  bool no_bundles = false;
  std::uint64_t seed = 1;
  int sessions = 3;
};

bool on_command_line(int argc, char **argv, std::string_view flag) {
  for (int i = 1; i < argc; ++i) {
    std::string_view arg = argv[i];
    if (arg == flag || (arg.starts_with(flag) && arg.size() > flag.size() && arg[flag.size()] == '=')) {
      return true;
    }
  }
  return false;
}

// Paths read from the config file are relative to the file's directory.
fs::path resolve(const std::string &value, const Arguments &args, bool from_cli) {
  fs::path p(value);
  if (value.empty() || p.is_absolute() || from_cli || args.config.empty()) return p;
  return fs::path(args.config).parent_path() / p;
}

PipelineConfig make_config(const Arguments &args, int argc, char **argv, CLI::App &app) {
  PipelineConfig c;
  c.input = resolve(args.input, args, on_command_line(argc, argv, "--input"));
  c.out = resolve(args.out, args, on_command_line(argc, argv, "--out"));
  const bool segments_cli = on_command_line(argc, argv, "--segments");
  for (const auto &s : args.segments) c.segments.push_back(resolve(s, args, segments_cli));
  c.lexical = resolve(args.lexical, args, on_command_line(argc, argv, "--lexical"));
  c.coding = resolve(args.coding, args, on_command_line(argc, argv, "--coding"));
  c.tablet.lpmm = args.lpmm;
  c.tablet.sample_rate_hz = args.sample_rate;
  c.jobs = args.jobs;
  c.units = args.units == "s" ? TimeUnit::kSeconds : TimeUnit::kMilliseconds;
  c.denominator = args.denominator == "retained" ? AmnesiaDenominator::kRetainedTrials
                                                 : AmnesiaDenominator::kAllCodedTrials;
  c.vif_threshold = args.vif_threshold;
  c.policy.drop_incorrect = !args.keep_incorrect;
  c.policy.drop_revised = !args.keep_revised;
  auto set = [&](const char *name, double &field) {
    if (auto *opt = app.get_option_no_throw(name); opt && opt->count() > 0) field = opt->as<double>();
  };
  set("--char-rt-max", c.policy.char_rt_max);
  set("--char-dur-min", c.policy.char_dur_min);
  set("--char-dur-max", c.policy.char_dur_max);
  set("--rad-rt-max", c.policy.rad_rt_max);
  set("--rad-dur-max", c.policy.rad_dur_max);
  set("--stroke-rt-max", c.policy.stroke_rt_max);
  set("--stroke-dur-max", c.policy.stroke_dur_max);
  if (args.no_default_models) {
    c.models.clear();
    c.level_models.clear();
  }
  for (const auto &m : args.models) c.models.push_back(parse_model_spec(m));
  for (const auto &m : args.level_models) c.level_models.push_back(parse_level_model_spec(m));
  c.model_options.zscore_covariates = !args.raw_covariates;
  c.plots = !args.no_plots;
  c.bundles = !args.no_bundles;
  return c;
}

int validate_conditions(const PipelineConfig &config) {
  if (config.input.empty()) throw ConfigError("--input names the condition file");
  const auto problems = validate_condition_file(parse_condition_file(read_file(config.input)));
  for (const auto &p : problems) fmt::print(stderr, "{}: {}\n", config.input.string(), p);
  if (!problems.empty()) return 1;
  fmt::print("{}: ok\n", config.input.string());
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Stroke, radical and character metrics from handwriting pen sample reports."};
  app.require_subcommand(1);
  app.fallthrough();
  Arguments args;
  app.set_config("--config", "", "INI or TOML configuration; command-line flags win");
  app.add_option("--input", args.input, "Report directory or file, or a previous stage's output");
  app.add_option("--out", args.out, "Output directory");
  app.add_option("--segments", args.segments, "Segments reports (files or directories)");
  app.add_option("--lexical", args.lexical, "Per-character lexical predictor table");
  app.add_option("--coding", args.coding, "Trial coding table");
  app.add_option("--lpmm", args.lpmm, "Tablet resolution in lines per millimetre");
  app.add_option("--sample-rate", args.sample_rate, "Tablet sampling rate in Hz");
  app.add_option("--jobs", args.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--units", args.units, "Time unit of the reports")->check(CLI::IsMember({"s", "ms"}));
  app.add_option("--char-rt-max", "Character latency ceiling, ms");
  app.add_option("--char-dur-min", "Character duration floor, ms");
  app.add_option("--char-dur-max", "Character duration ceiling, ms");
  app.add_option("--rad-rt-max", "Radical latency ceiling, ms");
  app.add_option("--rad-dur-max", "Radical duration ceiling, ms");
  app.add_option("--stroke-rt-max", "Stroke latency ceiling, ms");
  app.add_option("--stroke-dur-max", "Stroke duration ceiling, ms");
  app.add_flag("--keep-incorrect", args.keep_incorrect, "Keep trials coded incorrect");
  app.add_flag("--keep-revised", args.keep_revised, "Keep trials coded revised");
  app.add_option("--amnesia-denominator", args.denominator, "all or retained")
      ->check(CLI::IsMember({"all", "retained"}));
  app.add_option("--vif-threshold", args.vif_threshold, "Stepwise VIF pruning threshold");
  app.add_option("--model", args.models, "Item model name:response[:cov1,cov2]");
  app.add_option("--level-model", args.level_models, "Stacked model name:higher,lower[:hcov,lcov]");
  app.add_flag("--no-default-models", args.no_default_models, "Fit only the models given");
  app.add_flag("--raw-covariates", args.raw_covariates, "Enter covariates unstandardized");
  app.add_flag("--no-plots", args.no_plots, "Skip plot rendering in run");
  app.add_flag("--no-bundles", args.no_bundles, "Skip trial bundle export");
  app.add_option("--seed", args.seed, "Synthetic corpus seed");
  app.add_option("--sessions", args.sessions, "Synthetic corpus sessions");

  auto *run = app.add_subcommand("run", "Full pipeline: metrics, cleaning, statistics and plots");
  auto *metrics = app.add_subcommand("metrics", "Long-format metrics, trial codings and bundles");
  auto *clean = app.add_subcommand("clean", "Exclusions and item aggregation over metrics output");
  auto *stats = app.add_subcommand("stats", "Correlations, VIF pruning and models over items.tsv");
  auto *plot = app.add_subcommand("plot", "Character and per-stroke plots");
  auto *conditions = app.add_subcommand("validate-conditions", "Check an experiment condition file");
  auto *synth = app.add_subcommand("synth", "Write a synthetic corpus with a config to run it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (auto *opt = app.get_config_ptr(); opt != nullptr && opt->count() > 0) {
    args.config = opt->as<std::string>();
  }
  try {
    const PipelineConfig config = make_config(args, argc, argv, app);
    if (*run) run_pipeline(config, log_to_stderr);
    if (*metrics) run_metrics(config, log_to_stderr);
    if (*clean) run_clean(config, log_to_stderr);
    if (*stats) run_stats(config, log_to_stderr);
    if (*plot) run_plots(config, log_to_stderr);
    if (*conditions) return validate_conditions(config);
    if (*synth) {
      CorpusOptions options;
      options.seed = args.seed;
      options.sessions = args.sessions;
      if (app.get_option("--lpmm")->count() > 0) options.lpmm = args.lpmm;
      write_outputs(config.out, corpus_files(generate_corpus(options)));
      log_to_stderr(fmt::format("synthetic corpus written to {}", config.out.string()));
    }
  } catch (const ConfigError &e) {
    log_to_stderr(fmt::format("config error: {}", e.what()));
    return 2;
  } catch (const DataError &e) {
    log_to_stderr(fmt::format("data error: {}", e.what()));
    return 1;
  } catch (const fs::filesystem_error &e) {
    log_to_stderr(fmt::format("file error: {}", e.what()));
    return 2;
  }
  return 0;
}
