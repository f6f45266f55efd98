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


// Helpers for tests that drive the penstream executable.

#ifndef PENSTREAM_TESTS_CLI_UTIL_H_
#define PENSTREAM_TESTS_CLI_UTIL_H_

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>

#include <openssl/evp.h>

#include "test_util.h"

namespace testutil {

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the CLI with `args` (already shell-quoted), capturing both streams.
inline CommandResult run_cli(const std::string &args, const std::filesystem::path &scratch) {
  const auto out = scratch / "cli.stdout";
  const auto err = scratch / "cli.stderr";
  const std::string command = std::string("'") + PENSTREAM_CLI_PATH + "' " + args + " > '" +
                              out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(command.c_str());
  CommandResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out);
  result.err = slurp(err);
  return result;
}

inline std::string quote(const std::filesystem::path &p) { return "'" + p.string() + "'"; }

inline std::string sha256_hex(const std::string &data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
  static const char *kHex = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 15];
  }
  return hex;
}

// Relative path -> file content for every regular file below `root`.
inline std::map<std::string, std::string> read_tree(const std::filesystem::path &root) {
  std::map<std::string, std::string> files;
  for (const auto &entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    files[std::filesystem::relative(entry.path(), root).generic_string()] = slurp(entry.path());
  }
  return files;
}

// "<sha256>  <path>" lines, sorted by path.
inline std::string hash_manifest(const std::map<std::string, std::string> &files) {
  std::string out;
  for (const auto &[path, content] : files) out += sha256_hex(content) + "  " + path + "\n";
  return out;
}

inline bool update_goldens() {
  const char *flag = std::getenv("PENSTREAM_UPDATE_GOLDENS");
  return flag != nullptr && std::string(flag) == "1";
}

// Writes a synthetic corpus with the CLI and runs the full pipeline over it.
// Returns the pipeline's exit code.
inline int run_corpus(const std::filesystem::path &dir, int jobs, std::uint64_t seed = 1,
                      int sessions = 3) {
  const auto corpus = dir / "corpus";
  const auto out = dir / "out";
  const auto synth = run_cli("synth --seed " + std::to_string(seed) + " --sessions " +
                                 std::to_string(sessions) + " --out " + quote(corpus),
                             dir);
  if (synth.exit_code != 0) return synth.exit_code;
  return run_cli("run --config " + quote(corpus / "penstream.ini") + " --jobs " +
                     std::to_string(jobs) + " --out " + quote(out),
                 dir)
      .exit_code;
}

// Tables kept verbatim next to the hash manifest.
inline const char *const kGoldenTables[] = {"metrics/long_format.tsv", "trials.tsv",
                                            "exclusion_stats.tsv",     "items.tsv",
                                            "correlations.tsv",        "vif_log.tsv",
                                            "models/index.tsv"};

}  // namespace testutil

#endif  // PENSTREAM_TESTS_CLI_UTIL_H_
