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

#ifndef PENSTREAM_ERRORS_H_
#define PENSTREAM_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace penstream {

// Problems with the data being processed. The CLI maps these to exit code 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problems with the run configuration. The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingColumn : public DataError {
 public:
  explicit MissingColumn(std::string name)
      : DataError("missing column " + name), name_(std::move(name)) {}
  const std::string &name() const { return name_; }

 private:
  std::string name_;
};

class MalformedRow : public DataError {
 public:
  MalformedRow(std::size_t line, const std::string &reason)
      : DataError("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyReport : public DataError {
 public:
  EmptyReport() : DataError("empty report") {}
};

class OverlappingSpans : public DataError {
 public:
  OverlappingSpans(const std::string &trial, const std::string &level)
      : DataError("overlapping " + level + " spans in trial " + trial) {}
};

class UnassignedStroke : public DataError {
 public:
  explicit UnassignedStroke(std::size_t stroke)
      : DataError("stroke " + std::to_string(stroke) +
                  " falls outside every radical span"),
        stroke_(stroke) {}
  std::size_t stroke() const { return stroke_; }

 private:
  std::size_t stroke_;
};

class EmptyTree : public DataError {
 public:
  EmptyTree() : DataError("trial has no pressed samples") {}
};

class NonPositiveInput : public DataError {
 public:
  using DataError::DataError;
};

class UnlabeledTrial : public DataError {
 public:
  explicit UnlabeledTrial(const std::string &trial)
      : DataError("no coding label for trial " + trial) {}
};

class MissingLexicalEntry : public DataError {
 public:
  explicit MissingLexicalEntry(const std::string &character)
      : DataError("no lexical entry for character " + character) {}
};

class ZeroVariance : public DataError {
 public:
  explicit ZeroVariance(const std::string &column)
      : DataError("zero variance in " + column) {}
};

class RankDeficient : public DataError {
 public:
  RankDeficient() : DataError("design matrix is rank deficient") {}
};

class InsufficientRows : public DataError {
 public:
  InsufficientRows(std::size_t rows, std::size_t cols)
      : DataError("need more rows than columns, got " + std::to_string(rows) +
                  " x " + std::to_string(cols)) {}
};

class MismatchedItems : public DataError {
 public:
  using DataError::DataError;
};

class InvalidSpec : public DataError {
 public:
  using DataError::DataError;
};

class NonSquare : public DataError {
 public:
  NonSquare() : DataError("matrix is not square") {}
};

}  // namespace penstream

#endif  // PENSTREAM_ERRORS_H_
