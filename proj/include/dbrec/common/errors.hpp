// Copyright 2026 The DBRec Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace dbrec {

// Root of every error thrown by the engine. Each subclass corresponds to one
// failure category so callers (and the CLI exit path) can react differently.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or mismatched shapes supplied by the caller.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// NaN / Inf encountered in values or gradients.
class NumericError : public Error {
 public:
  using Error::Error;
};

// API misuse, e.g. backward() before forward().
class UsageError : public Error {
 public:
  using Error::Error;
};

// Broken internal state that should be unreachable through the public API.
class InternalError : public Error {
 public:
  using Error::Error;
};

// Malformed input file. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  explicit ParseError(const std::string& what) : Error(what), line_(0) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Container file failed its checksum, magic or version checks.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// Negative or candidate sampling cannot satisfy its request.
class SamplingError : public Error {
 public:
  using Error::Error;
};

// Evaluation protocol violation (duplicate candidates, missing test item).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// The finite-difference oracle itself is unusable (non-deterministic loss).
class OracleError : public Error {
 public:
  using Error::Error;
};

// A command needs an artifact that has not been produced yet.
class MissingArtifactError : public Error {
 public:
  using Error::Error;
};

}  // namespace dbrec
