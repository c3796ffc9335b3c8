// Copyright 2026 The sbmlab Authors
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

namespace sbm {

// Process exit codes shared by the command-line tool and the recipes.
enum class ExitCode : int {
  ok = 0,
  verification_failure = 1,
  config_error = 2,
  resource_abort = 3,
  invariant_violation = 4,
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message, int line = 0);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

// Population cap, sizing caps and similar resource refusals.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A bound that holds exactly for the continuum problem failed numerically.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Outer radius too small for the certified tail bound.
class DomainTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sbm
