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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sbmlab {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned jobs = 0;
  std::string out = ".";
  bool fast = false;
  std::optional<double> tolerance;
};

// Each command returns a process exit code; errors propagate as exceptions
// and are mapped to exit codes in main.
int cmd_simulate(const CommonOptions& o);
int cmd_solve(const CommonOptions& o);
int cmd_verify(const std::string& theorem, const CommonOptions& o);
int cmd_moments(const CommonOptions& o);
int cmd_report(const std::vector<std::string>& inputs, const std::string& predictions, const CommonOptions& o);

}  // namespace sbmlab
