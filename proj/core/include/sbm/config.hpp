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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sbm/harness.hpp"
#include "sbm/limits.hpp"
#include "sbm/pde.hpp"

namespace sbm {

// Flat key-value text with [section] headers:
//
//   # comment
//   [sim]
//   N = 200
//   seed = 42
//
// Keys are unique within a section. Values keep their text verbatim (trimmed);
// typed getters report the line of the offending entry.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::string& path);

  // Later values replace earlier ones; used for command-line overrides.
  void set(const std::string& section, const std::string& key, const std::string& value);
  void erase(const std::string& section, const std::string& key);
  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key) const;
  std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  // Comma-separated list.
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  const std::vector<double>& fallback) const;

  // Rejects keys outside `known` for a section, naming the first one.
  void require_known(const std::string& section, const std::vector<std::string>& known) const;
  void require_sections(const std::vector<std::string>& known) const;

  // Sorted sections and keys, one "key = value" per line. Parsing the canonical
  // form gives back the same canonical form.
  std::string canonical() const;
  // FNV-1a of the canonical form without [sim] seed, as 16 hex digits. Runs that
  // differ only in seed share a digest and may be pooled.
  std::string digest() const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  const Entry& entry(const std::string& section, const std::string& key) const;
  const Entry* find(const std::string& section, const std::string& key) const;
  std::map<std::string, std::map<std::string, Entry>> data_;
};

std::uint64_t fnv1a(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t v);

// Section [plan] plus [sim]. The seed must be present in [sim].
ExperimentPlan plan_from_config(const Config& c);
// Section [pde]; kind selects what cmd_solve computes.
enum class SolveKind { profile, kappa, a2, d1 };
struct SolveRequest {
  SolveKind kind = SolveKind::profile;
  PdeConfig pde;
  LimitOptions limit;
  double r = 1.0;
};
SolveRequest solve_from_config(const Config& c);

}  // namespace sbm
