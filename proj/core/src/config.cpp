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

#include "sbm/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sbm/errors.hpp"

namespace sbm {

namespace {

std::string trim(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.' || ch == '-';
  });
}

std::string field_name(const std::string& section, const std::string& key) { return section + "." + key; }

template <class T>
bool parse_number(const std::string& s, T& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<size_t>(i)] = digits[v & 0xF];
  return s;
}

Config Config::parse(std::string_view text) {
  Config c;
  std::string section;
  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("section", "unterminated section header", line_no);
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!valid_name(section)) throw ConfigError("section", "invalid section name '" + section + "'", line_no);
      c.data_[section];
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("syntax", "expected 'key = value'", line_no);
    if (section.empty()) throw ConfigError("syntax", "key outside any section", line_no);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!valid_name(key)) throw ConfigError("syntax", "invalid key '" + key + "'", line_no);
    if (value.empty()) throw ConfigError(field_name(section, key), "empty value", line_no);
    auto& sec = c.data_[section];
    if (sec.count(key)) throw ConfigError(field_name(section, key), "duplicate key", line_no);
    sec[key] = Entry{value, line_no};
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  if (!valid_name(section) || !valid_name(key)) throw ConfigError(field_name(section, key), "invalid name");
  data_[section][key] = Entry{trim(value), 0};
}

void Config::erase(const std::string& section, const std::string& key) {
  auto it = data_.find(section);
  if (it != data_.end()) it->second.erase(key);
}

const Config::Entry* Config::find(const std::string& section, const std::string& key) const {
  auto it = data_.find(section);
  if (it == data_.end()) return nullptr;
  auto jt = it->second.find(key);
  return jt == it->second.end() ? nullptr : &jt->second;
}

bool Config::has(const std::string& section, const std::string& key) const { return find(section, key) != nullptr; }
bool Config::has_section(const std::string& section) const { return data_.count(section) > 0; }

const Config::Entry& Config::entry(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError(field_name(section, key), "required field missing");
  return *e;
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
  return entry(section, key).value;
}

std::string Config::get_string(const std::string& section, const std::string& key, const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  const Entry& e = entry(section, key);
  double v = 0.0;
  if (e.value == "inf") return std::numeric_limits<double>::infinity();
  if (!parse_number(e.value, v)) throw ConfigError(field_name(section, key), "not a number: '" + e.value + "'", e.line);
  return v;
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

std::int64_t Config::get_int(const std::string& section, const std::string& key) const {
  const Entry& e = entry(section, key);
  std::int64_t v = 0;
  if (!parse_number(e.value, v)) throw ConfigError(field_name(section, key), "not an integer: '" + e.value + "'", e.line);
  return v;
}

std::int64_t Config::get_int(const std::string& section, const std::string& key, std::int64_t fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key) const {
  const Entry& e = entry(section, key);
  std::uint64_t v = 0;
  if (!parse_number(e.value, v))
    throw ConfigError(field_name(section, key), "not an unsigned integer: '" + e.value + "'", e.line);
  return v;
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const {
  return has(section, key) ? get_u64(section, key) : fallback;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
  if (e->value == "false" || e->value == "0" || e->value == "no") return false;
  throw ConfigError(field_name(section, key), "not a boolean: '" + e->value + "'", e->line);
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const {
  const Entry* e = find(section, key);
  if (!e) return fallback;
  std::vector<double> out;
  for (const auto& item : split(e->value, ',')) {
    double v = 0.0;
    if (!parse_number(item, v)) throw ConfigError(field_name(section, key), "not a number: '" + item + "'", e->line);
    out.push_back(v);
  }
  return out;
}

void Config::require_known(const std::string& section, const std::vector<std::string>& known) const {
  auto it = data_.find(section);
  if (it == data_.end()) return;
  for (const auto& [key, e] : it->second)
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError(field_name(section, key), "unknown key", e.line);
}

void Config::require_sections(const std::vector<std::string>& known) const {
  for (const auto& [name, keys] : data_) {
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      int line = 0;
      for (const auto& [k, e] : keys) line = line == 0 ? e.line : std::min(line, e.line);
      throw ConfigError(name, "unknown section", line);
    }
  }
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [name, keys] : data_) {
    if (keys.empty()) continue;
    out += "[" + name + "]\n";
    for (const auto& [k, e] : keys) out += k + " = " + e.value + "\n";
  }
  return out;
}

std::string Config::digest() const {
  Config copy = *this;
  copy.erase("sim", "seed");
  return hex64(fnv1a(copy.canonical()));
}

ExperimentPlan plan_from_config(const Config& c) {
  c.require_known("plan", {"d", "targets", "replicas", "confidence", "mode", "x", "m", "epsilon", "prune_delta",
                           "search_all", "engine"});
  c.require_known("sim", {"N", "seed", "stream_id", "population_cap"});
  ExperimentPlan p;
  p.seed = c.get_u64("sim", "seed");
  p.d = static_cast<int>(c.get_int("plan", "d"));
  const std::string targets = c.get_string("plan", "targets");
  for (const auto& item : split(targets, ',')) {
    const size_t colon = item.find(':');
    Target tg;
    if (colon == std::string::npos || !parse_number(trim(item.substr(0, colon)), tg.t) ||
        !parse_number(trim(item.substr(colon + 1)), tg.r))
      throw ConfigError("plan.targets", "expected 't:r' pairs, got '" + item + "'");
    p.targets.push_back(tg);
  }
  p.replicas = c.get_u64("plan", "replicas");
  p.confidence = c.get_double("plan", "confidence", p.confidence);
  p.mode = start_mode_from_string(c.get_string("plan", "mode", "poisson_start"));
  if (p.mode == StartMode::point_mass) {
    p.x = c.get_doubles("plan", "x", std::vector<double>(static_cast<size_t>(std::max(p.d, 1)), 0.0));
    p.m = c.get_double("plan", "m", 1.0);
  }
  p.epsilon = c.get_double("plan", "epsilon", p.epsilon);
  p.prune_delta = c.get_double("plan", "prune_delta", p.prune_delta);
  p.search_all = c.get_bool("plan", "search_all", false);
  const std::string engine = c.get_string("plan", "engine", "genealogy");
  if (engine == "genealogy") p.engine = Engine::genealogy;
  else if (engine == "event_driven") p.engine = Engine::event_driven;
  else throw ConfigError("plan.engine", "unknown engine '" + engine + "'");
  p.N = c.get_u64("sim", "N");
  p.stream_id = c.get_u64("sim", "stream_id", 0);
  p.population_cap = c.get_u64("sim", "population_cap", p.population_cap);
  p.validate();
  return p;
}

SolveRequest solve_from_config(const Config& c) {
  c.require_known("pde", {"kind", "d", "r", "t_final", "h", "t0", "mode", "theta", "theta_ramp", "tolerance",
                          "tail_budget", "adaptive", "fixed_ratio", "Rmax", "M", "output_times", "q", "t_start",
                          "t_max", "limit_tolerance", "burn_in", "refine", "theta_check", "thetas", "extrapolate"});
  SolveRequest req;
  const std::string kind = c.get_string("pde", "kind", "profile");
  if (kind == "profile") req.kind = SolveKind::profile;
  else if (kind == "kappa") req.kind = SolveKind::kappa;
  else if (kind == "a2") req.kind = SolveKind::a2;
  else if (kind == "d1") req.kind = SolveKind::d1;
  else throw ConfigError("pde.kind", "expected profile, kappa, a2 or d1, got '" + kind + "'");

  const int d = static_cast<int>(c.get_int("pde", "d"));
  req.r = c.get_double("pde", "r", 1.0);
  if (!(req.r > 0.0)) throw ConfigError("pde.r", "must be > 0");
  if (req.kind == SolveKind::kappa && d < 3) throw ConfigError("pde.d", "kappa needs d >= 3");
  if (req.kind == SolveKind::a2 && d != 2) throw ConfigError("pde.d", "a2 needs d = 2");
  if (req.kind == SolveKind::d1 && d != 1) throw ConfigError("pde.d", "d1 needs d = 1");

  PdeConfig& p = req.pde;
  p.d = d;
  p.r = req.r;
  p.t_final = c.get_double("pde", "t_final", 1.0);
  p.h = c.get_double("pde", "h", req.r / 100.0);
  p.t0 = c.get_double("pde", "t0", p.t0);
  const std::string mode = c.get_string("pde", "mode", "exact");
  if (mode == "exact") p.mode = InitialMode::exact;
  else if (mode == "layer") p.mode = InitialMode::layer;
  else if (mode == "theta") p.mode = InitialMode::theta;
  else if (mode == "uniform") p.mode = InitialMode::uniform;
  else throw ConfigError("pde.mode", "expected exact, layer, theta or uniform, got '" + mode + "'");
  p.theta = c.get_double("pde", "theta", 0.0);
  p.theta_ramp = c.get_doubles("pde", "theta_ramp", {});
  p.tolerance = c.get_double("pde", "tolerance", p.tolerance);
  p.tail_budget = c.get_double("pde", "tail_budget", p.tail_budget);
  p.adaptive = c.get_bool("pde", "adaptive", p.adaptive);
  p.fixed_ratio = c.get_double("pde", "fixed_ratio", p.fixed_ratio);
  p.Rmax = c.get_double("pde", "Rmax", 0.0);
  p.M = static_cast<int>(c.get_int("pde", "M", 0));
  p.output_times = c.get_doubles("pde", "output_times", {});

  LimitOptions& lo = req.limit;
  lo.series.h = c.get_double("pde", "h", lo.series.h);
  lo.series.q = c.get_double("pde", "q", lo.series.q);
  lo.series.t0 = c.get_double("pde", "t0", lo.series.t0);
  lo.series.extrapolate = c.get_bool("pde", "extrapolate", lo.series.extrapolate);
  lo.t_start = c.get_double("pde", "t_start", lo.t_start);
  lo.t_max = c.get_double("pde", "t_max", lo.t_max);
  lo.tolerance = c.get_double("pde", "limit_tolerance", lo.tolerance);
  lo.burn_in = c.get_double("pde", "burn_in", lo.burn_in);
  lo.refine = c.get_bool("pde", "refine", lo.refine);
  lo.theta_ramp = c.get_bool("pde", "theta_check", lo.theta_ramp);
  lo.thetas = c.get_doubles("pde", "thetas", lo.thetas);
  if (req.kind == SolveKind::profile) {
    if (!(p.h > 0.0)) throw ConfigError("pde.h", "must be > 0");
    if (!(p.t_final > 0.0)) throw ConfigError("pde.t_final", "must be > 0");
    if (p.Rmax == 0.0) {
      fit_outer_radius(p);
    } else if (p.M == 0) {
      p.M = static_cast<int>(std::ceil(p.Rmax / p.h));
    }
    p.validate();
  }
  return req;
}

}  // namespace sbm
