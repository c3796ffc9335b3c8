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

#include "sbm/geometry.hpp"

#include <cmath>
#include <string>

#include "sbm/errors.hpp"

namespace sbm {

ConfigError::ConfigError(const std::string& field, const std::string& message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + field + ": " + message
                                  : field + ": " + message),
      field_(field),
      line_(line) {}

Dimension::Dimension(int value) : d(value) {
  if (value < 1) throw DomainError("dimension must be >= 1");
}

BallSpec::BallSpec(Point c, double r) : center(std::move(c)), radius(r) {
  if (!(r >= 0.0)) throw DomainError("ball radius must be >= 0");
}

double norm(std::span<const double> x) noexcept {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

double distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double v = a[i] - b[i];
    s += v * v;
  }
  return std::sqrt(s);
}

}  // namespace sbm
