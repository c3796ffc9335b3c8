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

#include <span>
#include <vector>

namespace sbm {

// The three regimes of the empty-ball asymptotics.
enum class Regime { line, plane, transient };

struct Dimension {
  int d = 1;

  explicit Dimension(int value);
  Regime regime() const noexcept {
    return d == 1 ? Regime::line : d == 2 ? Regime::plane : Regime::transient;
  }
  operator int() const noexcept { return d; }
};

using Point = std::vector<double>;

// Open ball {x : |x - center| < radius}. radius == 0 is the empty ball.
struct BallSpec {
  Point center;
  double radius = 0.0;

  BallSpec() = default;
  BallSpec(Point c, double r);
  static BallSpec centered(int d, double r) { return BallSpec(Point(static_cast<size_t>(d), 0.0), r); }
  int dim() const noexcept { return static_cast<int>(center.size()); }
};

double norm(std::span<const double> x) noexcept;
double distance(std::span<const double> a, std::span<const double> b) noexcept;

}  // namespace sbm
