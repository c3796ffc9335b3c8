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
#include <span>
#include <vector>

#include "sbm/rng.hpp"

namespace sbm {

// Genealogy of one particle of the critical binary branching system
// (birth rate = death rate = lambda) observed after time tau, conditioned on
// survival. The surviving family is a coalescent point process: the leaf count
// is Geometric(1/(1 + lambda tau)) and the n - 1 coalescence depths are i.i.d.
// with P(H > s) = 1/(1 + lambda s) conditioned on H <= tau. Leaf positions are
// placed by Brownian motion along the reduced tree, built top-down from the
// deepest split.
class FamilySampler {
 public:
  FamilySampler(int d, double lambda);

  int dim() const noexcept { return d_; }
  double lambda() const noexcept { return lambda_; }
  double survival(double tau) const noexcept { return 1.0 / (1.0 + lambda_ * tau); }
  std::uint64_t leaf_count(double tau, Stream& s) const noexcept { return s.geometric(survival(tau)); }

  // Appends d * leaves coordinates to `out`.
  void place(std::span<const double> y, double tau, std::uint64_t leaves, Stream& s,
             std::vector<double>& out) const;

  struct NearestState {
    double radius = 0.0;   // current distance bound, shrinks as leaves are found
    double delta = 0.0;    // subtrees whose hit bound is below delta are skipped
    double pruned = 0.0;   // accumulated upper bound on the probability lost to pruning
    std::uint64_t nodes = 0;
  };
  // Distance to the origin of the nearest leaf, restricted to leaves closer than
  // st.radius (which is lowered to the new minimum).
  void nearest(std::span<const double> y, double tau, std::uint64_t leaves, Stream& s,
               NearestState& st) const;

  // Maximum of k i.i.d. depths conditioned on H <= cap.
  double max_depth(double cap, std::uint64_t k, Stream& s) const noexcept;

 private:
  struct Node {
    double cap;
    std::uint64_t leaves;
  };
  template <class Leaf, class Prune>
  void walk(std::span<const double> y, double tau, std::uint64_t leaves, Stream& s, Leaf&& leaf,
            Prune&& prune) const;

  int d_;
  double lambda_;
};

}  // namespace sbm
