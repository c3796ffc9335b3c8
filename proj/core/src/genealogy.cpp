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

#include "sbm/genealogy.hpp"

#include <cmath>

#include "sbm/analytic.hpp"
#include "sbm/errors.hpp"

namespace sbm {

FamilySampler::FamilySampler(int d, double lambda) : d_(d), lambda_(lambda) {
  if (d < 1) throw DomainError("FamilySampler: d must be >= 1");
  if (!(lambda > 0.0)) throw DomainError("FamilySampler: lambda must be > 0");
}

double FamilySampler::max_depth(double cap, std::uint64_t k, Stream& s) const noexcept {
  // Invert F(M) = F(cap) U^{1/k} with F(s) = lambda s / (1 + lambda s).
  const double lu = std::log(s.uniform()) / static_cast<double>(k);
  const double v = std::exp(lu);
  const double one_minus_w = -std::expm1(lu) + v / (1.0 + lambda_ * cap);
  const double w = v * (lambda_ * cap / (1.0 + lambda_ * cap));
  const double m = w / (lambda_ * one_minus_w);
  return std::min(m, cap);
}

template <class Leaf, class Prune>
void FamilySampler::walk(std::span<const double> y0, double tau, std::uint64_t leaves, Stream& s,
                         Leaf&& leaf, Prune&& prune) const {
  const size_t d = static_cast<size_t>(d_);
  std::vector<Node> stack;
  std::vector<double> pos;
  std::vector<double> y(d);
  stack.push_back({tau, leaves});
  pos.assign(y0.begin(), y0.end());
  while (!stack.empty()) {
    const Node node = stack.back();
    const size_t slot = stack.size() - 1;
    stack.pop_back();
    std::copy(pos.begin() + static_cast<std::ptrdiff_t>(slot * d),
              pos.begin() + static_cast<std::ptrdiff_t>((slot + 1) * d), y.begin());
    pos.resize(slot * d);
    if (prune(y, node.cap, node.leaves)) continue;
    if (node.leaves == 1) {
      const double sd = std::sqrt(node.cap);
      for (size_t i = 0; i < d; ++i) y[i] += sd * s.normal();
      leaf(y);
      continue;
    }
    const std::uint64_t k = node.leaves - 1;
    const double m = max_depth(node.cap, k, s);
    const std::uint64_t j = s.below(k);
    const double sd = std::sqrt(node.cap - m);
    for (size_t i = 0; i < d; ++i) y[i] += sd * s.normal();
    stack.push_back({m, k - j});
    stack.push_back({m, j + 1});
    pos.insert(pos.end(), y.begin(), y.end());
    pos.insert(pos.end(), y.begin(), y.end());
  }
}

void FamilySampler::place(std::span<const double> y, double tau, std::uint64_t leaves, Stream& s,
                          std::vector<double>& out) const {
  if (leaves == 0) return;
  walk(y, tau, leaves, s, [&](const std::vector<double>& p) { out.insert(out.end(), p.begin(), p.end()); },
       [](const std::vector<double>&, double, std::uint64_t) { return false; });
}

void FamilySampler::nearest(std::span<const double> y, double tau, std::uint64_t leaves, Stream& s,
                            NearestState& st) const {
  if (leaves == 0) return;
  walk(
      y, tau, leaves, s,
      [&](const std::vector<double>& p) {
        const double r = norm(p);
        if (r < st.radius) st.radius = r;
      },
      [&](const std::vector<double>& p, double cap, std::uint64_t n) {
        ++st.nodes;
        if (st.delta <= 0.0 || !std::isfinite(st.radius)) return false;
        const double gap = norm(p) - st.radius;
        if (gap <= 0.0) return false;
        // P(some leaf ends within radius) <= n * P(|W_cap| > gap).
        if (gap * gap < 2.0 * cap) return false;
        const double bound = static_cast<double>(n) * radial_gaussian_tail(d_, gap, cap);
        if (bound >= st.delta) return false;
        st.pruned += bound;
        return true;
      });
}

}  // namespace sbm
