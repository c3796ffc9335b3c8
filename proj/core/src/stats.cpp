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

#include "sbm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>

#include "sbm/errors.hpp"

namespace sbm {

double z_for_confidence(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must be in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * confidence);
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double confidence) {
  if (n == 0) throw DomainError("wilson_interval: n must be >= 1");
  if (successes > n) throw DomainError("wilson_interval: successes exceed n");
  const double z = z_for_confidence(confidence);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  Interval iv{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (successes == 0) iv.lo = 0.0;
  if (successes == n) iv.hi = 1.0;
  return iv;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {
double stephens(std::size_t n) {
  const double s = std::sqrt(static_cast<double>(n));
  return s + 0.12 + 0.11 / s;
}
}  // namespace

double ks_pvalue(std::size_t n, double D) { return kolmogorov_survival(stephens(n) * D); }

double ks_critical(std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("ks_critical: alpha must be in (0,1)");
  double lo = 0.2, hi = 5.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_survival(mid) > alpha ? lo : hi) = mid;
  }
  return hi / stephens(n);
}

KsResult ks_test_exponential(std::span<const double> samples, double rate) {
  if (!(rate > 0.0)) throw DomainError("ks_test_exponential: rate must be > 0");
  std::vector<double> x;
  x.reserve(samples.size());
  KsResult r;
  for (double v : samples) {
    if (std::isfinite(v))
      x.push_back(v);
    else
      ++r.excluded;
  }
  if (x.empty()) throw DomainError("ks_test_exponential: no finite samples");
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double D = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double F = x[i] <= 0.0 ? 0.0 : -std::expm1(-rate * x[i]);
    D = std::max({D, (static_cast<double>(i) + 1.0) / n - F, F - static_cast<double>(i) / n});
  }
  r.statistic = D;
  r.n = x.size();
  r.p_value = ks_pvalue(x.size(), D);
  return r;
}

ChiSquareResult chi_square_poisson(std::span<const std::uint64_t> counts, double mean) {
  if (counts.empty()) throw DomainError("chi_square_poisson: no counts");
  if (!(mean > 0.0)) throw DomainError("chi_square_poisson: mean must be > 0");
  const boost::math::poisson_distribution<double> pois(mean);
  const double n = static_cast<double>(counts.size());
  std::map<std::uint64_t, double> observed;
  for (auto c : counts) observed[c] += 1.0;
  // Bins [edge_i, edge_{i+1}) from the left tail, each expecting >= 5.
  std::vector<std::uint64_t> edges = {0};
  double acc = 0.0;
  const auto kmax = static_cast<std::uint64_t>(mean + 20.0 * std::sqrt(mean) + 20.0);
  for (std::uint64_t k = 0; k <= kmax; ++k) {
    acc += boost::math::pdf(pois, static_cast<double>(k)) * n;
    if (acc >= 5.0) {
      edges.push_back(k + 1);
      acc = 0.0;
    }
  }
  // The last bin is open to the right; fold a small remainder into it.
  if (edges.size() > 2) edges.pop_back();
  const size_t bins = edges.size();
  ChiSquareResult r;
  for (size_t b = 0; b < bins; ++b) {
    const double lo = static_cast<double>(edges[b]);
    double p;
    if (b + 1 < bins) {
      const double hi = static_cast<double>(edges[b + 1]);
      p = (lo > 0 ? boost::math::cdf(boost::math::complement(pois, lo - 1.0)) : 1.0) -
          boost::math::cdf(boost::math::complement(pois, hi - 1.0));
    } else {
      p = lo > 0 ? boost::math::cdf(boost::math::complement(pois, lo - 1.0)) : 1.0;
    }
    double obs = 0.0;
    for (auto it = observed.lower_bound(edges[b]);
         it != observed.end() && (b + 1 == bins || it->first < edges[b + 1]); ++it)
      obs += it->second;
    const double e = p * n;
    r.statistic += (obs - e) * (obs - e) / e;
  }
  r.dof = static_cast<int>(bins) - 1;
  if (r.dof < 1) throw DomainError("chi_square_poisson: too few observations to bin");
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(r.dof), r.statistic));
  return r;
}

void RunningStats::add(double x) noexcept {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& o) noexcept {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
  const double delta = o.mean_ - mean_;
  mean_ += delta * nb / (na + nb);
  m2_ += o.m2_ + delta * delta * na * nb / (na + nb);
  n_ += o.n_;
}

double RunningStats::std_error() const noexcept {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

}  // namespace sbm
