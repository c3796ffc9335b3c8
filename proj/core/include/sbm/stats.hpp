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

namespace sbm {

// Two-sided standard normal quantile for the given confidence.
double z_for_confidence(double confidence);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double confidence);

// Kolmogorov limiting survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);
// Asymptotic p-value of a one-sample statistic D with Stephens' finite-n correction.
double ks_pvalue(std::size_t n, double D);
// Smallest D rejected at level alpha.
double ks_critical(std::size_t n, double alpha);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::size_t excluded = 0;  // non-finite (censored) samples left out
};

// One-sample test against the Exp(rate) CDF 1 - exp(-rate x).
KsResult ks_test_exponential(std::span<const double> samples, double rate);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Goodness of fit of integer counts to Poisson(mean); tail bins are merged
// until every bin expects at least 5 observations.
ChiSquareResult chi_square_poisson(std::span<const std::uint64_t> counts, double mean);

// Welford accumulator.
class RunningStats {
 public:
  void add(double x) noexcept;
  void merge(const RunningStats& o) noexcept;
  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double std_error() const noexcept;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace sbm
