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

#include <array>
#include <cmath>
#include <cstdint>

namespace sbm {

// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) noexcept;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Counter-based random stream. The key is the master seed and the counter
// carries (draw index, stream id), so any (seed, id) pair is an independent
// reproducible stream. child(i) derives a new id from (id, i) only, which
// makes results independent of the order in which children are consumed.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t id) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t id() const noexcept { return id_; }
  Stream child(std::uint64_t index) const noexcept;

  std::uint32_t next_u32() noexcept {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }
  std::uint64_t next_u64() noexcept {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }
  // Uniform on the open interval (0, 1).
  double uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
  double normal() noexcept;
  double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;
  // Number of trials up to and including the first success, support {1, 2, ...}.
  std::uint64_t geometric(double p) noexcept;
  std::uint64_t poisson(double mean) noexcept;
  std::uint64_t binomial(std::uint64_t n, double p) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t id_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sbm
