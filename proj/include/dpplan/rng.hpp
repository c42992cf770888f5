// Copyright 2026 The dpplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>

#include "dpplan/core.hpp"

namespace dpplan {

/// Seedable, splittable pseudo-random stream (splitmix64 core). The same
/// seed reproduces the same sample stream; partition branches derive
/// disjoint substreams from (parent state, branch index).
class RngState {
 public:
  explicit RngState(std::uint64_t seed) : state_(mix(seed ^ kInit)) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  /// Uniform double in [0,1).
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in the open interval (-1/2, 1/2), never exactly zero.
  double next_signed_unit() {
    // (k + 0.5) * 2^-53 lies strictly inside (0,1) and cannot equal 1/2.
    double u = (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    return u - 0.5;
  }

  /// Child stream for branch `index`; advances this stream by one tick so
  /// sibling splits and subsequent draws do not collide.
  RngState split(std::uint64_t index) {
    std::uint64_t tick = next_u64();
    RngState child(0);
    child.state_ = mix(tick ^ mix(index + 0x632BE59BD9B4E019ull));
    return child;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  static constexpr std::uint64_t kInit = 0xD1B54A32D192ED03ull;

  std::uint64_t state_;
};

/// One draw from Laplace(0, b) via inverse CDF: u ~ U(-1/2, 1/2),
/// x = -b * sgn(u) * ln(1 - 2|u|).
inline double sample_laplace(double b, RngState& rng) {
  if (!(b > 0.0)) throw ContractError("sample_laplace: scale must be > 0");
  double u = rng.next_signed_unit();
  double sgn = u < 0.0 ? -1.0 : 1.0;
  return -b * sgn * std::log1p(-2.0 * std::abs(u));
}

}  // namespace dpplan
