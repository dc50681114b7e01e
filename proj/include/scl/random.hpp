// Copyright 2026 The SCL Authors. All Rights Reserved.
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

/**
 * @file random.hpp
 * @brief Portable, bit-reproducible randomness.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the C++
 * standard. The standard distributions are not (their algorithms are left to
 * the library vendor), so the conversions to reals and bounded integers live
 * here and are frozen:
 *
 *   - uniform01:     (x >> 11) * 2^-53, x the next 64-bit engine output.
 *   - uniform_index: rejection sampling on the full 64-bit output.
 *
 * Per-record seeds are derived with derive_seed(), see below.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace scl {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). A bijection on uint64.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/**
 * Seed of record `index` of class `class_id` under `master_seed`:
 *
 *     derive_seed(m, c, i) = mix64(mix64(m) ^ ((c << 32) | i))
 *
 * For a fixed master seed this is injective over all (c, i) with
 * c, i < 2^32, because XOR with a constant and mix64 are both bijections.
 * This definition is part of the on-disk reproducibility contract and must
 * not change.
 */
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint32_t class_id,
                                    std::uint32_t index) noexcept {
  const std::uint64_t key = (static_cast<std::uint64_t>(class_id) << 32) | index;
  return mix64(mix64(master_seed) ^ key);
}

/// Independent sub-stream seed for a numbered purpose within one record.
constexpr std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(seed ^ mix64(stream));
}

/// Uniform real in [0, 1) with 53 random bits.
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform real in [lo, hi); returns lo when the range is empty.
inline double uniform_real(Engine& eng, double lo, double hi) {
  const double u = uniform01(eng);
  if (!(hi > lo)) return lo;
  double v = lo + u * (hi - lo);
  if (v >= hi) v = std::nextafter(hi, lo);
  return v;
}

/// Uniform real in the closed interval [lo, hi].
inline double uniform_closed(Engine& eng, double lo, double hi) {
  if (!(hi > lo)) return lo;
  const double u = static_cast<double>(eng() >> 11) * (1.0 / 9007199254740991.0);
  const double v = lo + u * (hi - lo);
  return v > hi ? hi : v;
}

/// Uniform integer in [0, n). n must be positive.
inline std::uint64_t uniform_index(Engine& eng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return x % n;
}

}  // namespace scl
