/*
   Copyright 2026 The fragerase Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Stateless counter-based uniforms. Every draw is a pure function of
// (seed, stream, i, j), so results do not depend on evaluation order or on
// how work is split between threads.

#include <cstdint>

namespace fragerase::rng {

/// Stream identifiers keep environment draws and walk draws disjoint.
enum class Stream : std::uint64_t {
  Environment = 0x656e7669726f6eULL,
  Walk = 0x77616c6bULL,
};

/// splitmix64 output function (Steele, Lea, Flood; constants by Vigna).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kRowMul = 0xD1B54A32D192ED03ULL;

/// Key for one row of draws; hoisted out of inner loops.
constexpr std::uint64_t row_key(std::uint64_t seed, Stream stream,
                                std::uint64_t i) noexcept {
  const std::uint64_t base =
      mix64(seed * kGolden + static_cast<std::uint64_t>(stream));
  return mix64(base ^ mix64((i + 1) * kRowMul));
}

constexpr std::uint64_t bits(std::uint64_t key, std::uint64_t j) noexcept {
  return mix64(key + (j + 1) * kGolden);
}

/// Maps 64 random bits to the open interval (0,1); never returns 0 or 1.
constexpr double to_open_unit(std::uint64_t h) noexcept {
  return (static_cast<double>(h >> 12) + 0.5) * 0x1.0p-52;
}

constexpr double uniform(std::uint64_t seed, Stream stream, std::uint64_t i,
                         std::uint64_t j) noexcept {
  return to_open_unit(bits(row_key(seed, stream, i), j));
}

}  // namespace fragerase::rng
