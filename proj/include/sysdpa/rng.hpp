/*
 * SPDX-FileCopyrightText: Copyright 2026 The sysdpa Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SYSDPA_RNG_HPP
#define SYSDPA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace sysdpa {

/// SplitMix64 (Steele, Lea, Flood). Fixed so that test vectors are
/// reproducible from any language. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

    static constexpr std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    result_type operator()() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; consumes exactly two draws.
    double gaussian() {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

  private:
    std::uint64_t state_;
};

/// Independent stream seed for item `index` of a seeded collection, so a
/// parallel loop draws the same numbers as a serial one.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return SplitMix64::mix(seed ^ SplitMix64::mix(index + 0x632be59bd9b4e019ULL));
}

} // namespace sysdpa

#endif // SYSDPA_RNG_HPP
