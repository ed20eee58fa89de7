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

#ifndef SYSDPA_POWER_MODEL_HPP
#define SYSDPA_POWER_MODEL_HPP

#include "sysdpa/systolic.hpp"
#include "sysdpa/traces.hpp"

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace sysdpa {

/// Per-PE weights of the Reg A (input) and Reg C (partial sum) switching
/// terms in the register-switching power model.
class PowerCoefficients {
  public:
    PowerCoefficients() = default;
    PowerCoefficients(unsigned rows, unsigned cols, double alpha, double beta);

    /// alpha = 3, beta = 2 for PEs that forward inputs to a right neighbour;
    /// alpha = 1, beta = 2 for the last column (including every PE of a
    /// dot-product array).
    static PowerCoefficients defaults(const ArrayConfig &cfg);

    unsigned rows() const { return rows_; }
    unsigned cols() const { return cols_; }
    double alpha(unsigned r, unsigned c) const { return alpha_[r * cols_ + c]; }
    double beta(unsigned r, unsigned c) const { return beta_[r * cols_ + c]; }
    void set(unsigned r, unsigned c, double alpha, double beta);

    /// Same beta, alpha forced to zero.
    PowerCoefficients reg_c_only() const;

    /// Throws PreconditionError on a negative / non-finite entry or a shape
    /// mismatch with `cfg`.
    void validate(const ArrayConfig &cfg) const;

    bool operator==(const PowerCoefficients &) const = default;

  private:
    unsigned rows_ = 0;
    unsigned cols_ = 0;
    std::vector<double> alpha_;
    std::vector<double> beta_;
};

struct NoiseSpec {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

struct Trace {
    std::vector<double> samples;
};

inline unsigned hamming_distance(std::uint64_t a, std::uint64_t b) {
    return static_cast<unsigned>(std::popcount(a ^ b));
}

/// Switching power of one PE in cycle t. Cycle 0 is compared against
/// all-zero registers.
double pe_cycle_power(const RegisterTimeline &tl, unsigned r, unsigned c,
                      unsigned t, const PowerCoefficients &coeffs);

/// Total array power per cycle plus optional Gaussian noise.
Trace synthesize_trace(const RegisterTimeline &tl, const PowerCoefficients &coeffs,
                       const NoiseSpec &noise = {});

/// Simulates every input batch and synthesizes one trace per batch. Trace n
/// draws its noise from the stream `derive_seed(noise.seed, n)`.
TraceMatrix synthesize_traces(const ArrayConfig &cfg, const WeightMatrix &w,
                              std::span<const InputBatch> inputs,
                              const PowerCoefficients &coeffs,
                              const NoiseSpec &noise = {},
                              Exec exec = Exec::parallel);

enum class LeakageModel {
    hamming_distance, // popcount(P0 ^ P1)
    hamming_weight,   // popcount(P1)
    bit,              // bit `bit` of P0 ^ P1
};

struct LeakageSpec {
    LeakageModel model = LeakageModel::hamming_distance;
    unsigned bit = 0;
};

/// Leakage of a Reg C transition between two `width`-bit patterns.
inline unsigned leakage_value(const LeakageSpec &spec, std::uint64_t p0,
                              std::uint64_t p1) {
    switch (spec.model) {
    case LeakageModel::hamming_weight:
        return static_cast<unsigned>(std::popcount(p1));
    case LeakageModel::bit:
        return static_cast<unsigned>(((p0 ^ p1) >> spec.bit) & 1u);
    case LeakageModel::hamming_distance:
    default:
        return hamming_distance(p0, p1);
    }
}

/// Predicted power for every guess of one weight and every trace.
///
/// Row g corresponds to the weight whose 8-bit two's-complement pattern is
/// g, so row 0 is weight 0, row 127 is 127 and row 128 is -128.
class HypothesisMatrix {
  public:
    static constexpr unsigned kGuesses = 256;

    explicit HypothesisMatrix(std::size_t num_traces)
        : num_traces_(num_traces), h_(kGuesses * num_traces, 0.0) {}

    std::size_t num_traces() const { return num_traces_; }
    double at(unsigned g, std::size_t n) const { return h_[g * num_traces_ + n]; }
    double &at(unsigned g, std::size_t n) { return h_[g * num_traces_ + n]; }
    std::span<const double> row(unsigned g) const {
        return {h_.data() + g * num_traces_, num_traces_};
    }
    std::span<double> row(unsigned g) {
        return {h_.data() + g * num_traces_, num_traces_};
    }

    std::span<const double> data() const { return h_; }

    static std::int8_t weight_of(unsigned guess) {
        return static_cast<std::int8_t>(static_cast<std::uint8_t>(guess));
    }
    static unsigned guess_of(std::int8_t weight) {
        return static_cast<std::uint8_t>(weight);
    }

  private:
    std::size_t num_traces_;
    std::vector<double> h_;
};

/// Sum of x[v][i] * w[i] over i <= last_row, wrapped to `width` bits.
std::uint64_t partial_sum(const InputBatch &x, unsigned v,
                          std::span<const std::int8_t> weights,
                          unsigned last_row, unsigned width);

/// Hypotheses for the weight in `row` of one column, given the recovered
/// weights of the rows above it (`known`, at least `row` entries; extra
/// entries are ignored). Uses the first two vectors of every batch.
HypothesisMatrix hypothesis_matrix(std::span<const InputBatch> inputs,
                                   std::span<const std::int8_t> known,
                                   unsigned row, unsigned psum_width,
                                   const LeakageSpec &leakage = {});

inline HypothesisMatrix hypothesis_hd(std::span<const InputBatch> inputs,
                                      std::span<const std::int8_t> known,
                                      unsigned row, unsigned psum_width = 24) {
    return hypothesis_matrix(inputs, known, row, psum_width,
                             {LeakageModel::hamming_distance, 0});
}
inline HypothesisMatrix hypothesis_hw(std::span<const InputBatch> inputs,
                                      std::span<const std::int8_t> known,
                                      unsigned row, unsigned psum_width = 24) {
    return hypothesis_matrix(inputs, known, row, psum_width,
                             {LeakageModel::hamming_weight, 0});
}
inline HypothesisMatrix hypothesis_bit(std::span<const InputBatch> inputs,
                                       std::span<const std::int8_t> known,
                                       unsigned row, unsigned bit,
                                       unsigned psum_width = 24) {
    return hypothesis_matrix(inputs, known, row, psum_width,
                             {LeakageModel::bit, bit});
}

} // namespace sysdpa

#endif // SYSDPA_POWER_MODEL_HPP
