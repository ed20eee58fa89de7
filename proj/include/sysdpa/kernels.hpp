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

// Data-parallel inner loops. Every kernel exists twice: a plain serial
// reference (kernels_serial.cpp) and an OpenMP version (kernels_omp.cpp).
// The OpenMP versions only split independent outer iterations, each of which
// accumulates in the same order as the serial loop, so results are
// bit-identical for any thread count.

#ifndef SYSDPA_KERNELS_HPP
#define SYSDPA_KERNELS_HPP

#include "sysdpa/power_model.hpp"
#include "sysdpa/systolic.hpp"
#include "sysdpa/traces.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sysdpa::kernels {

/// Correlations laid out [row][column], with a 0/1 flag per entry. Entries
/// whose hypothesis row or trace column is constant are flagged 0 and hold 0.
struct CorrelationBlock {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> rho;
    std::vector<std::uint8_t> defined;
};

/// Mean-free copies of a contiguous range of trace columns, laid out
/// [column][trace], with their sums of squares.
struct CenteredColumns {
    std::size_t num_traces = 0;
    std::size_t num_columns = 0;
    std::vector<double> data;
    std::vector<double> sum_squares;
    std::vector<std::uint8_t> constant;

    std::span<const double> column(std::size_t k) const {
        return {data.data() + k * num_traces, num_traces};
    }
};

CenteredColumns center_columns(const TraceMatrix &traces, std::size_t begin,
                               std::size_t end);

/// Pearson correlation of every row of `hyp` (`rows` x N, row-major) with
/// every column of `traces`.
CorrelationBlock pearson_serial(std::span<const double> hyp, std::size_t rows,
                                const TraceMatrix &traces);
CorrelationBlock pearson_omp(std::span<const double> hyp, std::size_t rows,
                             const TraceMatrix &traces);

/// One step of the chained attack: the target weight sits in some row of a
/// column whose upper rows are already fixed. For trace n the Reg C values
/// under guess w are
///     P_v = prefix_v[n] + x_v[n] * w   (v = 0, 1)
/// and the hypothesis is the leakage of the P_0 -> P_1 transition.
struct GuessScoringInput {
    std::span<const std::int64_t> prefix0;
    std::span<const std::int64_t> prefix1;
    std::span<const std::int8_t> x0;
    std::span<const std::int8_t> x1;
    const CenteredColumns *window = nullptr;
    unsigned psum_width = 24;
    LeakageSpec leakage;
};

/// Correlation of all 256 guesses (indexed by 8-bit pattern) against every
/// column of the window: a 256 x window-width block.
CorrelationBlock score_guesses_serial(const GuessScoringInput &in);
CorrelationBlock score_guesses_omp(const GuessScoringInput &in);

/// One synthesized trace per input batch, row-major N x T.
std::vector<double> synthesize_serial(const ArrayConfig &cfg, const WeightMatrix &w,
                                      std::span<const InputBatch> inputs,
                                      const PowerCoefficients &coeffs,
                                      const NoiseSpec &noise);
std::vector<double> synthesize_omp(const ArrayConfig &cfg, const WeightMatrix &w,
                                   std::span<const InputBatch> inputs,
                                   const PowerCoefficients &coeffs,
                                   const NoiseSpec &noise);

inline CorrelationBlock score_guesses(const GuessScoringInput &in, Exec exec) {
    return exec == Exec::serial ? score_guesses_serial(in) : score_guesses_omp(in);
}

} // namespace sysdpa::kernels

#endif // SYSDPA_KERNELS_HPP
