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

#include "kernels_detail.hpp"

#include <exception>

namespace sysdpa::kernels {

namespace {

// Exceptions must not escape an OpenMP region; park the first one and
// rethrow after the loop.
class ErrorSlot {
  public:
    template <typename F> void run(F &&f) {
        try {
            f();
        } catch (...) {
#pragma omp critical(sysdpa_error_slot)
            if (!error_)
                error_ = std::current_exception();
        }
    }
    void rethrow() const {
        if (error_)
            std::rethrow_exception(error_);
    }

  private:
    std::exception_ptr error_;
};

} // namespace

CorrelationBlock pearson_omp(std::span<const double> hyp, std::size_t rows,
                             const TraceMatrix &traces) {
    const std::size_t n = traces.num_traces();
    if (n < 2)
        throw InsufficientDataError("correlation needs at least 2 traces");
    if (hyp.size() != rows * n)
        throw ShapeError("hypothesis matrix width does not match trace count");
    const CenteredColumns cols = center_columns(traces, 0, traces.samples_per_trace());
    CorrelationBlock out{rows, cols.num_columns,
                         std::vector<double>(rows * cols.num_columns),
                         std::vector<std::uint8_t>(rows * cols.num_columns)};
    const auto count = static_cast<long long>(rows);
#pragma omp parallel for schedule(static)
    for (long long g = 0; g < count; ++g)
        detail::pearson_row(hyp.subspan(g * n, n), cols,
                            out.rho.data() + g * out.cols,
                            out.defined.data() + g * out.cols);
    return out;
}

CorrelationBlock score_guesses_omp(const GuessScoringInput &in) {
    detail::check_scoring_input(in);
    const std::size_t width = in.window->num_columns;
    CorrelationBlock out{256, width, std::vector<double>(256 * width),
                         std::vector<std::uint8_t>(256 * width)};
#pragma omp parallel for schedule(dynamic, 8)
    for (int g = 0; g < 256; ++g)
        detail::score_one_guess(in, static_cast<unsigned>(g),
                                out.rho.data() + g * width,
                                out.defined.data() + g * width);
    return out;
}

std::vector<double> synthesize_omp(const ArrayConfig &cfg, const WeightMatrix &w,
                                   std::span<const InputBatch> inputs,
                                   const PowerCoefficients &coeffs,
                                   const NoiseSpec &noise) {
    const std::size_t t_len = cfg.total_cycles();
    std::vector<double> out(inputs.size() * t_len, 0.0);
    const auto count = static_cast<long long>(inputs.size());
    ErrorSlot errors;
#pragma omp parallel for schedule(static)
    for (long long n = 0; n < count; ++n)
        errors.run([&] {
            detail::synthesize_one(cfg, w, inputs[n], coeffs, noise,
                                   static_cast<std::size_t>(n),
                                   std::span<double>(out.data() + n * t_len, t_len));
        });
    errors.rethrow();
    return out;
}

} // namespace sysdpa::kernels
