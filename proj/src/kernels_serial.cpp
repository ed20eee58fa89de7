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

#include <string>

namespace sysdpa::kernels {

CenteredColumns center_columns(const TraceMatrix &traces, std::size_t begin,
                               std::size_t end) {
    if (begin > end || end > traces.samples_per_trace())
        throw IndexError("sample window [" + std::to_string(begin) + ", " +
                         std::to_string(end) + ") outside a " +
                         std::to_string(traces.samples_per_trace()) +
                         "-sample trace");
    CenteredColumns out;
    out.num_traces = traces.num_traces();
    out.num_columns = end - begin;
    out.data.resize(out.num_traces * out.num_columns);
    out.sum_squares.assign(out.num_columns, 0.0);
    out.constant.assign(out.num_columns, 1);
    const std::size_t n = out.num_traces;
    for (std::size_t k = 0; k < out.num_columns; ++k) {
        const std::size_t t = begin + k;
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            mean += traces.at(i, t);
        mean /= static_cast<double>(n);
        double *col = out.data.data() + k * n;
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            col[i] = traces.at(i, t) - mean;
            ss += col[i] * col[i];
            if (traces.at(i, t) != traces.at(0, t))
                out.constant[k] = 0;
        }
        out.sum_squares[k] = ss;
    }
    return out;
}

CorrelationBlock pearson_serial(std::span<const double> hyp, std::size_t rows,
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
    for (std::size_t g = 0; g < rows; ++g)
        detail::pearson_row(hyp.subspan(g * n, n), cols,
                            out.rho.data() + g * out.cols,
                            out.defined.data() + g * out.cols);
    return out;
}

CorrelationBlock score_guesses_serial(const GuessScoringInput &in) {
    detail::check_scoring_input(in);
    const std::size_t width = in.window->num_columns;
    CorrelationBlock out{256, width, std::vector<double>(256 * width),
                         std::vector<std::uint8_t>(256 * width)};
    for (unsigned g = 0; g < 256; ++g)
        detail::score_one_guess(in, g, out.rho.data() + g * width,
                                out.defined.data() + g * width);
    return out;
}

std::vector<double> synthesize_serial(const ArrayConfig &cfg, const WeightMatrix &w,
                                      std::span<const InputBatch> inputs,
                                      const PowerCoefficients &coeffs,
                                      const NoiseSpec &noise) {
    const std::size_t t_len = cfg.total_cycles();
    std::vector<double> out(inputs.size() * t_len, 0.0);
    for (std::size_t n = 0; n < inputs.size(); ++n)
        detail::synthesize_one(cfg, w, inputs[n], coeffs, noise, n,
                               std::span<double>(out.data() + n * t_len, t_len));
    return out;
}

} // namespace sysdpa::kernels
