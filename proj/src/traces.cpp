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

#include "sysdpa/traces.hpp"
#include "sysdpa/errors.hpp"

namespace sysdpa {

TraceMatrix::TraceMatrix(std::size_t samples_per_trace, std::vector<InputBatch> inputs)
    : samples_per_trace_(samples_per_trace), inputs_(std::move(inputs)),
      samples_(inputs_.size() * samples_per_trace, 0.0) {}

TraceMatrix::TraceMatrix(std::size_t samples_per_trace, std::vector<InputBatch> inputs,
                         std::vector<double> samples)
    : samples_per_trace_(samples_per_trace), inputs_(std::move(inputs)),
      samples_(std::move(samples)) {
    if (samples_.size() != inputs_.size() * samples_per_trace_)
        throw ShapeError("sample buffer is not num_traces x samples_per_trace");
}

std::vector<double> TraceMatrix::column(std::size_t t) const {
    if (t >= samples_per_trace_)
        throw IndexError("sample index out of range");
    std::vector<double> out(num_traces());
    for (std::size_t n = 0; n < out.size(); ++n)
        out[n] = at(n, t);
    return out;
}

TraceMatrix TraceMatrix::prefix(std::size_t n) const {
    if (n > num_traces())
        throw IndexError("prefix longer than the trace set");
    return TraceMatrix(
        samples_per_trace_,
        std::vector<InputBatch>(inputs_.begin(), inputs_.begin() + n),
        std::vector<double>(samples_.begin(), samples_.begin() + n * samples_per_trace_));
}

} // namespace sysdpa
