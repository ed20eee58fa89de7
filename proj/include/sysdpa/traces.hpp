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

#ifndef SYSDPA_TRACES_HPP
#define SYSDPA_TRACES_HPP

#include "sysdpa/systolic.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace sysdpa {

/// N power traces of T samples each, row-major, together with the input
/// batch that produced each trace.
class TraceMatrix {
  public:
    TraceMatrix() = default;
    TraceMatrix(std::size_t samples_per_trace, std::vector<InputBatch> inputs);
    TraceMatrix(std::size_t samples_per_trace, std::vector<InputBatch> inputs,
                std::vector<double> samples);

    std::size_t num_traces() const { return inputs_.size(); }
    std::size_t samples_per_trace() const { return samples_per_trace_; }

    double at(std::size_t n, std::size_t t) const {
        return samples_[n * samples_per_trace_ + t];
    }
    double &at(std::size_t n, std::size_t t) {
        return samples_[n * samples_per_trace_ + t];
    }
    std::span<const double> trace(std::size_t n) const {
        return {samples_.data() + n * samples_per_trace_, samples_per_trace_};
    }
    std::span<double> trace(std::size_t n) {
        return {samples_.data() + n * samples_per_trace_, samples_per_trace_};
    }
    std::vector<double> column(std::size_t t) const;

    std::span<const double> samples() const { return samples_; }
    std::span<double> samples() { return samples_; }
    const std::vector<InputBatch> &inputs() const { return inputs_; }

    /// The first `n` traces.
    TraceMatrix prefix(std::size_t n) const;

    bool operator==(const TraceMatrix &) const = default;

  private:
    std::size_t samples_per_trace_ = 0;
    std::vector<InputBatch> inputs_;
    std::vector<double> samples_;
};

/// Serial reference or OpenMP kernel. Both produce bit-identical results.
enum class Exec { serial, parallel };

} // namespace sysdpa

#endif // SYSDPA_TRACES_HPP
