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

#ifndef SYSDPA_ANALYSIS_HPP
#define SYSDPA_ANALYSIS_HPP

#include "sysdpa/power_model.hpp"
#include "sysdpa/systolic.hpp"
#include "sysdpa/traces.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace sysdpa {

/// Square symmetric matrix of correlations with per-entry defined flags.
class SymmetricTable {
  public:
    SymmetricTable() = default;
    explicit SymmetricTable(std::size_t size)
        : size_(size), value_(size * size, 0.0), defined_(size * size, 0) {}

    std::size_t size() const { return size_; }
    double at(std::size_t i, std::size_t j) const { return value_[i * size_ + j]; }
    bool defined(std::size_t i, std::size_t j) const {
        return defined_[i * size_ + j] != 0;
    }
    /// Sets (i, j) and (j, i).
    void set(std::size_t i, std::size_t j, double v, bool defined) {
        value_[i * size_ + j] = value_[j * size_ + i] = v;
        defined_[i * size_ + j] = defined_[j * size_ + i] = defined ? 1 : 0;
    }

  private:
    std::size_t size_ = 0;
    std::vector<double> value_;
    std::vector<std::uint8_t> defined_;
};

/// Correlation between the hypothesis rows of every pair of guesses;
/// indices are 8-bit guess patterns as in HypothesisMatrix.
using AliasingMap = SymmetricTable;

AliasingMap model_aliasing(std::span<const InputBatch> inputs,
                           std::span<const std::int8_t> known_prior, unsigned row,
                           unsigned psum_width = 24, const LeakageSpec &leakage = {},
                           Exec exec = Exec::parallel);

/// Median |a| over defined off-diagonal entries (upper triangle).
double median_abs_off_diagonal(const SymmetricTable &table);

/// PEs are numbered row by row from 1: PE k sits at
/// r = (k - 1) / cols, c = (k - 1) % cols. In a 3x3 array PE3, PE6 and PE9
/// form the last column.
unsigned pe_number(const ArrayConfig &cfg, unsigned r, unsigned c);
std::pair<unsigned, unsigned> pe_position(const ArrayConfig &cfg, unsigned number);

enum class CycleSelection {
    /// Every cycle in which both PEs perform a MAC.
    shared_active,
    /// Only cycles in which both PEs move from one vector's partial sum to
    /// the next (their first MAC of the batch excluded).
    shared_transitions,
};

/// Correlation of Reg C Hamming distances between PE pairs, indexed by
/// pe_number - 1. For each pair and each selected cycle the HD series across
/// batches is correlated; the entry is the correlation of largest magnitude
/// and `cycle(i, j)` records the cycle it came from.
class PECorrelationTable : public SymmetricTable {
  public:
    PECorrelationTable() = default;
    explicit PECorrelationTable(std::size_t size)
        : SymmetricTable(size), cycle_(size * size, -1) {}

    int cycle(std::size_t i, std::size_t j) const { return cycle_[i * size() + j]; }
    void set_cycle(std::size_t i, std::size_t j, int t) {
        cycle_[i * size() + j] = cycle_[j * size() + i] = t;
    }

  private:
    std::vector<int> cycle_;
};

PECorrelationTable pe_hd_correlation(const ArrayConfig &cfg, const WeightMatrix &w,
                                     std::span<const InputBatch> inputs,
                                     CycleSelection cycles = CycleSelection::shared_active,
                                     Exec exec = Exec::parallel);

} // namespace sysdpa

#endif // SYSDPA_ANALYSIS_HPP
