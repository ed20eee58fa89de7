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

#ifndef SYSDPA_ATTACK_HPP
#define SYSDPA_ATTACK_HPP

#include "sysdpa/errors.hpp"
#include "sysdpa/power_model.hpp"
#include "sysdpa/systolic.hpp"
#include "sysdpa/traces.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace sysdpa {

/// Pearson coefficients for every hypothesis row and trace sample.
/// Entries with a constant hypothesis row or constant trace column are
/// undefined: `defined()` is false and `at()` returns 0.
class CorrelationMatrix {
  public:
    CorrelationMatrix() = default;
    CorrelationMatrix(std::size_t rows, std::size_t samples)
        : rows_(rows), samples_(samples), rho_(rows * samples, 0.0),
          defined_(rows * samples, 0) {}
    CorrelationMatrix(std::size_t rows, std::size_t samples, std::vector<double> rho,
                      std::vector<std::uint8_t> defined);

    std::size_t rows() const { return rows_; }
    std::size_t samples() const { return samples_; }
    double at(std::size_t g, std::size_t t) const { return rho_[g * samples_ + t]; }
    bool defined(std::size_t g, std::size_t t) const {
        return defined_[g * samples_ + t] != 0;
    }
    void set(std::size_t g, std::size_t t, double rho, bool defined) {
        rho_[g * samples_ + t] = rho;
        defined_[g * samples_ + t] = defined ? 1 : 0;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t samples_ = 0;
    std::vector<double> rho_;
    std::vector<std::uint8_t> defined_;
};

/// Correlates each hypothesis row with each trace column (sample-variance
/// normalization; the ratio is independent of N vs N-1).
CorrelationMatrix pearson_corr(const HypothesisMatrix &hyp, const TraceMatrix &traces,
                               Exec exec = Exec::parallel);

enum class ScoreMode {
    signed_max,   // largest correlation
    absolute_max, // largest |correlation|
};

/// Half-open sample range [begin, end).
struct SampleRange {
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct AttackConfig {
    /// Row-0 guesses carried into the chain.
    unsigned beam = 50;
    ScoreMode score = ScoreMode::signed_max;
    LeakageSpec leakage;
    /// Samples per clock cycle of the trace set. With the default window the
    /// weight in (row, col) is scored on cycle row + col + 1, where its Reg C
    /// moves from the vector-0 to the vector-1 partial sum.
    unsigned samples_per_cycle = 1;
    /// Optional explicit windows, one per row, overriding the default.
    std::vector<SampleRange> row_windows;
    Exec exec = Exec::parallel;

    SampleRange window(unsigned row, unsigned col) const;
    void validate() const;
};

struct GuessEntry {
    /// Recovered weights of the column, top row first.
    std::vector<std::int8_t> weights;
    /// Score of the last row, which ranks the chain.
    double score = 0.0;
    /// Score of every row as it was chosen.
    std::vector<double> row_scores;
};

/// Ranked candidate weight columns, best first, at most `capacity` long.
struct GuessChain {
    unsigned column = 0;
    unsigned capacity = 0;
    std::vector<GuessEntry> entries;

    /// 1-based rank of `truth` in the chain, or nullopt when absent.
    std::optional<std::size_t> rank_of(std::span<const std::int8_t> truth) const;
    const GuessEntry &best() const { return entries.front(); }
};

/// Chained DPA on one PE column.
///
/// 1. Score all 256 guesses of the top weight with the product-only model
///    and keep the `beam` best.
/// 2. For each kept guess, score the next row's 256 guesses with the
///    accumulated model and keep the single best continuation.
/// 3. Repeat step 2 down to the bottom row and rank the resulting columns by
///    the bottom row's score.
///
/// Constant hypothesis rows (e.g. weight 0 in the top row) score -inf.
/// Ties go to the smaller signed weight. Throws DegenerateAttackError when
/// no top-row guess has a defined correlation.
GuessChain chained_column_attack(const TraceMatrix &traces, const ArrayConfig &cfg,
                                 unsigned col, const AttackConfig &acfg = {});

/// Independent chained attacks on every column of the raw traces.
std::vector<GuessChain> conventional_2d_attack(const TraceMatrix &traces,
                                               const ArrayConfig &cfg,
                                               const AttackConfig &acfg = {});

/// Traces of a profiled copy of the device running `profile` on exactly the
/// given inputs. Throws AlignmentError when an input batch does not fit the
/// array.
TraceMatrix make_template_traces(const WeightMatrix &profile,
                                 std::span<const InputBatch> inputs,
                                 const ArrayConfig &cfg,
                                 const PowerCoefficients &coeffs,
                                 const NoiseSpec &noise = {},
                                 Exec exec = Exec::parallel);

/// target - templates, elementwise. Both must share shape and inputs.
TraceMatrix subtract_template(const TraceMatrix &target, const TraceMatrix &templates);

/// Produces template traces for a chosen weight setting on given inputs.
using Profiler = std::function<TraceMatrix(const WeightMatrix &,
                                           std::span<const InputBatch>)>;

/// Profiler backed by the simulator.
Profiler simulated_profiler(const ArrayConfig &cfg, const PowerCoefficients &coeffs,
                            const NoiseSpec &noise = {});

enum class PhaseOrder {
    right_to_left, // last column first: it does not forward inputs
    left_to_right,
};

struct PhaseResult {
    unsigned column = 0;
    GuessChain chain;
};

struct MultiphaseResult {
    WeightMatrix weights;
    std::vector<PhaseResult> phases;
};

class PhaseFailureError : public Error {
  public:
    PhaseFailureError(const std::string &what, MultiphaseResult partial)
        : Error(what), partial_(std::move(partial)) {}
    const MultiphaseResult &partial() const { return partial_; }

  private:
    MultiphaseResult partial_;
};

/// Column-by-column template attack. The first column is attacked on the
/// raw traces. Before each later phase the profiler is run with every
/// recovered column loaded and all other weights zero, and its traces are
/// subtracted from the originals, leaving only the Reg C switching of the
/// columns still unknown.
MultiphaseResult multiphase_attack(const TraceMatrix &traces, const ArrayConfig &cfg,
                                   const AttackConfig &acfg, const Profiler &profiler,
                                   PhaseOrder order = PhaseOrder::right_to_left);

struct MtdPoint {
    std::size_t num_traces = 0;
    /// Rank of the true column, nullopt when absent or the attack degenerated.
    std::optional<std::size_t> rank;
};

struct MtdReport {
    std::size_t step = 0;
    std::vector<MtdPoint> points;
    /// Smallest prefix size with the truth at rank 1; nullopt means NA.
    std::optional<std::size_t> mtd;
};

using ColumnAttack = std::function<GuessChain(const TraceMatrix &)>;

/// Runs `attack` on prefixes of step, 2*step, ... traces and records the
/// rank of `truth`. With `stop_at_first` the sweep ends at the first rank-1
/// prefix. `max_traces` (0 = all) caps the sweep.
MtdReport mtd_sweep(const ColumnAttack &attack, const TraceMatrix &traces,
                    std::size_t step, std::span<const std::int8_t> truth,
                    bool stop_at_first = true, std::size_t max_traces = 0);

} // namespace sysdpa

#endif // SYSDPA_ATTACK_HPP
