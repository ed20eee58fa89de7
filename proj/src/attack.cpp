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

#include "sysdpa/attack.hpp"
#include "sysdpa/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sysdpa {

namespace {

constexpr double kUndefinedScore = -std::numeric_limits<double>::infinity();

/// Score of guess `g` over its window: the best defined correlation.
double window_score(const kernels::CorrelationBlock &block, unsigned g, ScoreMode mode) {
    double best = kUndefinedScore;
    for (std::size_t k = 0; k < block.cols; ++k) {
        const std::size_t i = g * block.cols + k;
        if (!block.defined[i])
            continue;
        const double s = mode == ScoreMode::absolute_max ? std::abs(block.rho[i])
                                                         : block.rho[i];
        best = std::max(best, s);
    }
    return best;
}

/// Target-row inputs of vectors 0 and 1 for every trace, per row.
struct RowInputs {
    std::vector<std::vector<std::int8_t>> x0;
    std::vector<std::vector<std::int8_t>> x1;
};

RowInputs split_inputs(const TraceMatrix &traces, unsigned rows) {
    const std::size_t n = traces.num_traces();
    RowInputs out{std::vector<std::vector<std::int8_t>>(rows, std::vector<std::int8_t>(n)),
                  std::vector<std::vector<std::int8_t>>(rows, std::vector<std::int8_t>(n))};
    for (std::size_t i = 0; i < n; ++i) {
        const InputBatch &x = traces.inputs()[i];
        for (unsigned r = 0; r < rows; ++r) {
            out.x0[r][i] = x.at(0, r);
            out.x1[r][i] = x.at(1, r);
        }
    }
    return out;
}

void check_attack_inputs(const TraceMatrix &traces, const ArrayConfig &cfg,
                         const AttackConfig &acfg, unsigned col) {
    cfg.validate();
    if (col >= cfg.cols)
        throw IndexError("column " + std::to_string(col) + " outside a " +
                         std::to_string(cfg.cols) + "-column array");
    if (traces.num_traces() < 2)
        throw InsufficientDataError("an attack needs at least 2 traces");
    for (const auto &x : traces.inputs())
        if (x.rows() != cfg.rows || x.vectors() < 2)
            throw ShapeError("every trace needs >= 2 input vectors of length " +
                             std::to_string(cfg.rows));
    const std::size_t expected =
        static_cast<std::size_t>(cfg.total_cycles()) * acfg.samples_per_cycle;
    if (acfg.row_windows.empty() && traces.samples_per_trace() != expected)
        throw ShapeError("traces have " + std::to_string(traces.samples_per_trace()) +
                         " samples, the array produces " + std::to_string(expected));
}

bool entry_before(const GuessEntry &a, const GuessEntry &b) {
    if (a.score != b.score)
        return a.score > b.score;
    return a.weights < b.weights;
}

} // namespace

CorrelationMatrix::CorrelationMatrix(std::size_t rows, std::size_t samples,
                                     std::vector<double> rho,
                                     std::vector<std::uint8_t> defined)
    : rows_(rows), samples_(samples), rho_(std::move(rho)), defined_(std::move(defined)) {
    if (rho_.size() != rows * samples || defined_.size() != rows * samples)
        throw ShapeError("correlation buffers do not match rows x samples");
}

CorrelationMatrix pearson_corr(const HypothesisMatrix &hyp, const TraceMatrix &traces,
                               Exec exec) {
    if (hyp.num_traces() != traces.num_traces())
        throw ShapeError("hypothesis columns (" + std::to_string(hyp.num_traces()) +
                         ") != traces (" + std::to_string(traces.num_traces()) + ")");
    if (traces.num_traces() < 2)
        throw InsufficientDataError("correlation needs at least 2 traces");
    auto block = exec == Exec::serial
                     ? kernels::pearson_serial(hyp.data(), HypothesisMatrix::kGuesses, traces)
                     : kernels::pearson_omp(hyp.data(), HypothesisMatrix::kGuesses, traces);
    return CorrelationMatrix(block.rows, block.cols, std::move(block.rho),
                             std::move(block.defined));
}

SampleRange AttackConfig::window(unsigned row, unsigned col) const {
    if (!row_windows.empty()) {
        if (row >= row_windows.size())
            throw PreconditionError("no window configured for row " + std::to_string(row));
        return row_windows[row];
    }
    const std::size_t cycle = static_cast<std::size_t>(row) + col + 1;
    return {cycle * samples_per_cycle, (cycle + 1) * samples_per_cycle};
}

void AttackConfig::validate() const {
    if (beam < 1 || beam > 256)
        throw PreconditionError("beam width must be in [1, 256]");
    if (samples_per_cycle < 1)
        throw PreconditionError("samples_per_cycle must be >= 1");
    for (const auto &w : row_windows)
        if (w.begin >= w.end)
            throw PreconditionError("empty attack window");
}

std::optional<std::size_t> GuessChain::rank_of(std::span<const std::int8_t> truth) const {
    for (std::size_t i = 0; i < entries.size(); ++i)
        if (std::equal(entries[i].weights.begin(), entries[i].weights.end(),
                       truth.begin(), truth.end()))
            return i + 1;
    return std::nullopt;
}

GuessChain chained_column_attack(const TraceMatrix &traces, const ArrayConfig &cfg,
                                 unsigned col, const AttackConfig &acfg) {
    acfg.validate();
    check_attack_inputs(traces, cfg, acfg, col);
    if (acfg.leakage.model == LeakageModel::bit && acfg.leakage.bit >= cfg.psum_width)
        throw IndexError("leakage bit outside the partial-sum register");

    const std::size_t n = traces.num_traces();
    const RowInputs rows = split_inputs(traces, cfg.rows);

    std::vector<kernels::CenteredColumns> windows;
    windows.reserve(cfg.rows);
    for (unsigned r = 0; r < cfg.rows; ++r) {
        const SampleRange w = acfg.window(r, col);
        if (w.end > traces.samples_per_trace())
            throw PreconditionError(
                "window of row " + std::to_string(r) + " ends at sample " +
                std::to_string(w.end) + " but traces have " +
                std::to_string(traces.samples_per_trace()) + " samples");
        windows.push_back(kernels::center_columns(traces, w.begin, w.end));
    }

    std::vector<std::int64_t> prefix0(n, 0);
    std::vector<std::int64_t> prefix1(n, 0);
    kernels::GuessScoringInput in{prefix0, prefix1, rows.x0[0], rows.x1[0],
                                  &windows[0], cfg.psum_width, acfg.leakage};

    // Top row: rank every guess, listed in ascending signed order so the
    // stable sort breaks ties toward the smaller weight.
    const auto first = kernels::score_guesses(in, acfg.exec);
    struct Ranked {
        double score;
        std::int8_t weight;
    };
    std::vector<Ranked> ranked;
    ranked.reserve(256);
    for (int w = -128; w <= 127; ++w) {
        const auto g = HypothesisMatrix::guess_of(static_cast<std::int8_t>(w));
        ranked.push_back({window_score(first, g, acfg.score), static_cast<std::int8_t>(w)});
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Ranked &a, const Ranked &b) { return a.score > b.score; });
    if (ranked.front().score == kUndefinedScore)
        throw DegenerateAttackError("no guess for column " + std::to_string(col) +
                                    " has a defined correlation");

    GuessChain chain;
    chain.column = col;
    chain.capacity = acfg.beam;
    for (unsigned k = 0; k < acfg.beam; ++k) {
        GuessEntry entry;
        entry.weights.push_back(ranked[k].weight);
        entry.row_scores.push_back(ranked[k].score);

        for (std::size_t i = 0; i < n; ++i) {
            prefix0[i] = static_cast<std::int64_t>(rows.x0[0][i]) * ranked[k].weight;
            prefix1[i] = static_cast<std::int64_t>(rows.x1[0][i]) * ranked[k].weight;
        }
        for (unsigned r = 1; r < cfg.rows; ++r) {
            in.x0 = rows.x0[r];
            in.x1 = rows.x1[r];
            in.window = &windows[r];
            const auto block = kernels::score_guesses(in, acfg.exec);
            double best = kUndefinedScore;
            std::int8_t best_w = -128;
            for (int w = -128; w <= 127; ++w) {
                const double s = window_score(
                    block, HypothesisMatrix::guess_of(static_cast<std::int8_t>(w)),
                    acfg.score);
                if (s > best) {
                    best = s;
                    best_w = static_cast<std::int8_t>(w);
                }
            }
            entry.weights.push_back(best_w);
            entry.row_scores.push_back(best);
            for (std::size_t i = 0; i < n; ++i) {
                prefix0[i] += static_cast<std::int64_t>(rows.x0[r][i]) * best_w;
                prefix1[i] += static_cast<std::int64_t>(rows.x1[r][i]) * best_w;
            }
        }
        entry.score = entry.row_scores.back();
        chain.entries.push_back(std::move(entry));

        in.x0 = rows.x0[0];
        in.x1 = rows.x1[0];
        in.window = &windows[0];
    }
    std::sort(chain.entries.begin(), chain.entries.end(), entry_before);
    return chain;
}

std::vector<GuessChain> conventional_2d_attack(const TraceMatrix &traces,
                                               const ArrayConfig &cfg,
                                               const AttackConfig &acfg) {
    std::vector<GuessChain> out;
    out.reserve(cfg.cols);
    for (unsigned c = 0; c < cfg.cols; ++c)
        out.push_back(chained_column_attack(traces, cfg, c, acfg));
    return out;
}

TraceMatrix make_template_traces(const WeightMatrix &profile,
                                 std::span<const InputBatch> inputs,
                                 const ArrayConfig &cfg,
                                 const PowerCoefficients &coeffs,
                                 const NoiseSpec &noise, Exec exec) {
    for (std::size_t n = 0; n < inputs.size(); ++n)
        if (inputs[n].vectors() != cfg.batch || inputs[n].rows() != cfg.rows)
            throw AlignmentError("input batch " + std::to_string(n) +
                                 " does not fit the profiled array");
    return synthesize_traces(cfg, profile, inputs, coeffs, noise, exec);
}

TraceMatrix subtract_template(const TraceMatrix &target, const TraceMatrix &templates) {
    if (target.num_traces() != templates.num_traces() ||
        target.samples_per_trace() != templates.samples_per_trace())
        throw ShapeError("template set is " + std::to_string(templates.num_traces()) +
                         "x" + std::to_string(templates.samples_per_trace()) +
                         ", target is " + std::to_string(target.num_traces()) + "x" +
                         std::to_string(target.samples_per_trace()));
    if (target.inputs() != templates.inputs())
        throw AlignmentError("templates were not recorded on the target's inputs");
    std::vector<double> diff(target.samples().size());
    const auto a = target.samples();
    const auto b = templates.samples();
    for (std::size_t i = 0; i < diff.size(); ++i)
        diff[i] = a[i] - b[i];
    return TraceMatrix(target.samples_per_trace(), target.inputs(), std::move(diff));
}

Profiler simulated_profiler(const ArrayConfig &cfg, const PowerCoefficients &coeffs,
                            const NoiseSpec &noise) {
    return [cfg, coeffs, noise](const WeightMatrix &profile,
                                std::span<const InputBatch> inputs) {
        return make_template_traces(profile, inputs, cfg, coeffs, noise);
    };
}

MultiphaseResult multiphase_attack(const TraceMatrix &traces, const ArrayConfig &cfg,
                                   const AttackConfig &acfg, const Profiler &profiler,
                                   PhaseOrder order) {
    cfg.validate();
    std::vector<unsigned> columns(cfg.cols);
    for (unsigned i = 0; i < cfg.cols; ++i)
        columns[i] = order == PhaseOrder::right_to_left ? cfg.cols - 1 - i : i;

    MultiphaseResult result{WeightMatrix::zeros(cfg.rows, cfg.cols), {}};
    for (std::size_t phase = 0; phase < columns.size(); ++phase) {
        const unsigned col = columns[phase];
        GuessChain chain;
        try {
            if (phase == 0) {
                chain = chained_column_attack(traces, cfg, col, acfg);
            } else {
                const TraceMatrix templates = profiler(result.weights, traces.inputs());
                chain = chained_column_attack(subtract_template(traces, templates), cfg,
                                              col, acfg);
            }
        } catch (const DegenerateAttackError &e) {
            throw PhaseFailureError("phase " + std::to_string(phase + 1) + " (column " +
                                        std::to_string(col) + ") failed: " + e.what(),
                                    result);
        }
        result.weights.set_column(col, chain.best().weights);
        result.phases.push_back({col, std::move(chain)});
    }
    return result;
}

MtdReport mtd_sweep(const ColumnAttack &attack, const TraceMatrix &traces,
                    std::size_t step, std::span<const std::int8_t> truth,
                    bool stop_at_first, std::size_t max_traces) {
    if (step == 0)
        throw PreconditionError("MTD step must be positive");
    if (traces.num_traces() < step)
        throw PreconditionError("MTD sweep needs at least one step of traces");
    const std::size_t limit =
        max_traces ? std::min(max_traces, traces.num_traces()) : traces.num_traces();

    MtdReport report;
    report.step = step;
    for (std::size_t count = step; count <= limit; count += step) {
        MtdPoint point{count, std::nullopt};
        try {
            point.rank = attack(traces.prefix(count)).rank_of(truth);
        } catch (const DegenerateAttackError &) {
        } catch (const InsufficientDataError &) {
        }
        report.points.push_back(point);
        if (point.rank == std::size_t{1} && !report.mtd) {
            report.mtd = count;
            if (stop_at_first)
                break;
        }
    }
    return report;
}

} // namespace sysdpa
