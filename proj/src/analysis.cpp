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

#include "sysdpa/analysis.hpp"
#include "sysdpa/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sysdpa {

namespace {

struct CenteredRow {
    std::vector<double> v;
    double norm2 = 0.0;
    bool constant = true;
};

CenteredRow center(std::span<const double> x) {
    CenteredRow out;
    double mean = 0.0;
    for (double e : x)
        mean += e;
    mean /= static_cast<double>(x.size());
    out.v.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out.v[i] = x[i] - mean;
        out.norm2 += out.v[i] * out.v[i];
        if (x[i] != x[0])
            out.constant = false;
    }
    return out;
}

double correlate(const CenteredRow &a, const CenteredRow &b) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i)
        dot += a.v[i] * b.v[i];
    return std::clamp(dot / std::sqrt(a.norm2 * b.norm2), -1.0, 1.0);
}

} // namespace

AliasingMap model_aliasing(std::span<const InputBatch> inputs,
                           std::span<const std::int8_t> known_prior, unsigned row,
                           unsigned psum_width, const LeakageSpec &leakage, Exec exec) {
    if (inputs.size() < 2)
        throw InsufficientDataError("aliasing needs at least 2 input batches");
    const HypothesisMatrix h =
        hypothesis_matrix(inputs, known_prior, row, psum_width, leakage);
    constexpr int kGuesses = HypothesisMatrix::kGuesses;

    std::vector<CenteredRow> rows(kGuesses);
    for (int g = 0; g < kGuesses; ++g)
        rows[g] = center(h.row(g));

    AliasingMap map(kGuesses);
    std::vector<double> upper(kGuesses * kGuesses, 0.0);
#pragma omp parallel for schedule(dynamic, 4) if (exec == Exec::parallel)
    for (int i = 0; i < kGuesses; ++i)
        for (int j = i + 1; j < kGuesses; ++j)
            if (!rows[i].constant && !rows[j].constant)
                upper[i * kGuesses + j] = correlate(rows[i], rows[j]);

    for (int i = 0; i < kGuesses; ++i) {
        map.set(i, i, rows[i].constant ? 0.0 : 1.0, !rows[i].constant);
        for (int j = i + 1; j < kGuesses; ++j) {
            const bool ok = !rows[i].constant && !rows[j].constant;
            map.set(i, j, upper[i * kGuesses + j], ok);
        }
    }
    return map;
}

double median_abs_off_diagonal(const SymmetricTable &table) {
    std::vector<double> v;
    for (std::size_t i = 0; i < table.size(); ++i)
        for (std::size_t j = i + 1; j < table.size(); ++j)
            if (table.defined(i, j))
                v.push_back(std::abs(table.at(i, j)));
    if (v.empty())
        return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    if (v.size() % 2)
        return v[mid];
    const double upper = v[mid];
    const double lower = *std::max_element(v.begin(), v.begin() + mid);
    return 0.5 * (lower + upper);
}

unsigned pe_number(const ArrayConfig &cfg, unsigned r, unsigned c) {
    if (r >= cfg.rows || c >= cfg.cols)
        throw IndexError("PE position outside the array");
    return r * cfg.cols + c + 1;
}

std::pair<unsigned, unsigned> pe_position(const ArrayConfig &cfg, unsigned number) {
    if (number < 1 || number > cfg.num_pes())
        throw IndexError("PE number " + std::to_string(number) + " outside the array");
    return {(number - 1) / cfg.cols, (number - 1) % cfg.cols};
}

PECorrelationTable pe_hd_correlation(const ArrayConfig &cfg, const WeightMatrix &w,
                                     std::span<const InputBatch> inputs,
                                     CycleSelection cycles, Exec exec) {
    cfg.validate();
    if (inputs.size() < 2)
        throw InsufficientDataError("PE correlation needs at least 2 batches");
    if (w.rows() != cfg.rows || w.cols() != cfg.cols)
        throw ShapeError("weight matrix does not match the array");
    for (const auto &x : inputs)
        if (x.vectors() != cfg.batch || x.rows() != cfg.rows)
            throw ShapeError("input batch shape does not match the array");
    const unsigned pes = cfg.num_pes();
    const unsigned t_len = cfg.total_cycles();
    const std::size_t n = inputs.size();

    // hd[(pe * T + t) * N + batch]: Reg C switching of every PE and cycle.
    std::vector<std::uint8_t> hd(static_cast<std::size_t>(pes) * t_len * n, 0);
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
    for (long long b = 0; b < count; ++b) {
        const RegisterTimeline tl = simulate_batch(cfg, w, inputs[b]);
        for (unsigned r = 0; r < cfg.rows; ++r)
            for (unsigned c = 0; c < cfg.cols; ++c) {
                const unsigned pe = r * cfg.cols + c;
                for (unsigned t = 0; t < t_len; ++t) {
                    const std::uint64_t prev = t ? tl.reg_c(r, c, t - 1) : 0;
                    hd[(static_cast<std::size_t>(pe) * t_len + t) * n + b] =
                        static_cast<std::uint8_t>(hamming_distance(prev, tl.reg_c(r, c, t)));
                }
            }
    }

    auto selected = [&](unsigned pe, unsigned t) {
        const unsigned r = pe / cfg.cols;
        const unsigned c = pe % cfg.cols;
        const unsigned first = r + c;
        if (t < first || t >= first + cfg.batch)
            return false;
        return cycles == CycleSelection::shared_active || t > first;
    };
    auto series = [&](unsigned pe, unsigned t) {
        const std::uint8_t *p = hd.data() + (static_cast<std::size_t>(pe) * t_len + t) * n;
        return center(std::vector<double>(p, p + n));
    };

    std::vector<std::pair<unsigned, unsigned>> pairs;
    for (unsigned i = 0; i < pes; ++i)
        for (unsigned j = i; j < pes; ++j)
            pairs.emplace_back(i, j);

    struct Best {
        double value = 0.0;
        int cycle = -1;
    };
    std::vector<Best> best(pairs.size());
    const auto num_pairs = static_cast<long long>(pairs.size());
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
    for (long long k = 0; k < num_pairs; ++k) {
        const auto [i, j] = pairs[k];
        for (unsigned t = 0; t < t_len; ++t) {
            if (!selected(i, t) || !selected(j, t))
                continue;
            const CenteredRow a = series(i, t);
            if (a.constant)
                continue;
            double v = 1.0;
            if (i != j) {
                const CenteredRow b = series(j, t);
                if (b.constant)
                    continue;
                v = correlate(a, b);
            }
            if (best[k].cycle < 0 || std::abs(v) > std::abs(best[k].value))
                best[k] = {v, static_cast<int>(t)};
        }
    }

    PECorrelationTable table(pes);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto [i, j] = pairs[k];
        table.set(i, j, best[k].value, best[k].cycle >= 0);
        table.set_cycle(i, j, best[k].cycle);
    }
    return table;
}

} // namespace sysdpa
