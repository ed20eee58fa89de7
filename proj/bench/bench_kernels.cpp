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

// Serial reference kernels against their OpenMP counterparts.
// Argument: number of traces.

#include "sysdpa/kernels.hpp"
#include "sysdpa/trace_io.hpp"

#include <benchmark/benchmark.h>

using namespace sysdpa;

namespace {

const ArrayConfig kCfg{3, 3, 3, 24};
const WeightMatrix kGrid{{23, 120, -6}, {-107, 73, -31}, {74, -96, 17}};

TraceMatrix corpus(std::size_t n) {
    return synthesize_traces(kCfg, kGrid, gen_inputs(1, n, kCfg),
                             PowerCoefficients::defaults(kCfg), {2.0, 2});
}

template <bool Parallel>
void BM_ScoreGuesses(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const TraceMatrix traces = corpus(n);
    std::vector<std::int64_t> prefix(n, 0);
    std::vector<std::int8_t> x0(n), x1(n);
    for (std::size_t i = 0; i < n; ++i) {
        x0[i] = traces.inputs()[i].at(0, 0);
        x1[i] = traces.inputs()[i].at(1, 0);
    }
    const auto window = kernels::center_columns(traces, 0, 1);
    const kernels::GuessScoringInput in{prefix, prefix, x0, x1, &window, kCfg.psum_width, {}};
    for (auto _ : state)
        benchmark::DoNotOptimize(Parallel ? kernels::score_guesses_omp(in)
                                          : kernels::score_guesses_serial(in));
    state.SetItemsProcessed(state.iterations() * 256 * static_cast<std::int64_t>(n));
}

template <bool Parallel>
void BM_Pearson(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const TraceMatrix traces = corpus(n);
    const HypothesisMatrix h = hypothesis_hd(traces.inputs(), {}, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(Parallel ? kernels::pearson_omp(h.data(), 256, traces)
                                          : kernels::pearson_serial(h.data(), 256, traces));
    state.SetItemsProcessed(state.iterations() * 256 * static_cast<std::int64_t>(n));
}

template <bool Parallel>
void BM_Synthesize(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto inputs = gen_inputs(1, n, kCfg);
    const auto coeffs = PowerCoefficients::defaults(kCfg);
    const NoiseSpec noise{2.0, 3};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            Parallel ? kernels::synthesize_omp(kCfg, kGrid, inputs, coeffs, noise)
                     : kernels::synthesize_serial(kCfg, kGrid, inputs, coeffs, noise));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

} // namespace

BENCHMARK(BM_ScoreGuesses<false>)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScoreGuesses<true>)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pearson<false>)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pearson<true>)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Synthesize<false>)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Synthesize<true>)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
