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
#include "sysdpa/errors.hpp"
#include "sysdpa/kernels.hpp"
#include "sysdpa/rng.hpp"

#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>

using namespace sysdpa;

namespace {

std::vector<InputBatch> random_inputs(std::uint64_t seed, std::size_t n, unsigned vectors,
                                      unsigned rows) {
    SplitMix64 rng(seed);
    std::vector<InputBatch> out;
    for (std::size_t i = 0; i < n; ++i) {
        InputBatch x(vectors, rows);
        for (unsigned v = 0; v < vectors; ++v)
            for (unsigned r = 0; r < rows; ++r)
                x.set(v, r, static_cast<std::int8_t>(rng() & 0xff));
        out.push_back(x);
    }
    return out;
}

TraceMatrix random_traces(std::uint64_t seed, std::size_t n, std::size_t t) {
    SplitMix64 rng(seed);
    std::vector<double> s(n * t);
    for (double &v : s)
        v = rng.gaussian() * 3.0 + 10.0;
    return TraceMatrix(t, std::vector<InputBatch>(n, InputBatch(2, 1)), std::move(s));
}

// Textbook two-pass Pearson in long double.
double pearson_oracle(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

class ThreadCounts : public ::testing::TestWithParam<int> {
  protected:
    void SetUp() override {
        saved_ = omp_get_max_threads();
        omp_set_num_threads(GetParam());
    }
    void TearDown() override { omp_set_num_threads(saved_); }

  private:
    int saved_ = 1;
};

} // namespace

TEST_P(ThreadCounts, PearsonSerialEqualsOmpBitwise) {
    const auto traces = random_traces(1, 500, 6);
    SplitMix64 rng(2);
    std::vector<double> hyp(256 * 500);
    for (double &h : hyp)
        h = static_cast<double>(rng() % 25);
    const auto a = kernels::pearson_serial(hyp, 256, traces);
    const auto b = kernels::pearson_omp(hyp, 256, traces);
    EXPECT_EQ(a.rho, b.rho);
    EXPECT_EQ(a.defined, b.defined);
}

TEST_P(ThreadCounts, ScoreGuessesSerialEqualsOmpBitwise) {
    const std::size_t n = 2000;
    const auto inputs = random_inputs(3, n, 2, 1);
    const auto traces = random_traces(4, n, 5);
    const auto window = kernels::center_columns(traces, 1, 4);
    SplitMix64 rng(5);
    std::vector<std::int64_t> p0(n), p1(n);
    std::vector<std::int8_t> x0(n), x1(n);
    for (std::size_t i = 0; i < n; ++i) {
        p0[i] = static_cast<std::int64_t>(rng() % 60000) - 30000;
        p1[i] = static_cast<std::int64_t>(rng() % 60000) - 30000;
        x0[i] = inputs[i].at(0, 0);
        x1[i] = inputs[i].at(1, 0);
    }
    for (auto model : {LeakageModel::hamming_distance, LeakageModel::hamming_weight,
                       LeakageModel::bit}) {
        const kernels::GuessScoringInput in{p0, p1, x0, x1, &window, 24, {model, 3}};
        const auto a = kernels::score_guesses_serial(in);
        const auto b = kernels::score_guesses_omp(in);
        EXPECT_EQ(a.rho, b.rho);
        EXPECT_EQ(a.defined, b.defined);
    }
}

TEST_P(ThreadCounts, SynthesisSerialEqualsOmpBitwise) {
    const ArrayConfig cfg{3, 3, 3, 24};
    const WeightMatrix w{{23, 120, -6}, {-107, 73, -31}, {74, -96, 17}};
    const auto inputs = random_inputs(6, 3000, 3, 3);
    const auto coeffs = PowerCoefficients::defaults(cfg);
    const NoiseSpec noise{2.5, 77};
    const auto a = kernels::synthesize_serial(cfg, w, inputs, coeffs, noise);
    const auto b = kernels::synthesize_omp(cfg, w, inputs, coeffs, noise);
    EXPECT_EQ(a, b);
    EXPECT_EQ(synthesize_traces(cfg, w, inputs, coeffs, noise, Exec::serial),
              synthesize_traces(cfg, w, inputs, coeffs, noise, Exec::parallel));
}

TEST_P(ThreadCounts, ChainedAttackIndependentOfThreads) {
    const ArrayConfig cfg{3, 1, 3, 24};
    const WeightMatrix w{{120}, {73}, {-96}};
    const auto inputs = random_inputs(8, 3000, 3, 3);
    const auto traces =
        synthesize_traces(cfg, w, inputs, PowerCoefficients::defaults(cfg), {1.0, 5});
    AttackConfig serial;
    serial.exec = Exec::serial;
    AttackConfig parallel;
    const auto a = chained_column_attack(traces, cfg, 0, serial);
    const auto b = chained_column_attack(traces, cfg, 0, parallel);
    ASSERT_EQ(a.entries.size(), b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        EXPECT_EQ(a.entries[i].weights, b.entries[i].weights);
        EXPECT_EQ(a.entries[i].row_scores, b.entries[i].row_scores);
    }
}

INSTANTIATE_TEST_SUITE_P(Kernels, ThreadCounts, ::testing::Values(1, 2, 4, 7));

TEST(Pearson, MatchesTwoPassOracle) {
    SplitMix64 rng(10);
    for (int inst = 0; inst < 20; ++inst) {
        const std::size_t n = 100;
        const auto traces = random_traces(100 + inst, n, 8);
        HypothesisMatrix hyp(n);
        for (unsigned g = 0; g < 256; ++g)
            for (std::size_t i = 0; i < n; ++i)
                hyp.at(g, i) = static_cast<double>(rng() % 17);
        const auto rho = pearson_corr(hyp, traces);
        for (unsigned g = 0; g < 256; ++g)
            for (std::size_t t = 0; t < 8; ++t) {
                ASSERT_TRUE(rho.defined(g, t));
                const auto col = traces.column(t);
                ASSERT_NEAR(rho.at(g, t), pearson_oracle(hyp.row(g), col), 1e-12);
            }
    }
}

TEST(Pearson, CopyAndNegation) {
    const std::size_t n = 64;
    const auto traces = random_traces(3, n, 4);
    HypothesisMatrix hyp(n);
    const auto col = traces.column(2);
    for (std::size_t i = 0; i < n; ++i) {
        hyp.at(1, i) = col[i];
        hyp.at(2, i) = -col[i];
        hyp.at(3, i) = static_cast<double>(i % 5);
    }
    const auto rho = pearson_corr(hyp, traces);
    EXPECT_NEAR(rho.at(1, 2), 1.0, 1e-15);
    EXPECT_NEAR(rho.at(2, 2), -1.0, 1e-15);
    EXPECT_LE(rho.at(1, 2), 1.0);
    EXPECT_FALSE(rho.defined(0, 0));
    EXPECT_EQ(rho.at(0, 0), 0.0);
}

TEST(Pearson, ConstantColumnIsUndefined) {
    auto traces = random_traces(4, 50, 3);
    for (std::size_t i = 0; i < 50; ++i)
        traces.at(i, 1) = 7.0;
    HypothesisMatrix hyp(50);
    for (std::size_t i = 0; i < 50; ++i)
        hyp.at(9, i) = static_cast<double>(i);
    const auto rho = pearson_corr(hyp, traces);
    EXPECT_FALSE(rho.defined(9, 1));
    EXPECT_TRUE(rho.defined(9, 0));
    for (unsigned g = 0; g < 256; ++g)
        for (std::size_t t = 0; t < 3; ++t)
            EXPECT_FALSE(std::isnan(rho.at(g, t)));
}

TEST(Pearson, AffineInvariance) {
    const std::size_t n = 300;
    const auto traces = random_traces(5, n, 4);
    SplitMix64 rng(6);
    HypothesisMatrix hyp(n);
    for (unsigned g = 0; g < 256; ++g)
        for (std::size_t i = 0; i < n; ++i)
            hyp.at(g, i) = static_cast<double>(rng() % 24);
    std::vector<double> scaled(traces.samples().begin(), traces.samples().end());
    for (double &s : scaled)
        s = 3.7 * s + 1234.5;
    const TraceMatrix moved(4, traces.inputs(), scaled);
    const auto a = pearson_corr(hyp, traces);
    const auto b = pearson_corr(hyp, moved);
    for (unsigned g = 0; g < 256; ++g)
        for (std::size_t t = 0; t < 4; ++t)
            EXPECT_NEAR(a.at(g, t), b.at(g, t), 1e-10);
}

TEST(Pearson, Errors) {
    const auto one = random_traces(1, 1, 3);
    EXPECT_THROW(pearson_corr(HypothesisMatrix(1), one), InsufficientDataError);
    const auto two = random_traces(1, 2, 3);
    EXPECT_THROW(pearson_corr(HypothesisMatrix(3), two), ShapeError);
    EXPECT_THROW(kernels::center_columns(two, 2, 4), IndexError);
}

TEST(ScoreGuesses, AgreesWithHypothesisThenPearson) {
    const std::size_t n = 1500;
    const ArrayConfig cfg{3, 1, 3, 24};
    const auto inputs = random_inputs(12, n, 3, 3);
    const auto traces = synthesize_traces(cfg, WeightMatrix{{120}, {73}, {-96}}, inputs,
                                          PowerCoefficients::defaults(cfg), {0.5, 1});
    const std::vector<std::int8_t> known{120, 73};
    const unsigned row = 2;
    const auto rho = pearson_corr(hypothesis_hd(inputs, known, row), traces);

    std::vector<std::int64_t> p0(n), p1(n);
    std::vector<std::int8_t> x0(n), x1(n);
    for (std::size_t i = 0; i < n; ++i) {
        p0[i] = 120 * inputs[i].at(0, 0) + 73 * inputs[i].at(0, 1);
        p1[i] = 120 * inputs[i].at(1, 0) + 73 * inputs[i].at(1, 1);
        x0[i] = inputs[i].at(0, 2);
        x1[i] = inputs[i].at(1, 2);
    }
    const auto window = kernels::center_columns(traces, 0, 5);
    const kernels::GuessScoringInput in{p0, p1, x0, x1, &window, 24, {}};
    const auto block = kernels::score_guesses(in, Exec::parallel);
    for (unsigned g = 0; g < 256; ++g)
        for (std::size_t t = 0; t < 5; ++t) {
            ASSERT_EQ(block.defined[g * 5 + t] != 0, rho.defined(g, t));
            ASSERT_NEAR(block.rho[g * 5 + t], rho.at(g, t), 1e-12);
        }
}
