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
#include "sysdpa/trace_io.hpp"

#include <gtest/gtest.h>

using namespace sysdpa;

namespace {

const WeightMatrix kGrid{{23, 120, -6}, {-107, 73, -31}, {74, -96, 17}};
const WeightMatrix kDot{{120}, {73}, {-96}};
const ArrayConfig kDotCfg{3, 1, 3, 24};
const ArrayConfig kGridCfg{3, 3, 3, 24};

TraceMatrix simulate(const ArrayConfig &cfg, const WeightMatrix &w, std::size_t n,
                     std::uint64_t seed, double sigma = 0.0) {
    return synthesize_traces(cfg, w, gen_inputs(seed, n, cfg),
                             PowerCoefficients::defaults(cfg), {sigma, seed + 1});
}

GuessChain fake_chain(std::vector<std::int8_t> best) {
    GuessChain c;
    c.capacity = 1;
    c.entries.push_back({std::move(best), 0.5, {0.5}});
    return c;
}

} // namespace

TEST(ChainedAttack, RecoversDotProductWeights) {
    const auto traces = simulate(kDotCfg, kDot, 10000, 1);
    const GuessChain chain = chained_column_attack(traces, kDotCfg, 0);
    EXPECT_EQ(chain.best().weights, kDot.column(0));
    EXPECT_EQ(chain.rank_of(kDot.column(0)), std::size_t{1});
    EXPECT_EQ(chain.entries.size(), 50u);
    EXPECT_EQ(chain.capacity, 50u);
    for (std::size_t i = 1; i < chain.entries.size(); ++i)
        EXPECT_GE(chain.entries[i - 1].score, chain.entries[i].score);
    for (const auto &e : chain.entries) {
        EXPECT_EQ(e.weights.size(), 3u);
        EXPECT_EQ(e.row_scores.size(), 3u);
        EXPECT_EQ(e.score, e.row_scores.back());
    }
}

TEST(ChainedAttack, BeamWidthDoesNotChangeTheWinner) {
    const auto traces = simulate(kDotCfg, kDot, 6000, 2);
    AttackConfig narrow;
    AttackConfig wide;
    wide.beam = 256;
    const auto a = chained_column_attack(traces, kDotCfg, 0, narrow);
    const auto b = chained_column_attack(traces, kDotCfg, 0, wide);
    EXPECT_EQ(b.entries.size(), 256u);
    EXPECT_EQ(a.best().weights, b.best().weights);
    EXPECT_EQ(a.best().score, b.best().score);
}

TEST(ChainedAttack, EqualScoresOrderBySmallerWeights) {
    const auto traces = simulate(kDotCfg, kDot, 300, 3);
    AttackConfig acfg;
    acfg.beam = 256;
    const auto chain = chained_column_attack(traces, kDotCfg, 0, acfg);
    for (std::size_t i = 1; i < chain.entries.size(); ++i)
        if (chain.entries[i - 1].score == chain.entries[i].score) {
            EXPECT_LT(chain.entries[i - 1].weights, chain.entries[i].weights);
        }
}

TEST(ChainedAttack, InvariantUnderAffineTraceChange) {
    auto traces = simulate(kDotCfg, kDot, 4000, 4, 2.0);
    const auto before = chained_column_attack(traces, kDotCfg, 0);
    for (double &s : traces.samples())
        s = 0.25 * s - 40.0;
    const auto after = chained_column_attack(traces, kDotCfg, 0);
    ASSERT_EQ(before.entries.size(), after.entries.size());
    for (std::size_t i = 0; i < before.entries.size(); ++i) {
        EXPECT_EQ(before.entries[i].weights, after.entries[i].weights);
        EXPECT_NEAR(before.entries[i].score, after.entries[i].score, 1e-10);
    }
}

TEST(ChainedAttack, AbsoluteScoreMode) {
    const auto traces = simulate(kDotCfg, kDot, 10000, 1);
    AttackConfig acfg;
    acfg.score = ScoreMode::absolute_max;
    const auto chain = chained_column_attack(traces, kDotCfg, 0, acfg);
    for (const auto &e : chain.entries)
        for (double s : e.row_scores)
            EXPECT_GE(s, 0.0);
    EXPECT_TRUE(chain.rank_of(kDot.column(0)).has_value());
}

TEST(ChainedAttack, SilentDeviceIsDegenerate) {
    const auto inputs = gen_inputs(5, 500, kDotCfg);
    const auto coeffs = PowerCoefficients::defaults(kDotCfg).reg_c_only();
    const auto traces = synthesize_traces(kDotCfg, WeightMatrix::zeros(3, 1), inputs, coeffs);
    EXPECT_THROW(chained_column_attack(traces, kDotCfg, 0), DegenerateAttackError);
}

TEST(ChainedAttack, ZeroWeightDeviceHidesTheZeroChain) {
    const auto traces = simulate(kDotCfg, WeightMatrix::zeros(3, 1), 2000, 6);
    const auto chain = chained_column_attack(traces, kDotCfg, 0);
    const std::vector<std::int8_t> zeros(3, 0);
    EXPECT_FALSE(chain.rank_of(zeros).has_value());
}

TEST(ChainedAttack, OversampledTracesUseWiderWindows) {
    const auto base = simulate(kDotCfg, kDot, 10000, 1);
    const unsigned spc = 4;
    std::vector<double> samples;
    for (std::size_t n = 0; n < base.num_traces(); ++n)
        for (double s : base.trace(n))
            for (unsigned k = 0; k < spc; ++k)
                samples.push_back(k == 1 ? s : 0.5 * s + static_cast<double>(k));
    const TraceMatrix wide(base.samples_per_trace() * spc, base.inputs(), samples);
    AttackConfig acfg;
    acfg.samples_per_cycle = spc;
    EXPECT_EQ(chained_column_attack(wide, kDotCfg, 0, acfg).rank_of(kDot.column(0)),
              std::size_t{1});
    AttackConfig explicit_windows;
    explicit_windows.row_windows = {{4, 8}, {8, 12}, {12, 16}};
    EXPECT_EQ(chained_column_attack(wide, kDotCfg, 0, explicit_windows).best().weights,
              kDot.column(0));
}

TEST(ChainedAttack, Preconditions) {
    const auto traces = simulate(kDotCfg, kDot, 100, 7);
    EXPECT_THROW(chained_column_attack(traces, kDotCfg, 1), IndexError);
    EXPECT_THROW(chained_column_attack(traces.prefix(1), kDotCfg, 0), InsufficientDataError);
    AttackConfig bad;
    bad.beam = 0;
    EXPECT_THROW(chained_column_attack(traces, kDotCfg, 0, bad), PreconditionError);
    AttackConfig late;
    late.row_windows = {{0, 1}, {1, 2}, {5, 9}};
    EXPECT_THROW(chained_column_attack(traces, kDotCfg, 0, late), PreconditionError);
    EXPECT_THROW(chained_column_attack(traces, kGridCfg, 0), ShapeError);
}

TEST(Conventional2d, LastColumnFallsFirst) {
    const auto traces = simulate(kGridCfg, kGrid, 50000, 8);
    const auto chains = conventional_2d_attack(traces, kGridCfg);
    ASSERT_EQ(chains.size(), 3u);
    EXPECT_EQ(chains[2].rank_of(kGrid.column(2)), std::size_t{1});
    for (unsigned c = 0; c < 3; ++c)
        EXPECT_EQ(chains[c].column, c);
}

TEST(Templates, ProfileEqualToTargetCancels) {
    const auto inputs = gen_inputs(9, 200, kGridCfg);
    const auto coeffs = PowerCoefficients::defaults(kGridCfg);
    const auto target = synthesize_traces(kGridCfg, kGrid, inputs, coeffs);
    const auto same = make_template_traces(kGrid, inputs, kGridCfg, coeffs);
    const auto residual = subtract_template(target, same);
    for (double s : residual.samples())
        EXPECT_EQ(s, 0.0);
    EXPECT_EQ(residual.inputs(), target.inputs());
}

TEST(Templates, ZeroProfileLeavesRegCPower) {
    const auto inputs = gen_inputs(10, 300, kGridCfg);
    const auto coeffs = PowerCoefficients::defaults(kGridCfg);
    const auto target = synthesize_traces(kGridCfg, kGrid, inputs, coeffs);
    const auto zero = make_template_traces(WeightMatrix::zeros(3, 3), inputs, kGridCfg, coeffs);
    const auto reg_c = synthesize_traces(kGridCfg, kGrid, inputs, coeffs.reg_c_only());
    const auto residual = subtract_template(target, zero);
    EXPECT_EQ(residual, reg_c);
    for (double s : zero.samples())
        EXPECT_GE(s, 0.0);

    std::vector<double> zeros(target.samples().size(), 0.0);
    const TraceMatrix nothing(target.samples_per_trace(), target.inputs(), zeros);
    EXPECT_EQ(subtract_template(residual, nothing), residual);
}

TEST(Templates, AlignmentErrors) {
    const auto coeffs = PowerCoefficients::defaults(kGridCfg);
    const auto a = synthesize_traces(kGridCfg, kGrid, gen_inputs(1, 50, kGridCfg), coeffs);
    const auto b = synthesize_traces(kGridCfg, kGrid, gen_inputs(2, 50, kGridCfg), coeffs);
    EXPECT_THROW(subtract_template(a, b), AlignmentError);
    EXPECT_THROW(subtract_template(a, a.prefix(10)), ShapeError);
    const auto wrong = gen_inputs(1, 5, ArrayConfig{2, 1, 3, 24});
    EXPECT_THROW(make_template_traces(kGrid, wrong, kGridCfg, coeffs), AlignmentError);
}

// Before each phase, the residual equals direct Reg C synthesis of the
// columns that are still unknown.
TEST(Multiphase, ResidualsAreExactlyTheUnknownColumns) {
    const auto inputs = gen_inputs(11, 400, kGridCfg);
    const auto coeffs = PowerCoefficients::defaults(kGridCfg);
    const auto target = synthesize_traces(kGridCfg, kGrid, inputs, coeffs);
    const Profiler profiler = simulated_profiler(kGridCfg, coeffs);
    for (unsigned known_from = 1; known_from <= 2; ++known_from) {
        WeightMatrix recovered = WeightMatrix::zeros(3, 3);
        WeightMatrix unknown = kGrid;
        for (unsigned c = known_from; c < 3; ++c) {
            recovered.set_column(c, kGrid.column(c));
            unknown.set_column(c, std::vector<std::int8_t>(3, 0));
        }
        const auto residual = subtract_template(target, profiler(recovered, inputs));
        EXPECT_EQ(residual, synthesize_traces(kGridCfg, unknown, inputs, coeffs.reg_c_only()));
    }
}

TEST(Multiphase, SingleCellArrayNeedsNoTemplates) {
    const ArrayConfig cfg{1, 1, 3, 24};
    const auto traces = synthesize_traces(cfg, WeightMatrix{{-77}}, gen_inputs(12, 5000, cfg),
                                          PowerCoefficients::defaults(cfg));
    int calls = 0;
    const Profiler counting = [&](const WeightMatrix &w, std::span<const InputBatch> in) {
        ++calls;
        return make_template_traces(w, in, cfg, PowerCoefficients::defaults(cfg));
    };
    const auto res = multiphase_attack(traces, cfg, {}, counting);
    EXPECT_EQ(calls, 0);
    ASSERT_EQ(res.phases.size(), 1u);
    EXPECT_EQ(res.weights.at(0, 0), -77);
    EXPECT_EQ(res.phases[0].chain.best().weights,
              chained_column_attack(traces, cfg, 0).best().weights);
}

TEST(Multiphase, RecoversTheGridRightToLeftOnly) {
    const auto traces = simulate(kGridCfg, kGrid, 50000, 13);
    const Profiler profiler = simulated_profiler(kGridCfg, PowerCoefficients::defaults(kGridCfg));
    const auto rtl = multiphase_attack(traces, kGridCfg, {}, profiler);
    EXPECT_EQ(rtl.weights, kGrid);
    ASSERT_EQ(rtl.phases.size(), 3u);
    EXPECT_EQ(rtl.phases[0].column, 2u);
    EXPECT_EQ(rtl.phases[2].column, 0u);
    for (const auto &ph : rtl.phases)
        EXPECT_EQ(ph.chain.rank_of(kGrid.column(ph.column)), std::size_t{1});

    const auto ltr = multiphase_attack(traces, kGridCfg, {}, profiler, PhaseOrder::left_to_right);
    EXPECT_EQ(ltr.phases[0].column, 0u);
    EXPECT_NE(ltr.phases[0].chain.rank_of(kGrid.column(0)), std::size_t{1});
    EXPECT_NE(ltr.weights, kGrid);
}

TEST(Multiphase, DegeneratePhaseCarriesPartialResult) {
    const WeightMatrix w{{0, 0, 90}, {0, 0, -45}, {0, 0, 33}};
    const auto inputs = gen_inputs(14, 5000, kGridCfg);
    const auto coeffs = PowerCoefficients::defaults(kGridCfg).reg_c_only();
    const auto traces = synthesize_traces(kGridCfg, w, inputs, coeffs);
    try {
        multiphase_attack(traces, kGridCfg, {}, simulated_profiler(kGridCfg, coeffs));
        FAIL() << "expected a phase failure";
    } catch (const PhaseFailureError &e) {
        ASSERT_EQ(e.partial().phases.size(), 1u);
        EXPECT_EQ(e.partial().weights.column(2), w.column(2));
    }
}

TEST(MtdSweep, StopsAtFirstRankOne) {
    const auto traces = simulate(kDotCfg, kDot, 50, 15);
    const std::vector<std::int8_t> truth{1, 2, 3};
    std::vector<std::size_t> seen;
    const ColumnAttack attack = [&](const TraceMatrix &t) {
        seen.push_back(t.num_traces());
        return fake_chain(t.num_traces() >= 30 ? truth : std::vector<std::int8_t>{0, 0, 0});
    };
    const auto rep = mtd_sweep(attack, traces, 10, truth);
    EXPECT_EQ(rep.mtd, std::size_t{30});
    EXPECT_EQ(seen, (std::vector<std::size_t>{10, 20, 30}));
    EXPECT_EQ(rep.points.size(), 3u);
    EXPECT_FALSE(rep.points[0].rank.has_value());

    seen.clear();
    const auto full = mtd_sweep(attack, traces, 10, truth, false);
    EXPECT_EQ(full.points.size(), 5u);
    EXPECT_EQ(full.mtd, std::size_t{30});

    const auto capped = mtd_sweep(attack, traces, 10, truth, true, 25);
    EXPECT_FALSE(capped.mtd.has_value());
    EXPECT_EQ(capped.points.size(), 2u);
}

TEST(MtdSweep, NeverSucceedingIsNa) {
    const auto traces = simulate(kDotCfg, kDot, 40, 16);
    const ColumnAttack never = [](const TraceMatrix &) -> GuessChain {
        throw DegenerateAttackError("nothing to see");
    };
    const auto rep = mtd_sweep(never, traces, 10, std::vector<std::int8_t>{1, 2, 3});
    EXPECT_FALSE(rep.mtd.has_value());
    EXPECT_EQ(rep.points.size(), 4u);
    EXPECT_THROW(mtd_sweep(never, traces, 0, std::vector<std::int8_t>{}), PreconditionError);
    EXPECT_THROW(mtd_sweep(never, traces, 41, std::vector<std::int8_t>{}), PreconditionError);
}

TEST(MtdSweep, NoiseFreeDotProductDisclosesEarly) {
    const auto traces = simulate(kDotCfg, kDot, 20000, 17);
    const ColumnAttack attack = [](const TraceMatrix &t) {
        return chained_column_attack(t, kDotCfg, 0);
    };
    const auto rep = mtd_sweep(attack, traces, 10000, kDot.column(0));
    EXPECT_EQ(rep.mtd, std::size_t{10000});
}
