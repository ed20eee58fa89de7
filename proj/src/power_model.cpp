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

#include "sysdpa/power_model.hpp"
#include "sysdpa/errors.hpp"
#include "sysdpa/kernels.hpp"
#include "sysdpa/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sysdpa {

PowerCoefficients::PowerCoefficients(unsigned rows, unsigned cols, double alpha,
                                     double beta)
    : rows_(rows), cols_(cols),
      alpha_(static_cast<std::size_t>(rows) * cols, alpha),
      beta_(static_cast<std::size_t>(rows) * cols, beta) {}

PowerCoefficients PowerCoefficients::defaults(const ArrayConfig &cfg) {
    PowerCoefficients pc(cfg.rows, cfg.cols, 3.0, 2.0);
    for (unsigned r = 0; r < cfg.rows; ++r)
        pc.set(r, cfg.cols - 1, 1.0, 2.0);
    return pc;
}

void PowerCoefficients::set(unsigned r, unsigned c, double alpha, double beta) {
    if (r >= rows_ || c >= cols_)
        throw IndexError("coefficient index out of range");
    alpha_[r * cols_ + c] = alpha;
    beta_[r * cols_ + c] = beta;
}

PowerCoefficients PowerCoefficients::reg_c_only() const {
    PowerCoefficients out = *this;
    std::fill(out.alpha_.begin(), out.alpha_.end(), 0.0);
    return out;
}

void PowerCoefficients::validate(const ArrayConfig &cfg) const {
    if (rows_ != cfg.rows || cols_ != cfg.cols)
        throw ShapeError("coefficient table does not match the array");
    for (std::size_t i = 0; i < alpha_.size(); ++i)
        if (!std::isfinite(alpha_[i]) || !std::isfinite(beta_[i]) ||
            alpha_[i] < 0.0 || beta_[i] < 0.0)
            throw PreconditionError("power coefficients must be finite and >= 0");
}

double pe_cycle_power(const RegisterTimeline &tl, unsigned r, unsigned c,
                      unsigned t, const PowerCoefficients &coeffs) {
    const auto &cfg = tl.config();
    if (r >= cfg.rows || c >= cfg.cols || t >= tl.cycles())
        throw IndexError("pe_cycle_power: index outside the timeline");
    const auto a_now = static_cast<std::uint8_t>(tl.reg_a(r, c, t));
    const auto a_prev =
        t ? static_cast<std::uint8_t>(tl.reg_a(r, c, t - 1)) : std::uint8_t{0};
    const std::uint64_t c_now = tl.reg_c(r, c, t);
    const std::uint64_t c_prev = t ? tl.reg_c(r, c, t - 1) : 0;
    return coeffs.alpha(r, c) * hamming_distance(a_prev, a_now) +
           coeffs.beta(r, c) * hamming_distance(c_prev, c_now);
}

Trace synthesize_trace(const RegisterTimeline &tl, const PowerCoefficients &coeffs,
                       const NoiseSpec &noise) {
    const auto &cfg = tl.config();
    coeffs.validate(cfg);
    if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma))
        throw PreconditionError("noise sigma must be finite and >= 0");
    Trace out;
    out.samples.assign(tl.cycles(), 0.0);
    for (unsigned t = 0; t < tl.cycles(); ++t) {
        double p = 0.0;
        for (unsigned r = 0; r < cfg.rows; ++r)
            for (unsigned c = 0; c < cfg.cols; ++c)
                p += pe_cycle_power(tl, r, c, t, coeffs);
        out.samples[t] = p;
    }
    if (noise.sigma > 0.0) {
        SplitMix64 rng(noise.seed);
        for (double &s : out.samples)
            s += noise.sigma * rng.gaussian();
    }
    return out;
}

TraceMatrix synthesize_traces(const ArrayConfig &cfg, const WeightMatrix &w,
                              std::span<const InputBatch> inputs,
                              const PowerCoefficients &coeffs,
                              const NoiseSpec &noise, Exec exec) {
    cfg.validate();
    coeffs.validate(cfg);
    if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma))
        throw PreconditionError("noise sigma must be finite and >= 0");
    if (w.rows() != cfg.rows || w.cols() != cfg.cols)
        throw ShapeError("weight matrix does not match the array");
    for (const auto &x : inputs)
        if (x.vectors() != cfg.batch || x.rows() != cfg.rows)
            throw ShapeError("input batch shape does not match the array");

    auto samples = exec == Exec::serial
                       ? kernels::synthesize_serial(cfg, w, inputs, coeffs, noise)
                       : kernels::synthesize_omp(cfg, w, inputs, coeffs, noise);
    return TraceMatrix(cfg.total_cycles(),
                       std::vector<InputBatch>(inputs.begin(), inputs.end()),
                       std::move(samples));
}

std::uint64_t partial_sum(const InputBatch &x, unsigned v,
                          std::span<const std::int8_t> weights,
                          unsigned last_row, unsigned width) {
    std::int64_t acc = 0;
    for (unsigned i = 0; i <= last_row; ++i)
        acc += static_cast<std::int64_t>(x.at(v, i)) * weights[i];
    return wrap_to_width(acc, width);
}

HypothesisMatrix hypothesis_matrix(std::span<const InputBatch> inputs,
                                   std::span<const std::int8_t> known,
                                   unsigned row, unsigned psum_width,
                                   const LeakageSpec &leakage) {
    if (known.size() < row)
        throw PreconditionError("hypothesis for row " + std::to_string(row) +
                                " needs " + std::to_string(row) +
                                " recovered weights, got " +
                                std::to_string(known.size()));
    if (psum_width < kMinPsumWidth || psum_width > kMaxPsumWidth)
        throw PreconditionError("psum_width out of range");
    if (leakage.model == LeakageModel::bit && leakage.bit >= psum_width)
        throw IndexError("bit " + std::to_string(leakage.bit) +
                         " outside a " + std::to_string(psum_width) +
                         "-bit register");
    for (const auto &x : inputs)
        if (x.vectors() < 2 || x.rows() <= row)
            throw ShapeError("hypotheses need two input vectors covering row " +
                             std::to_string(row));

    HypothesisMatrix h(inputs.size());
    std::vector<std::int8_t> w(known.begin(), known.begin() + row);
    w.push_back(0);
    for (unsigned g = 0; g < HypothesisMatrix::kGuesses; ++g) {
        w[row] = HypothesisMatrix::weight_of(g);
        auto out = h.row(g);
        for (std::size_t n = 0; n < inputs.size(); ++n) {
            const auto p0 = partial_sum(inputs[n], 0, w, row, psum_width);
            const auto p1 = partial_sum(inputs[n], 1, w, row, psum_width);
            out[n] = leakage_value(leakage, p0, p1);
        }
    }
    return h;
}

} // namespace sysdpa
