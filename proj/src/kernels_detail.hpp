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

// Per-item bodies shared by the serial and OpenMP kernel drivers.

#ifndef SYSDPA_KERNELS_DETAIL_HPP
#define SYSDPA_KERNELS_DETAIL_HPP

#include "sysdpa/errors.hpp"
#include "sysdpa/kernels.hpp"
#include "sysdpa/rng.hpp"

#include <algorithm>
#include <cmath>

namespace sysdpa::kernels::detail {

inline void synthesize_one(const ArrayConfig &cfg, const WeightMatrix &w,
                           const InputBatch &x, const PowerCoefficients &coeffs,
                           const NoiseSpec &noise, std::size_t n,
                           std::span<double> out) {
    const RegisterTimeline tl = simulate_batch(cfg, w, x);
    for (unsigned t = 0; t < tl.cycles(); ++t) {
        double p = 0.0;
        for (unsigned r = 0; r < cfg.rows; ++r)
            for (unsigned c = 0; c < cfg.cols; ++c)
                p += pe_cycle_power(tl, r, c, t, coeffs);
        out[t] = p;
    }
    if (noise.sigma > 0.0) {
        SplitMix64 rng(derive_seed(noise.seed, n));
        for (double &s : out)
            s += noise.sigma * rng.gaussian();
    }
}

inline double clamp_unit(double r) { return std::clamp(r, -1.0, 1.0); }

/// Correlate one hypothesis row against every centered trace column.
inline void pearson_row(std::span<const double> h, const CenteredColumns &cols,
                        double *rho, std::uint8_t *defined) {
    const std::size_t n = h.size();
    double mean = 0.0;
    for (double v : h)
        mean += v;
    mean /= static_cast<double>(n);
    const bool constant_row =
        std::all_of(h.begin(), h.end(), [&](double v) { return v == h[0]; });
    double ss = 0.0;
    for (double v : h)
        ss += (v - mean) * (v - mean);
    for (std::size_t k = 0; k < cols.num_columns; ++k) {
        if (constant_row || cols.constant[k]) {
            rho[k] = 0.0;
            defined[k] = 0;
            continue;
        }
        const auto p = cols.column(k);
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            dot += (h[i] - mean) * p[i];
        rho[k] = clamp_unit(dot / std::sqrt(ss * cols.sum_squares[k]));
        defined[k] = 1;
    }
}

struct GuessSums {
    std::int64_t sum_h = 0;
    std::int64_t sum_hh = 0;
    unsigned h_min = ~0u;
    unsigned h_max = 0;
};

template <LeakageModel Model, bool SingleColumn>
GuessSums accumulate_guess(const GuessScoringInput &in, std::int64_t w,
                           std::uint64_t mask, std::span<double> sum_hp) {
    const CenteredColumns &win = *in.window;
    const std::size_t n = in.x0.size();
    const std::size_t width = win.num_columns;
    const LeakageSpec spec{Model, in.leakage.bit};
    GuessSums s;
    double hp0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto p0 = static_cast<std::uint64_t>(in.prefix0[i] + in.x0[i] * w) & mask;
        const auto p1 = static_cast<std::uint64_t>(in.prefix1[i] + in.x1[i] * w) & mask;
        const unsigned h = leakage_value(spec, p0, p1);
        s.sum_h += h;
        s.sum_hh += static_cast<std::int64_t>(h) * h;
        s.h_min = std::min(s.h_min, h);
        s.h_max = std::max(s.h_max, h);
        const double hd = h;
        if constexpr (SingleColumn) {
            hp0 += hd * win.data[i];
        } else {
            for (std::size_t k = 0; k < width; ++k)
                sum_hp[k] += hd * win.data[k * n + i];
        }
    }
    if constexpr (SingleColumn)
        sum_hp[0] = hp0;
    return s;
}

template <LeakageModel Model>
GuessSums accumulate_guess(const GuessScoringInput &in, std::int64_t w,
                           std::uint64_t mask, std::span<double> sum_hp) {
    return sum_hp.size() == 1 ? accumulate_guess<Model, true>(in, w, mask, sum_hp)
                              : accumulate_guess<Model, false>(in, w, mask, sum_hp);
}

inline void score_one_guess(const GuessScoringInput &in, unsigned g, double *rho,
                            std::uint8_t *defined) {
    const CenteredColumns &win = *in.window;
    const std::size_t n = in.x0.size();
    const std::size_t width = win.num_columns;
    const std::int64_t w =
        static_cast<std::int8_t>(static_cast<std::uint8_t>(g));
    const std::uint64_t mask = in.psum_width >= 64
                                   ? ~std::uint64_t{0}
                                   : (std::uint64_t{1} << in.psum_width) - 1;

    std::vector<double> sum_hp(width, 0.0);
    GuessSums s;
    switch (in.leakage.model) {
    case LeakageModel::hamming_weight:
        s = accumulate_guess<LeakageModel::hamming_weight>(in, w, mask, sum_hp);
        break;
    case LeakageModel::bit:
        s = accumulate_guess<LeakageModel::bit>(in, w, mask, sum_hp);
        break;
    case LeakageModel::hamming_distance:
    default:
        s = accumulate_guess<LeakageModel::hamming_distance>(in, w, mask, sum_hp);
        break;
    }
    const auto [sum_h, sum_hh, h_min, h_max] = s;

    const long double var_h =
        static_cast<long double>(sum_hh) -
        static_cast<long double>(sum_h) * static_cast<long double>(sum_h) /
            static_cast<long double>(n);
    for (std::size_t k = 0; k < width; ++k) {
        if (h_min == h_max || win.constant[k]) {
            rho[k] = 0.0;
            defined[k] = 0;
            continue;
        }
        const double denom = std::sqrt(static_cast<double>(var_h) * win.sum_squares[k]);
        rho[k] = clamp_unit(sum_hp[k] / denom);
        defined[k] = 1;
    }
}

inline void check_scoring_input(const GuessScoringInput &in) {
    const std::size_t n = in.x0.size();
    if (!in.window || in.prefix0.size() != n || in.prefix1.size() != n ||
        in.x1.size() != n || in.window->num_traces != n)
        throw ShapeError("guess scoring inputs have inconsistent lengths");
    if (n < 2)
        throw InsufficientDataError("correlation needs at least 2 traces");
}

} // namespace sysdpa::kernels::detail

#endif // SYSDPA_KERNELS_DETAIL_HPP
