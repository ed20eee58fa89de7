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

#include "sysdpa/systolic.hpp"
#include "sysdpa/errors.hpp"

#include <string>

namespace sysdpa {

namespace {

std::int8_t checked_int8(int v) {
    if (v < -128 || v > 127)
        throw PreconditionError("value " + std::to_string(v) +
                                " does not fit a signed byte");
    return static_cast<std::int8_t>(v);
}

} // namespace

void ArrayConfig::validate() const {
    if (rows < 1 || cols < 1 || batch < 1)
        throw PreconditionError("array rows, cols and batch must be >= 1");
    if (psum_width < kMinPsumWidth || psum_width > kMaxPsumWidth)
        throw PreconditionError("psum_width must be in [17, 64], got " +
                                std::to_string(psum_width));
}

std::uint64_t ArrayConfig::psum_mask() const {
    return psum_width >= 64 ? ~std::uint64_t{0}
                            : (std::uint64_t{1} << psum_width) - 1;
}

std::uint64_t wrap_to_width(std::int64_t value, unsigned width) {
    const auto bits = static_cast<std::uint64_t>(value);
    return width >= 64 ? bits : bits & ((std::uint64_t{1} << width) - 1);
}

std::int64_t sign_extend(std::uint64_t pattern, unsigned width) {
    if (width >= 64)
        return static_cast<std::int64_t>(pattern);
    const std::uint64_t sign = std::uint64_t{1} << (width - 1);
    pattern &= (std::uint64_t{1} << width) - 1;
    return static_cast<std::int64_t>(pattern ^ sign) -
           static_cast<std::int64_t>(sign);
}

WeightMatrix::WeightMatrix(unsigned rows, unsigned cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0) {}

WeightMatrix::WeightMatrix(std::initializer_list<std::initializer_list<int>> rows)
    : rows_(static_cast<unsigned>(rows.size())),
      cols_(rows.size() ? static_cast<unsigned>(rows.begin()->size()) : 0) {
    data_.reserve(static_cast<std::size_t>(rows_) * cols_);
    for (const auto &row : rows) {
        if (row.size() != cols_)
            throw ShapeError("ragged weight matrix initializer");
        for (int v : row)
            data_.push_back(checked_int8(v));
    }
}

std::vector<std::int8_t> WeightMatrix::column(unsigned c) const {
    if (c >= cols_)
        throw IndexError("column " + std::to_string(c) + " out of range");
    std::vector<std::int8_t> out(rows_);
    for (unsigned r = 0; r < rows_; ++r)
        out[r] = at(r, c);
    return out;
}

void WeightMatrix::set_column(unsigned c, std::span<const std::int8_t> w) {
    if (c >= cols_)
        throw IndexError("column " + std::to_string(c) + " out of range");
    if (w.size() != rows_)
        throw ShapeError("column length does not match weight rows");
    for (unsigned r = 0; r < rows_; ++r)
        set(r, c, w[r]);
}

InputBatch::InputBatch(unsigned vectors, unsigned rows)
    : vectors_(vectors), rows_(rows),
      data_(static_cast<std::size_t>(vectors) * rows, 0) {}

InputBatch::InputBatch(std::initializer_list<std::initializer_list<int>> vectors)
    : vectors_(static_cast<unsigned>(vectors.size())),
      rows_(vectors.size() ? static_cast<unsigned>(vectors.begin()->size()) : 0) {
    data_.reserve(static_cast<std::size_t>(vectors_) * rows_);
    for (const auto &vec : vectors) {
        if (vec.size() != rows_)
            throw ShapeError("ragged input batch initializer");
        for (int v : vec)
            data_.push_back(checked_int8(v));
    }
}

RegisterTimeline::RegisterTimeline(const ArrayConfig &cfg)
    : cfg_(cfg), cycles_(cfg.total_cycles()),
      reg_a_(static_cast<std::size_t>(cfg.rows) * cfg.cols * cycles_, 0),
      reg_c_(static_cast<std::size_t>(cfg.rows) * cfg.cols * cycles_, 0) {}

unsigned mac_cycle(const ArrayConfig &cfg, unsigned r, unsigned c, unsigned v) {
    if (r >= cfg.rows || c >= cfg.cols || v >= cfg.batch)
        throw IndexError("mac_cycle: (" + std::to_string(r) + ", " +
                         std::to_string(c) + ", " + std::to_string(v) +
                         ") outside the array");
    return r + c + v;
}

RegisterTimeline simulate_batch(const ArrayConfig &cfg, const WeightMatrix &w,
                                const InputBatch &x) {
    cfg.validate();
    if (w.rows() != cfg.rows || w.cols() != cfg.cols)
        throw ShapeError("weight matrix is " + std::to_string(w.rows()) + "x" +
                         std::to_string(w.cols()) + ", array is " +
                         std::to_string(cfg.rows) + "x" +
                         std::to_string(cfg.cols));
    if (x.vectors() != cfg.batch || x.rows() != cfg.rows)
        throw ShapeError("input batch shape does not match the array");

    RegisterTimeline tl(cfg);
    // Partial sums travel down a column; each PE adds its product to the
    // value its upper neighbour latched one cycle earlier. Registers outside
    // the wave-front see zero bubbles.
    for (unsigned c = 0; c < cfg.cols; ++c) {
        for (unsigned v = 0; v < cfg.batch; ++v) {
            std::uint64_t psum = 0;
            for (unsigned r = 0; r < cfg.rows; ++r) {
                const unsigned t = r + c + v;
                const std::int8_t in = x.at(v, r);
                const std::int64_t product =
                    static_cast<std::int64_t>(in) * w.at(r, c);
                psum = wrap_to_width(
                    static_cast<std::int64_t>(psum) + product, cfg.psum_width);
                tl.set_reg_a(r, c, t, in);
                tl.set_reg_c(r, c, t, psum);
            }
        }
    }
    return tl;
}

std::vector<std::vector<std::int64_t>>
mvm_oracle(const WeightMatrix &w, const InputBatch &x, unsigned psum_width) {
    if (x.rows() != w.rows())
        throw ShapeError("input length does not match weight rows");
    std::vector<std::vector<std::int64_t>> out(
        x.vectors(), std::vector<std::int64_t>(w.cols(), 0));
    for (unsigned v = 0; v < x.vectors(); ++v)
        for (unsigned c = 0; c < w.cols(); ++c) {
            std::int64_t acc = 0;
            for (unsigned r = 0; r < w.rows(); ++r)
                acc += static_cast<std::int64_t>(x.at(v, r)) * w.at(r, c);
            out[v][c] = sign_extend(wrap_to_width(acc, psum_width), psum_width);
        }
    return out;
}

ConvDims conv_output_dims(const ConvGeometry &g) {
    if (g.in_width <= 0 || g.in_height <= 0 || g.filter_width <= 0 ||
        g.filter_height <= 0 || g.stride <= 0 || g.padding < 0)
        throw GeometryError("convolution sizes must be positive (padding >= 0)");
    const long long span_w = g.in_width - g.filter_width + 2 * g.padding;
    const long long span_h = g.in_height - g.filter_height + 2 * g.padding;
    if (span_w < 0 || span_h < 0)
        throw GeometryError("filter larger than padded input");
    if (span_w % g.stride != 0 || span_h % g.stride != 0)
        throw GeometryError("stride does not divide the padded input span");
    return {span_w / g.stride + 1, span_h / g.stride + 1};
}

} // namespace sysdpa
