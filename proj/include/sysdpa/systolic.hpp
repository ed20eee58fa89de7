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

#ifndef SYSDPA_SYSTOLIC_HPP
#define SYSDPA_SYSTOLIC_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace sysdpa {

/// Geometry of a weight-stationary systolic array and of one input transfer.
///
/// A dot-product array is `cols == 1`. Each transfer streams `batch` input
/// vectors through the array; the compute window lasts
/// `rows + cols + batch - 2` cycles.
struct ArrayConfig {
    unsigned rows = 3;
    unsigned cols = 1;
    unsigned batch = 3;
    /// Width in bits of the partial-sum register (Reg C).
    unsigned psum_width = 24;

    /// Throws PreconditionError when an invariant is violated.
    void validate() const;
    unsigned total_cycles() const { return rows + cols + batch - 2; }
    unsigned num_pes() const { return rows * cols; }
    std::uint64_t psum_mask() const;

    bool operator==(const ArrayConfig &) const = default;
};

/// Largest supported Reg C width.
inline constexpr unsigned kMaxPsumWidth = 64;
inline constexpr unsigned kMinPsumWidth = 17;

/// Reduce `value` to a `width`-bit two's-complement bit pattern.
std::uint64_t wrap_to_width(std::int64_t value, unsigned width);
/// Interpret the low `width` bits of `pattern` as a signed integer.
std::int64_t sign_extend(std::uint64_t pattern, unsigned width);

/// Signed 8-bit weights held stationary in the PE grid.
/// `at(r, c)` is the weight of the PE in row r, column c (0-indexed).
class WeightMatrix {
  public:
    WeightMatrix() = default;
    WeightMatrix(unsigned rows, unsigned cols);
    /// Row-major nested list, e.g. {{23, 120, -6}, {-107, 73, -31}, ...}.
    WeightMatrix(std::initializer_list<std::initializer_list<int>> rows);

    static WeightMatrix zeros(unsigned rows, unsigned cols) {
        return WeightMatrix(rows, cols);
    }

    unsigned rows() const { return rows_; }
    unsigned cols() const { return cols_; }
    std::int8_t at(unsigned r, unsigned c) const { return data_[r * cols_ + c]; }
    void set(unsigned r, unsigned c, std::int8_t w) { data_[r * cols_ + c] = w; }
    std::vector<std::int8_t> column(unsigned c) const;
    void set_column(unsigned c, std::span<const std::int8_t> w);

    bool operator==(const WeightMatrix &) const = default;

  private:
    unsigned rows_ = 0;
    unsigned cols_ = 0;
    std::vector<std::int8_t> data_;
};

/// The input vectors of one transfer: `at(v, r)` is element r of vector v.
class InputBatch {
  public:
    InputBatch() = default;
    InputBatch(unsigned vectors, unsigned rows);
    InputBatch(std::initializer_list<std::initializer_list<int>> vectors);

    unsigned vectors() const { return vectors_; }
    unsigned rows() const { return rows_; }
    std::int8_t at(unsigned v, unsigned r) const { return data_[v * rows_ + r]; }
    void set(unsigned v, unsigned r, std::int8_t x) { data_[v * rows_ + r] = x; }
    std::span<const std::int8_t> vector(unsigned v) const {
        return {data_.data() + v * rows_, rows_};
    }
    std::span<const std::int8_t> raw() const { return data_; }
    std::span<std::int8_t> raw() { return data_; }

    bool operator==(const InputBatch &) const = default;

  private:
    unsigned vectors_ = 0;
    unsigned rows_ = 0;
    std::vector<std::int8_t> data_;
};

/// End-of-cycle register contents of every PE over the compute window.
///
/// Reg A holds the input element a PE multiplies in that cycle and 0 when no
/// input is present. Reg C holds the `psum_width`-bit pattern of the partial
/// sum, and is 0 outside the PE's MAC cycles.
class RegisterTimeline {
  public:
    explicit RegisterTimeline(const ArrayConfig &cfg);

    const ArrayConfig &config() const { return cfg_; }
    unsigned cycles() const { return cycles_; }

    std::int8_t reg_a(unsigned r, unsigned c, unsigned t) const {
        return reg_a_[index(r, c, t)];
    }
    std::uint64_t reg_c(unsigned r, unsigned c, unsigned t) const {
        return reg_c_[index(r, c, t)];
    }
    std::int64_t reg_c_signed(unsigned r, unsigned c, unsigned t) const {
        return sign_extend(reg_c(r, c, t), cfg_.psum_width);
    }
    /// True iff PE(r, c) performs a MAC in cycle t.
    bool active(unsigned r, unsigned c, unsigned t) const {
        return t >= r + c && t < r + c + cfg_.batch;
    }

    void set_reg_a(unsigned r, unsigned c, unsigned t, std::int8_t v) {
        reg_a_[index(r, c, t)] = v;
    }
    void set_reg_c(unsigned r, unsigned c, unsigned t, std::uint64_t v) {
        reg_c_[index(r, c, t)] = v;
    }

  private:
    std::size_t index(unsigned r, unsigned c, unsigned t) const {
        return (static_cast<std::size_t>(r) * cfg_.cols + c) * cycles_ + t;
    }

    ArrayConfig cfg_;
    unsigned cycles_;
    std::vector<std::int8_t> reg_a_;
    std::vector<std::uint64_t> reg_c_;
};

/// Cycle in which PE(r, c) latches the partial sum of vector v.
unsigned mac_cycle(const ArrayConfig &cfg, unsigned r, unsigned c, unsigned v);

/// Cycle-accurate simulation of one transfer through the array.
RegisterTimeline simulate_batch(const ArrayConfig &cfg, const WeightMatrix &w,
                                const InputBatch &x);

/// Direct matrix-vector reference: result[v][c] = sum_r x[v][r] * w[r][c],
/// wrapped to `psum_width` bits and returned sign-extended.
std::vector<std::vector<std::int64_t>>
mvm_oracle(const WeightMatrix &w, const InputBatch &x, unsigned psum_width = 24);

struct ConvGeometry {
    long long in_width;
    long long in_height;
    long long filter_width;
    long long filter_height;
    long long stride;
    long long padding;
};

struct ConvDims {
    long long width;
    long long height;
    bool operator==(const ConvDims &) const = default;
};

/// Output feature-map size of a convolution layer lowered to a matrix
/// product. Throws GeometryError when the filter does not tile the padded
/// input exactly.
ConvDims conv_output_dims(const ConvGeometry &g);

} // namespace sysdpa

#endif // SYSDPA_SYSTOLIC_HPP
