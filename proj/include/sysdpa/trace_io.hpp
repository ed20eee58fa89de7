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

#ifndef SYSDPA_TRACE_IO_HPP
#define SYSDPA_TRACE_IO_HPP

#include "sysdpa/analysis.hpp"
#include "sysdpa/attack.hpp"
#include "sysdpa/power_model.hpp"
#include "sysdpa/systolic.hpp"
#include "sysdpa/traces.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sysdpa {

/// Uniform signed bytes from SplitMix64(seed), one draw per element, in
/// batch / vector / row order.
std::vector<InputBatch> gen_inputs(std::uint64_t seed, std::size_t count,
                                   const ArrayConfig &cfg);

// SCTR trace files, all fields little-endian:
//
//   offset  size  field
//   0       4     magic "SCTR"
//   4       2     version (1)
//   6       1     sample dtype: 1 = f32, 2 = f64
//   7       1     flags: bit 0 = measured traces
//   8       8     number of traces N
//   16      4     samples per trace T
//   20      2     input vectors per trace V
//   22      2     input elements per vector R
//   24      N*V*R signed input bytes, trace-major
//   ...     N*T   samples, trace-major

inline constexpr std::uint16_t kSctrVersion = 1;
inline constexpr std::size_t kSctrHeaderSize = 24;

enum class SampleType : std::uint8_t { f32 = 1, f64 = 2 };

struct TraceFile {
    TraceMatrix traces;
    SampleType dtype = SampleType::f64;
    bool measured = false;
    /// Samples were stored as f32, so values may differ from the originals.
    bool lossy() const { return dtype == SampleType::f32; }
};

struct WriteResult {
    /// Some sample did not survive the conversion to the stored type.
    bool lossy = false;
};

WriteResult write_traces(const std::filesystem::path &path, const TraceMatrix &traces,
                         SampleType dtype = SampleType::f64, bool measured = false);
TraceFile read_traces(const std::filesystem::path &path);

/// Everything needed to regenerate a simulated trace file bit-exactly.
struct RunManifest {
    ArrayConfig cfg;
    std::string weights_file;
    WeightMatrix weights;
    std::uint64_t seed = 0;
    std::size_t num_traces = 0;
    double sigma = 0.0;
    std::uint64_t noise_seed = 0;
    PowerCoefficients coeffs;
    SampleType dtype = SampleType::f64;
    bool measured = false;
    std::string tool_version = SYSDPA_VERSION;
};

/// Flat `key=value` text, one entry per line; `#` starts a comment.
void write_manifest(const std::filesystem::path &path, const RunManifest &m);
RunManifest read_manifest(const std::filesystem::path &path);
/// Default location of the manifest that accompanies a trace file.
std::filesystem::path manifest_path_for(const std::filesystem::path &traces);

TraceMatrix regenerate(const RunManifest &m, Exec exec = Exec::parallel);

/// Weight matrix as text: one row per line, entries separated by spaces or
/// commas.
WeightMatrix read_weights(const std::filesystem::path &path);
void write_weights(const std::filesystem::path &path, const WeightMatrix &w);
/// Parses "a,b,c;d,e,f" (rows separated by ';').
WeightMatrix parse_weights(const std::string &text);

// CSV exports: header row, one record per line, floats to 6 significant
// digits, undefined correlations as empty fields.
void export_csv(const CorrelationMatrix &m, const std::filesystem::path &path);
void export_csv(const AliasingMap &m, const std::filesystem::path &path);
void export_csv(const PECorrelationTable &m, const std::filesystem::path &path);
void export_csv(const GuessChain &chain, const std::filesystem::path &path);

CorrelationMatrix import_correlation_csv(const std::filesystem::path &path);

} // namespace sysdpa

#endif // SYSDPA_TRACE_IO_HPP
