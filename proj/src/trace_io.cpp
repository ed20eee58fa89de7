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

#include "sysdpa/trace_io.hpp"
#include "sysdpa/errors.hpp"
#include "sysdpa/rng.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

namespace sysdpa {

std::vector<InputBatch> gen_inputs(std::uint64_t seed, std::size_t count,
                                   const ArrayConfig &cfg) {
    if (count == 0)
        throw PreconditionError("gen_inputs needs at least one batch");
    cfg.validate();
    SplitMix64 rng(seed);
    std::vector<InputBatch> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        InputBatch x(cfg.batch, cfg.rows);
        for (unsigned v = 0; v < cfg.batch; ++v)
            for (unsigned r = 0; r < cfg.rows; ++r)
                x.set(v, r, static_cast<std::int8_t>(static_cast<std::uint8_t>(rng() & 0xff)));
        out.push_back(std::move(x));
    }
    return out;
}

namespace {

class ByteWriter {
  public:
    template <typename T> void put(T v) {
        using U = std::make_unsigned_t<T>;
        auto u = static_cast<U>(v);
        for (std::size_t i = 0; i < sizeof(T); ++i)
            bytes_.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
    }
    void put_bytes(const char *p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
    const std::vector<char> &bytes() const { return bytes_; }

  private:
    std::vector<char> bytes_;
};

class ByteReader {
  public:
    explicit ByteReader(std::vector<char> bytes) : bytes_(std::move(bytes)) {}

    template <typename T> T get(const char *field) {
        require(sizeof(T), field);
        std::make_unsigned_t<T> u = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            u |= static_cast<std::make_unsigned_t<T>>(
                     static_cast<unsigned char>(bytes_[pos_ + i]))
                 << (8 * i);
        pos_ += sizeof(T);
        return static_cast<T>(u);
    }
    void require(std::size_t n, const char *field) const {
        if (bytes_.size() - pos_ < n)
            throw FormatError(std::string("truncated file while reading ") + field,
                              static_cast<long long>(pos_));
    }
    const char *data() const { return bytes_.data() + pos_; }
    void skip(std::size_t n) { pos_ += n; }
    std::size_t pos() const { return pos_; }
    std::size_t remaining() const { return bytes_.size() - pos_; }

  private:
    std::vector<char> bytes_;
    std::size_t pos_ = 0;
};

std::vector<char> slurp(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ofstream open_out(const std::filesystem::path &path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out)
        throw Error("cannot write " + path.string());
    return out;
}

void finish(std::ofstream &out, const std::filesystem::path &path) {
    out.flush();
    if (!out)
        throw Error("write failed for " + path.string());
}

} // namespace

WriteResult write_traces(const std::filesystem::path &path, const TraceMatrix &traces,
                         SampleType dtype, bool measured) {
    const std::size_t n = traces.num_traces();
    const std::size_t t = traces.samples_per_trace();
    unsigned vectors = 0, rows = 0;
    if (n > 0) {
        vectors = traces.inputs().front().vectors();
        rows = traces.inputs().front().rows();
    }
    for (const auto &x : traces.inputs())
        if (x.vectors() != vectors || x.rows() != rows)
            throw ShapeError("input batches differ in shape");
    if (t > UINT32_MAX || vectors > UINT16_MAX || rows > UINT16_MAX)
        throw ShapeError("trace set too large for the SCTR header");

    ByteWriter w;
    w.put_bytes("SCTR", 4);
    w.put<std::uint16_t>(kSctrVersion);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(dtype));
    w.put<std::uint8_t>(measured ? 1 : 0);
    w.put<std::uint64_t>(n);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(t));
    w.put<std::uint16_t>(static_cast<std::uint16_t>(vectors));
    w.put<std::uint16_t>(static_cast<std::uint16_t>(rows));
    for (const auto &x : traces.inputs())
        for (std::int8_t b : x.raw())
            w.put<std::int8_t>(b);

    WriteResult result;
    for (double s : traces.samples()) {
        if (dtype == SampleType::f32) {
            const auto f = static_cast<float>(s);
            if (static_cast<double>(f) != s && !(std::isnan(s) && std::isnan(f)))
                result.lossy = true;
            w.put<std::uint32_t>(std::bit_cast<std::uint32_t>(f));
        } else {
            w.put<std::uint64_t>(std::bit_cast<std::uint64_t>(s));
        }
    }

    auto out = open_out(path, true);
    out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
    finish(out, path);
    return result;
}

TraceFile read_traces(const std::filesystem::path &path) {
    ByteReader r(slurp(path));
    r.require(4, "magic");
    if (std::memcmp(r.data(), "SCTR", 4) != 0)
        throw FormatError("bad magic, not an SCTR trace file", 0);
    r.skip(4);
    const std::size_t version_at = r.pos();
    const auto version = r.get<std::uint16_t>("version");
    if (version != kSctrVersion)
        throw FormatError("unsupported SCTR version " + std::to_string(version),
                          static_cast<long long>(version_at));
    const std::size_t dtype_at = r.pos();
    const auto dtype_raw = r.get<std::uint8_t>("sample dtype");
    if (dtype_raw != 1 && dtype_raw != 2)
        throw FormatError("unknown sample dtype " + std::to_string(dtype_raw),
                          static_cast<long long>(dtype_at));
    const auto dtype = static_cast<SampleType>(dtype_raw);
    const auto flags = r.get<std::uint8_t>("flags");
    const auto n = r.get<std::uint64_t>("trace count");
    const auto t = r.get<std::uint32_t>("samples per trace");
    const auto vectors = r.get<std::uint16_t>("vector count");
    const auto rows = r.get<std::uint16_t>("row count");

    const std::size_t width = dtype == SampleType::f32 ? 4 : 8;
    const long double expected =
        static_cast<long double>(n) * vectors * rows + static_cast<long double>(n) * t * width;
    if (expected != static_cast<long double>(r.remaining())) {
        const long long at = static_cast<long long>(kSctrHeaderSize);
        if (expected > static_cast<long double>(r.remaining()))
            throw FormatError("payload truncated: header declares " + std::to_string(n) +
                                  " traces of " + std::to_string(t) + " samples",
                              at + static_cast<long long>(r.remaining()));
        throw FormatError("payload larger than the header declares",
                          at + static_cast<long long>(expected));
    }

    std::vector<InputBatch> inputs;
    inputs.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        InputBatch x(vectors, rows);
        for (unsigned v = 0; v < vectors; ++v)
            for (unsigned e = 0; e < rows; ++e)
                x.set(v, e, r.get<std::int8_t>("inputs"));
        inputs.push_back(std::move(x));
    }
    std::vector<double> samples(n * t);
    for (double &s : samples) {
        if (dtype == SampleType::f32)
            s = std::bit_cast<float>(r.get<std::uint32_t>("samples"));
        else
            s = std::bit_cast<double>(r.get<std::uint64_t>("samples"));
    }
    return {TraceMatrix(t, std::move(inputs), std::move(samples)), dtype, (flags & 1u) != 0};
}

namespace {

std::string fmt_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep)
        out.emplace_back();
    return out;
}

template <typename T> T parse_number(const std::string &s, const std::string &what) {
    T v{};
    const char *b = s.data();
    const char *e = b + s.size();
    if constexpr (std::is_floating_point_v<T>) {
        char *end = nullptr;
        v = static_cast<T>(std::strtod(std::string(s).c_str(), &end));
        if (s.empty() || end == nullptr || *end != '\0')
            throw FormatError("bad number for " + what + ": '" + s + "'");
    } else {
        auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || p != e)
            throw FormatError("bad number for " + what + ": '" + s + "'");
    }
    return v;
}

std::string join_weights(const WeightMatrix &w) {
    std::string out;
    for (unsigned r = 0; r < w.rows(); ++r) {
        if (r)
            out += ';';
        for (unsigned c = 0; c < w.cols(); ++c) {
            if (c)
                out += ',';
            out += std::to_string(w.at(r, c));
        }
    }
    return out;
}

std::string join_coeffs(const PowerCoefficients &p, bool alpha) {
    std::string out;
    for (unsigned r = 0; r < p.rows(); ++r)
        for (unsigned c = 0; c < p.cols(); ++c) {
            if (r || c)
                out += ',';
            out += fmt_exact(alpha ? p.alpha(r, c) : p.beta(r, c));
        }
    return out;
}

} // namespace

WeightMatrix parse_weights(const std::string &text) {
    std::vector<std::vector<int>> rows;
    for (const auto &line : split(text, ';')) {
        if (line.empty())
            continue;
        std::vector<int> row;
        std::string cleaned = line;
        for (char &ch : cleaned)
            if (ch == ',' || ch == '\t')
                ch = ' ';
        std::istringstream in(cleaned);
        std::string tok;
        while (in >> tok)
            row.push_back(parse_number<int>(tok, "weight"));
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().empty())
        throw FormatError("empty weight matrix");
    const auto cols = rows.front().size();
    WeightMatrix w(static_cast<unsigned>(rows.size()), static_cast<unsigned>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols)
            throw FormatError("weight row " + std::to_string(r) + " has " +
                              std::to_string(rows[r].size()) + " entries, expected " +
                              std::to_string(cols));
        for (std::size_t c = 0; c < cols; ++c) {
            if (rows[r][c] < -128 || rows[r][c] > 127)
                throw FormatError("weight " + std::to_string(rows[r][c]) +
                                  " outside the signed 8-bit range");
            w.set(static_cast<unsigned>(r), static_cast<unsigned>(c),
                  static_cast<std::int8_t>(rows[r][c]));
        }
    }
    return w;
}

WeightMatrix read_weights(const std::filesystem::path &path) {
    const auto bytes = slurp(path);
    std::istringstream in(std::string(bytes.begin(), bytes.end()));
    std::string line, joined;
    while (std::getline(in, line)) {
        line = trim(line.substr(0, line.find('#')));
        if (line.empty())
            continue;
        if (!joined.empty())
            joined += ';';
        joined += line;
    }
    return parse_weights(joined);
}

void write_weights(const std::filesystem::path &path, const WeightMatrix &w) {
    auto out = open_out(path);
    for (unsigned r = 0; r < w.rows(); ++r) {
        for (unsigned c = 0; c < w.cols(); ++c)
            out << (c ? " " : "") << static_cast<int>(w.at(r, c));
        out << '\n';
    }
    finish(out, path);
}

void write_manifest(const std::filesystem::path &path, const RunManifest &m) {
    auto out = open_out(path);
    out << "# sysdpa run manifest\n"
        << "tool_version=" << m.tool_version << '\n'
        << "rows=" << m.cfg.rows << '\n'
        << "cols=" << m.cfg.cols << '\n'
        << "batch=" << m.cfg.batch << '\n'
        << "psum_width=" << m.cfg.psum_width << '\n'
        << "weights_file=" << m.weights_file << '\n'
        << "weights=" << join_weights(m.weights) << '\n'
        << "seed=" << m.seed << '\n'
        << "n_traces=" << m.num_traces << '\n'
        << "sigma=" << fmt_exact(m.sigma) << '\n'
        << "noise_seed=" << m.noise_seed << '\n'
        << "alpha=" << join_coeffs(m.coeffs, true) << '\n'
        << "beta=" << join_coeffs(m.coeffs, false) << '\n'
        << "sample_dtype=" << (m.dtype == SampleType::f32 ? "f32" : "f64") << '\n'
        << "measured=" << (m.measured ? "true" : "false") << '\n';
    finish(out, path);
}

RunManifest read_manifest(const std::filesystem::path &path) {
    const auto bytes = slurp(path);
    std::istringstream in(std::string(bytes.begin(), bytes.end()));
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line.front() == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError("manifest line " + std::to_string(lineno) + " has no '='");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto need = [&](const std::string &key) -> const std::string & {
        auto it = kv.find(key);
        if (it == kv.end())
            throw FormatError("manifest is missing '" + key + "'");
        return it->second;
    };

    RunManifest m;
    if (kv.count("tool_version"))
        m.tool_version = kv["tool_version"];
    m.cfg.rows = parse_number<unsigned>(need("rows"), "rows");
    m.cfg.cols = parse_number<unsigned>(need("cols"), "cols");
    m.cfg.batch = parse_number<unsigned>(need("batch"), "batch");
    m.cfg.psum_width = parse_number<unsigned>(need("psum_width"), "psum_width");
    m.cfg.validate();
    m.weights_file = kv.count("weights_file") ? kv["weights_file"] : std::string();
    m.weights = parse_weights(need("weights"));
    if (m.weights.rows() != m.cfg.rows || m.weights.cols() != m.cfg.cols)
        throw FormatError("manifest weights do not match rows/cols");
    m.seed = parse_number<std::uint64_t>(need("seed"), "seed");
    m.num_traces = parse_number<std::size_t>(need("n_traces"), "n_traces");
    m.sigma = parse_number<double>(need("sigma"), "sigma");
    m.noise_seed = parse_number<std::uint64_t>(need("noise_seed"), "noise_seed");

    const auto alpha = split(need("alpha"), ',');
    const auto beta = split(need("beta"), ',');
    if (alpha.size() != m.cfg.num_pes() || beta.size() != m.cfg.num_pes())
        throw FormatError("manifest coefficient lists need one entry per PE");
    m.coeffs = PowerCoefficients(m.cfg.rows, m.cfg.cols, 0.0, 0.0);
    for (unsigned r = 0; r < m.cfg.rows; ++r)
        for (unsigned c = 0; c < m.cfg.cols; ++c) {
            const unsigned k = r * m.cfg.cols + c;
            m.coeffs.set(r, c, parse_number<double>(alpha[k], "alpha"),
                         parse_number<double>(beta[k], "beta"));
        }

    const std::string dtype = kv.count("sample_dtype") ? kv["sample_dtype"] : "f64";
    if (dtype == "f32")
        m.dtype = SampleType::f32;
    else if (dtype == "f64")
        m.dtype = SampleType::f64;
    else
        throw FormatError("unknown sample_dtype '" + dtype + "'");
    const std::string measured = kv.count("measured") ? kv["measured"] : "false";
    if (measured != "true" && measured != "false")
        throw FormatError("measured must be true or false");
    m.measured = measured == "true";
    return m;
}

std::filesystem::path manifest_path_for(const std::filesystem::path &traces) {
    auto p = traces;
    p += ".manifest";
    return p;
}

TraceMatrix regenerate(const RunManifest &m, Exec exec) {
    if (m.measured)
        throw PreconditionError("measured traces cannot be regenerated");
    const auto inputs = gen_inputs(m.seed, m.num_traces, m.cfg);
    return synthesize_traces(m.cfg, m.weights, inputs, m.coeffs, {m.sigma, m.noise_seed},
                             exec);
}

void export_csv(const CorrelationMatrix &m, const std::filesystem::path &path) {
    auto out = open_out(path);
    out << "guess,weight";
    for (std::size_t t = 0; t < m.samples(); ++t)
        out << ",s" << t;
    out << '\n';
    for (std::size_t g = 0; g < m.rows(); ++g) {
        out << g << ',' << static_cast<int>(HypothesisMatrix::weight_of(static_cast<unsigned>(g)));
        for (std::size_t t = 0; t < m.samples(); ++t) {
            out << ',';
            if (m.defined(g, t))
                out << fmt6(m.at(g, t));
        }
        out << '\n';
    }
    finish(out, path);
}

namespace {

void write_square(const SymmetricTable &m, const std::filesystem::path &path,
                  const std::string &corner, const std::vector<std::string> &labels) {
    auto out = open_out(path);
    out << corner;
    for (const auto &l : labels)
        out << ',' << l;
    out << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        out << labels[i];
        for (std::size_t j = 0; j < m.size(); ++j) {
            out << ',';
            if (m.defined(i, j))
                out << fmt6(m.at(i, j));
        }
        out << '\n';
    }
    finish(out, path);
}

} // namespace

void export_csv(const AliasingMap &m, const std::filesystem::path &path) {
    std::vector<std::string> labels;
    for (std::size_t g = 0; g < m.size(); ++g)
        labels.push_back(std::to_string(
            m.size() == HypothesisMatrix::kGuesses
                ? HypothesisMatrix::weight_of(static_cast<unsigned>(g))
                : static_cast<int>(g)));
    write_square(m, path, "weight", labels);
}

void export_csv(const PECorrelationTable &m, const std::filesystem::path &path) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < m.size(); ++i)
        labels.push_back("PE" + std::to_string(i + 1));
    write_square(m, path, "pe", labels);
}

void export_csv(const GuessChain &chain, const std::filesystem::path &path) {
    auto out = open_out(path);
    const std::size_t rows = chain.entries.empty() ? 0 : chain.entries.front().weights.size();
    out << "rank";
    for (std::size_t r = 0; r < rows; ++r)
        out << ",w" << r;
    out << ",score";
    for (std::size_t r = 0; r < rows; ++r)
        out << ",row_score" << r;
    out << '\n';
    std::size_t rank = 1;
    for (const auto &e : chain.entries) {
        out << rank++;
        for (std::int8_t w : e.weights)
            out << ',' << static_cast<int>(w);
        out << ',' << fmt6(e.score);
        for (double s : e.row_scores)
            out << ',' << fmt6(s);
        out << '\n';
    }
    finish(out, path);
}

CorrelationMatrix import_correlation_csv(const std::filesystem::path &path) {
    const auto bytes = slurp(path);
    std::istringstream in(std::string(bytes.begin(), bytes.end()));
    std::string line;
    if (!std::getline(in, line))
        throw FormatError("empty correlation CSV", 0);
    const auto header = split(trim(line), ',');
    if (header.size() < 2 || header[0] != "guess" || header[1] != "weight")
        throw FormatError("unexpected correlation CSV header", 0);
    const std::size_t samples = header.size() - 2;

    std::vector<double> rho;
    std::vector<std::uint8_t> defined;
    std::size_t rows = 0;
    long long offset = static_cast<long long>(line.size()) + 1;
    while (std::getline(in, line)) {
        const auto fields = split(trim(line), ',');
        if (fields.size() != header.size())
            throw FormatError("correlation CSV row " + std::to_string(rows) + " has " +
                                  std::to_string(fields.size()) + " fields",
                              offset);
        for (std::size_t t = 0; t < samples; ++t) {
            const auto &f = fields[t + 2];
            defined.push_back(f.empty() ? 0 : 1);
            rho.push_back(f.empty() ? 0.0 : parse_number<double>(f, "correlation"));
        }
        ++rows;
        offset += static_cast<long long>(line.size()) + 1;
    }
    return CorrelationMatrix(rows, samples, std::move(rho), std::move(defined));
}

} // namespace sysdpa
