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

#include "cli.hpp"

#include "sysdpa/analysis.hpp"
#include "sysdpa/attack.hpp"
#include "sysdpa/errors.hpp"
#include "sysdpa/power_model.hpp"
#include "sysdpa/systolic.hpp"
#include "sysdpa/trace_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace sysdpa::cli {

namespace {

std::string fmt(double v, const char *spec = "%.4f") {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string tuple(std::span<const std::int8_t> w) {
    std::string s = "(";
    for (std::size_t i = 0; i < w.size(); ++i)
        s += (i ? "," : "") + std::to_string(w[i]);
    return s + ")";
}

struct ArrayFlags {
    std::optional<unsigned> rows, cols, batch, psum_width;
};

void add_array_flags(CLI::App *cmd, ArrayFlags &f) {
    cmd->add_option("--rows", f.rows, "PE rows")->check(CLI::PositiveNumber);
    cmd->add_option("--cols", f.cols, "PE columns")->check(CLI::PositiveNumber);
    cmd->add_option("--batch", f.batch, "Input vectors per transfer")
        ->check(CLI::Range(2u, 65535u));
    cmd->add_option("--psum-width", f.psum_width, "Reg C width in bits")
        ->check(CLI::Range(kMinPsumWidth, kMaxPsumWidth));
}

struct AttackFlags {
    std::string traces;
    std::optional<unsigned> col;
    unsigned k = 50;
    std::string score = "signed";
    std::string leakage = "hd";
    unsigned bit = 0;
    std::string truth;
    std::string report;
    std::string template_file;
    unsigned samples_per_cycle = 1;
    std::string window;
    std::string exec = "omp";
    ArrayFlags array;
};

void add_attack_flags(CLI::App *cmd, AttackFlags &f, bool with_col) {
    cmd->add_option("--traces", f.traces, "SCTR trace file")->required()->check(CLI::ExistingFile);
    if (with_col)
        cmd->add_option("--col", f.col, "Column to attack (default: all for 2D)");
    cmd->add_option("--k", f.k, "Beam width of the first row")->check(CLI::Range(1u, 256u));
    cmd->add_option("--score", f.score, "Window score")
        ->check(CLI::IsMember({"signed", "abs"}));
    cmd->add_option("--leakage", f.leakage, "Hypothesis model")
        ->check(CLI::IsMember({"hd", "hw", "bit"}));
    cmd->add_option("--bit", f.bit, "Bit index for --leakage bit");
    cmd->add_option("--truth", f.truth, "Weight file with the true weights")
        ->check(CLI::ExistingFile);
    cmd->add_option("--report", f.report, "GuessChain CSV output");
    cmd->add_option("--samples-per-cycle", f.samples_per_cycle, "Trace oversampling factor")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--window", f.window, "Sample range BEGIN:END used for every row");
    cmd->add_option("--exec", f.exec, "Kernel implementation")
        ->check(CLI::IsMember({"omp", "serial"}));
    add_array_flags(cmd, f.array);
}

Exec parse_exec(const std::string &s) { return s == "serial" ? Exec::serial : Exec::parallel; }

AttackConfig attack_config(const AttackFlags &f) {
    AttackConfig a;
    a.beam = f.k;
    a.score = f.score == "abs" ? ScoreMode::absolute_max : ScoreMode::signed_max;
    if (f.leakage == "hw")
        a.leakage = {LeakageModel::hamming_weight, 0};
    else if (f.leakage == "bit")
        a.leakage = {LeakageModel::bit, f.bit};
    a.samples_per_cycle = f.samples_per_cycle;
    a.exec = parse_exec(f.exec);
    return a;
}

/// Trace set plus the array geometry it came from.
struct LoadedTraces {
    TraceFile file;
    ArrayConfig cfg;
    std::optional<RunManifest> manifest;
};

LoadedTraces load_traces(const std::string &path, const ArrayFlags &flags) {
    LoadedTraces lt{read_traces(path), {}, std::nullopt};
    const fs::path mpath = manifest_path_for(path);
    if (fs::exists(mpath)) {
        lt.manifest = read_manifest(mpath);
        lt.cfg = lt.manifest->cfg;
    } else if (lt.file.traces.num_traces() > 0) {
        lt.cfg.rows = lt.file.traces.inputs().front().rows();
        lt.cfg.batch = lt.file.traces.inputs().front().vectors();
    }
    if (flags.rows)
        lt.cfg.rows = *flags.rows;
    if (flags.cols)
        lt.cfg.cols = *flags.cols;
    if (flags.batch)
        lt.cfg.batch = *flags.batch;
    if (flags.psum_width)
        lt.cfg.psum_width = *flags.psum_width;
    lt.cfg.validate();
    for (const auto &x : lt.file.traces.inputs())
        if (x.rows() != lt.cfg.rows || x.vectors() != lt.cfg.batch)
            throw ShapeError("trace inputs are " + std::to_string(x.vectors()) + "x" +
                             std::to_string(x.rows()) + " but the array expects " +
                             std::to_string(lt.cfg.batch) + "x" +
                             std::to_string(lt.cfg.rows));
    return lt;
}

PowerCoefficients coefficients_for(const LoadedTraces &lt) {
    if (lt.manifest && lt.manifest->coeffs.rows() == lt.cfg.rows &&
        lt.manifest->coeffs.cols() == lt.cfg.cols)
        return lt.manifest->coeffs;
    return PowerCoefficients::defaults(lt.cfg);
}

void apply_window(AttackConfig &a, const AttackFlags &f, const LoadedTraces &lt) {
    if (!f.window.empty()) {
        const auto colon = f.window.find(':');
        if (colon == std::string::npos)
            throw PreconditionError("--window expects BEGIN:END");
        const SampleRange w{std::stoul(f.window.substr(0, colon)),
                            std::stoul(f.window.substr(colon + 1))};
        a.row_windows.assign(lt.cfg.rows, w);
    } else if (lt.file.measured && f.samples_per_cycle == 1 &&
               lt.file.traces.samples_per_trace() != lt.cfg.total_cycles()) {
        throw PreconditionError("measured traces need --window or --samples-per-cycle");
    }
}

/// Truth weights of column `col`, taken from a full matrix or a single column.
std::optional<std::vector<std::int8_t>> truth_column(const std::optional<WeightMatrix> &truth,
                                                     const ArrayConfig &cfg, unsigned col) {
    if (!truth)
        return std::nullopt;
    if (truth->rows() != cfg.rows)
        throw ShapeError("truth has " + std::to_string(truth->rows()) + " rows, array has " +
                         std::to_string(cfg.rows));
    if (truth->cols() == cfg.cols)
        return truth->column(col);
    if (truth->cols() == 1)
        return truth->column(0);
    throw ShapeError("truth matrix does not match the array");
}

fs::path column_report(const std::string &report, unsigned col, bool many) {
    if (!many)
        return report;
    fs::path p(report);
    const auto ext = p.extension().string();
    p.replace_extension();
    p += "_col" + std::to_string(col) + (ext.empty() ? ".csv" : ext);
    return p;
}

/// Weight | Correct guess | Rank | Correlation | MTD
void summary_line(std::ostream &out, const GuessChain &chain,
                  const std::optional<std::vector<std::int8_t>> &truth,
                  const std::optional<std::size_t> &mtd = std::nullopt, bool have_mtd = false) {
    out << "column " << chain.column << " | weight ";
    out << (truth ? tuple(*truth) : std::string("?"));
    out << " | guess " << tuple(chain.best().weights);
    out << " | rank ";
    std::optional<std::size_t> rank;
    if (truth) {
        rank = chain.rank_of(*truth);
        out << (rank ? std::to_string(*rank) : std::string("NA"));
    } else {
        out << "?";
    }
    const double corr = rank ? chain.entries[*rank - 1].score : chain.best().score;
    out << " | corr " << fmt(corr);
    out << " | MTD ";
    if (have_mtd)
        out << (mtd ? std::to_string(*mtd) : std::string("NA"));
    else
        out << "-";
    out << '\n';
}

// gen-traces ---------------------------------------------------------------

struct GenFlags {
    ArrayFlags array;
    std::string weights;
    std::size_t n = 0;
    std::uint64_t seed = 1;
    double sigma = 0.0;
    std::optional<std::uint64_t> noise_seed;
    std::optional<double> alpha, beta;
    bool reg_c_only = false;
    std::string dtype = "f64";
    std::string out;
    std::string exec = "omp";
};

int cmd_gen_traces(const GenFlags &f, std::ostream &out) {
    RunManifest m;
    m.weights_file = f.weights;
    m.weights = read_weights(f.weights);
    m.cfg.rows = f.array.rows.value_or(m.weights.rows());
    m.cfg.cols = f.array.cols.value_or(m.weights.cols());
    m.cfg.batch = f.array.batch.value_or(3);
    m.cfg.psum_width = f.array.psum_width.value_or(24);
    m.cfg.validate();
    if (m.weights.rows() != m.cfg.rows || m.weights.cols() != m.cfg.cols)
        throw ShapeError("weight file is " + std::to_string(m.weights.rows()) + "x" +
                         std::to_string(m.weights.cols()) + " but the array is " +
                         std::to_string(m.cfg.rows) + "x" + std::to_string(m.cfg.cols));
    m.seed = f.seed;
    m.num_traces = f.n;
    m.sigma = f.sigma;
    m.noise_seed = f.noise_seed.value_or(f.seed);
    m.coeffs = PowerCoefficients::defaults(m.cfg);
    for (unsigned r = 0; r < m.cfg.rows; ++r)
        for (unsigned c = 0; c < m.cfg.cols; ++c)
            m.coeffs.set(r, c, f.reg_c_only ? 0.0 : f.alpha.value_or(m.coeffs.alpha(r, c)),
                         f.beta.value_or(m.coeffs.beta(r, c)));
    m.coeffs.validate(m.cfg);
    m.dtype = f.dtype == "f32" ? SampleType::f32 : SampleType::f64;

    const TraceMatrix traces = regenerate(m, parse_exec(f.exec));
    const WriteResult wr = write_traces(f.out, traces, m.dtype, false);
    write_manifest(manifest_path_for(f.out), m);
    out << "wrote " << traces.num_traces() << " traces x " << traces.samples_per_trace()
        << " samples to " << f.out << (wr.lossy ? " (f32, lossy)" : "") << '\n';
    return kOk;
}

// attacks ------------------------------------------------------------------

int cmd_attack(const AttackFlags &f, bool two_d, std::ostream &out) {
    LoadedTraces lt = load_traces(f.traces, f.array);
    if (!two_d && !f.array.cols && !lt.manifest)
        lt.cfg.cols = 1;
    AttackConfig acfg = attack_config(f);
    apply_window(acfg, f, lt);

    TraceMatrix traces = std::move(lt.file.traces);
    if (!f.template_file.empty()) {
        const TraceFile tmpl = read_traces(f.template_file);
        traces = subtract_template(traces, tmpl.traces);
    }

    std::optional<WeightMatrix> truth;
    if (!f.truth.empty())
        truth = read_weights(f.truth);

    std::vector<unsigned> cols;
    if (f.col) {
        if (*f.col >= lt.cfg.cols)
            throw IndexError("--col " + std::to_string(*f.col) + " outside an array of " +
                             std::to_string(lt.cfg.cols) + " columns");
        cols.push_back(*f.col);
    } else if (two_d) {
        for (unsigned c = 0; c < lt.cfg.cols; ++c)
            cols.push_back(c);
    } else {
        cols.push_back(0);
    }

    for (unsigned c : cols) {
        const GuessChain chain = chained_column_attack(traces, lt.cfg, c, acfg);
        if (!f.report.empty())
            export_csv(chain, column_report(f.report, c, cols.size() > 1));
        summary_line(out, chain, truth_column(truth, lt.cfg, c));
    }
    return kOk;
}

struct MultiphaseFlags {
    AttackFlags attack;
    std::string profiler = "sim";
    std::string phase_report;
    std::string order = "rtl";
    double profile_sigma = 0.0;
};

int cmd_multiphase(const MultiphaseFlags &f, std::ostream &out) {
    const LoadedTraces lt = load_traces(f.attack.traces, f.attack.array);
    AttackConfig acfg = attack_config(f.attack);
    apply_window(acfg, f.attack, lt);
    const Profiler profiler =
        simulated_profiler(lt.cfg, coefficients_for(lt), {f.profile_sigma, 0});
    const PhaseOrder order = f.order == "ltr" ? PhaseOrder::left_to_right
                                              : PhaseOrder::right_to_left;

    std::optional<WeightMatrix> truth;
    if (!f.attack.truth.empty())
        truth = read_weights(f.attack.truth);

    auto report = [&](const MultiphaseResult &res) {
        if (!f.phase_report.empty())
            fs::create_directories(f.phase_report);
        for (std::size_t i = 0; i < res.phases.size(); ++i) {
            const auto &ph = res.phases[i];
            if (!f.phase_report.empty())
                export_csv(ph.chain, fs::path(f.phase_report) /
                                         ("phase" + std::to_string(i + 1) + "_col" +
                                          std::to_string(ph.column) + ".csv"));
            out << "phase " << i + 1 << " | ";
            summary_line(out, ph.chain, truth_column(truth, lt.cfg, ph.column));
        }
    };
    try {
        const MultiphaseResult res = multiphase_attack(lt.file.traces, lt.cfg, acfg, profiler, order);
        report(res);
        if (!f.attack.report.empty())
            write_weights(f.attack.report, res.weights);
    } catch (const PhaseFailureError &e) {
        report(e.partial());
        throw;
    }
    return kOk;
}

struct TemplateFlags {
    std::string traces;
    std::string weights;
    std::string out;
    double sigma = 0.0;
    std::uint64_t noise_seed = 0;
    ArrayFlags array;
};

int cmd_template_gen(const TemplateFlags &f, std::ostream &out) {
    const LoadedTraces lt = load_traces(f.traces, f.array);
    const WeightMatrix w = read_weights(f.weights);
    const TraceMatrix t = make_template_traces(w, lt.file.traces.inputs(), lt.cfg,
                                               coefficients_for(lt), {f.sigma, f.noise_seed});
    write_traces(f.out, t);
    out << "wrote " << t.num_traces() << " template traces to " << f.out << '\n';
    return kOk;
}

struct MtdFlags {
    AttackFlags attack;
    std::size_t step = 10000;
    std::size_t max_traces = 0;
    bool full = false;
};

int cmd_mtd_sweep(const MtdFlags &f, std::ostream &out) {
    const LoadedTraces lt = load_traces(f.attack.traces, f.attack.array);
    AttackConfig acfg = attack_config(f.attack);
    apply_window(acfg, f.attack, lt);
    const unsigned col = f.attack.col.value_or(0);
    if (col >= lt.cfg.cols)
        throw IndexError("--col outside the array");
    const auto truth = truth_column(read_weights(f.attack.truth), lt.cfg, col);

    const ArrayConfig cfg = lt.cfg;
    const ColumnAttack attack = [&](const TraceMatrix &t) {
        return chained_column_attack(t, cfg, col, acfg);
    };
    const MtdReport rep =
        mtd_sweep(attack, lt.file.traces, f.step, *truth, !f.full, f.max_traces);

    if (!f.attack.report.empty()) {
        std::ofstream csv(f.attack.report);
        if (!csv)
            throw Error("cannot write " + f.attack.report);
        csv << "num_traces,rank\n";
        for (const auto &p : rep.points)
            csv << p.num_traces << ',' << (p.rank ? std::to_string(*p.rank) : "") << '\n';
    }
    for (const auto &p : rep.points)
        out << "traces " << p.num_traces << " rank "
            << (p.rank ? std::to_string(*p.rank) : std::string("NA")) << '\n';
    const std::size_t final_n = rep.points.empty() ? 0 : rep.points.back().num_traces;
    const GuessChain chain = attack(lt.file.traces.prefix(rep.mtd.value_or(final_n)));
    summary_line(out, chain, truth, rep.mtd, true);
    return kOk;
}

struct CorrFlags {
    std::string mode = "aliasing";
    std::string traces;
    std::size_t n = 10000;
    std::uint64_t seed = 1;
    unsigned row = 0;
    std::string prior;
    std::string weights;
    std::string cycles = "active";
    std::string out;
    ArrayFlags array;
};

int cmd_corr_analysis(const CorrFlags &f, std::ostream &out) {
    ArrayConfig cfg;
    std::vector<InputBatch> inputs;
    if (!f.traces.empty()) {
        LoadedTraces lt = load_traces(f.traces, f.array);
        cfg = lt.cfg;
        inputs = lt.file.traces.inputs();
    } else {
        cfg.rows = f.array.rows.value_or(3);
        cfg.cols = f.array.cols.value_or(f.mode == "pe-hd" ? 3 : 1);
        cfg.batch = f.array.batch.value_or(3);
        cfg.psum_width = f.array.psum_width.value_or(24);
        inputs = gen_inputs(f.seed, f.n, cfg);
    }

    if (f.mode == "aliasing") {
        std::vector<std::int8_t> prior;
        if (!f.prior.empty()) {
            const WeightMatrix p = parse_weights(f.prior);
            for (unsigned c = 0; c < p.cols(); ++c)
                prior.push_back(p.at(0, c));
        }
        const AliasingMap map = model_aliasing(inputs, prior, f.row, cfg.psum_width);
        if (!f.out.empty())
            export_csv(map, f.out);
        out << "row " << f.row << " aliasing median |corr| "
            << fmt(median_abs_off_diagonal(map), "%.6g") << '\n';
        return kOk;
    }

    if (f.weights.empty())
        throw PreconditionError("--mode pe-hd needs --weights");
    const WeightMatrix w = read_weights(f.weights);
    const PECorrelationTable table = pe_hd_correlation(
        cfg, w, inputs,
        f.cycles == "transitions" ? CycleSelection::shared_transitions
                                  : CycleSelection::shared_active);
    if (!f.out.empty())
        export_csv(table, f.out);
    for (std::size_t i = 0; i < table.size(); ++i) {
        for (std::size_t j = 0; j < table.size(); ++j)
            out << (j ? " " : "")
                << (table.defined(i, j) ? fmt(table.at(i, j), "%6.3f") : std::string("     -"));
        out << '\n';
    }
    return kOk;
}

struct ConvFlags {
    long long in_width = 0, in_height = 0, filter_width = 0, filter_height = 0;
    long long stride = 1, padding = 0;
};

int cmd_conv_dims(const ConvFlags &f, std::ostream &out) {
    const ConvDims d = conv_output_dims(
        {f.in_width, f.in_height, f.filter_width, f.filter_height, f.stride, f.padding});
    out << d.width << ' ' << d.height << '\n';
    return kOk;
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Power side-channel analysis of weight-stationary systolic arrays", "sysdpa"};
    app.set_version_flag("--version", std::string(SYSDPA_VERSION));
    app.require_subcommand(1, 1);

    std::function<int()> action;

    GenFlags gen;
    auto *c_gen = app.add_subcommand("gen-traces", "Simulate traces for a weight matrix");
    add_array_flags(c_gen, gen.array);
    c_gen->add_option("--weights", gen.weights, "Weight file")->required()->check(CLI::ExistingFile);
    c_gen->add_option("--n", gen.n, "Number of traces")->required()->check(CLI::PositiveNumber);
    c_gen->add_option("--seed", gen.seed, "Input PRNG seed");
    c_gen->add_option("--sigma", gen.sigma, "Gaussian noise standard deviation")
        ->check(CLI::NonNegativeNumber);
    c_gen->add_option("--noise-seed", gen.noise_seed, "Noise PRNG seed (default: --seed)");
    c_gen->add_option("--alpha", gen.alpha, "Reg A coefficient for every PE");
    c_gen->add_option("--beta", gen.beta, "Reg C coefficient for every PE");
    c_gen->add_flag("--reg-c-only", gen.reg_c_only, "Drop the Reg A term");
    c_gen->add_option("--dtype", gen.dtype, "Sample storage type")
        ->check(CLI::IsMember({"f32", "f64"}));
    c_gen->add_option("--out", gen.out, "Output SCTR file")->required();
    c_gen->add_option("--exec", gen.exec, "Kernel implementation")
        ->check(CLI::IsMember({"omp", "serial"}));
    c_gen->callback([&] { action = [&] { return cmd_gen_traces(gen, out); }; });

    AttackFlags a1;
    auto *c_a1 = app.add_subcommand("attack-1d", "Chained attack on one PE column");
    add_attack_flags(c_a1, a1, true);
    c_a1->callback([&] { action = [&] { return cmd_attack(a1, false, out); }; });

    AttackFlags a2;
    auto *c_a2 = app.add_subcommand("attack-2d", "Per-column chained attack on a 2D array");
    add_attack_flags(c_a2, a2, true);
    c_a2->add_option("--template", a2.template_file, "Template traces to subtract first")
        ->check(CLI::ExistingFile);
    c_a2->callback([&] { action = [&] { return cmd_attack(a2, true, out); }; });

    MultiphaseFlags mp;
    auto *c_mp = app.add_subcommand("attack-multiphase", "Column-by-column template attack");
    add_attack_flags(c_mp, mp.attack, false);
    c_mp->add_option("--profiler", mp.profiler, "Profiling device")
        ->check(CLI::IsMember({"sim"}));
    c_mp->add_option("--phase-report", mp.phase_report, "Directory for per-phase CSVs");
    c_mp->add_option("--order", mp.order, "Column order")->check(CLI::IsMember({"rtl", "ltr"}));
    c_mp->add_option("--profile-sigma", mp.profile_sigma, "Noise of the profiled device")
        ->check(CLI::NonNegativeNumber);
    c_mp->callback([&] { action = [&] { return cmd_multiphase(mp, out); }; });

    TemplateFlags tg;
    auto *c_tg = app.add_subcommand("template-gen", "Template traces on a trace file's inputs");
    c_tg->add_option("--traces", tg.traces, "SCTR file providing the inputs")
        ->required()
        ->check(CLI::ExistingFile);
    c_tg->add_option("--weights", tg.weights, "Profiled weight file")
        ->required()
        ->check(CLI::ExistingFile);
    c_tg->add_option("--out", tg.out, "Output SCTR file")->required();
    c_tg->add_option("--sigma", tg.sigma, "Noise of the profiled device")
        ->check(CLI::NonNegativeNumber);
    c_tg->add_option("--noise-seed", tg.noise_seed, "Noise PRNG seed");
    add_array_flags(c_tg, tg.array);
    c_tg->callback([&] { action = [&] { return cmd_template_gen(tg, out); }; });

    MtdFlags mt;
    auto *c_mt = app.add_subcommand("mtd-sweep", "Traces needed to rank the truth first");
    add_attack_flags(c_mt, mt.attack, true);
    c_mt->get_option("--truth")->required();
    c_mt->add_option("--step", mt.step, "Prefix increment")->check(CLI::PositiveNumber);
    c_mt->add_option("--max-traces", mt.max_traces, "Cap on the prefix size (0 = all)");
    c_mt->add_flag("--full", mt.full, "Keep sweeping after the first rank-1 prefix");
    c_mt->callback([&] { action = [&] { return cmd_mtd_sweep(mt, out); }; });

    CorrFlags cf;
    auto *c_cf = app.add_subcommand("corr-analysis", "Aliasing map or inter-PE correlation");
    c_cf->add_option("--mode", cf.mode, "Analysis")->check(CLI::IsMember({"aliasing", "pe-hd"}));
    c_cf->add_option("--traces", cf.traces, "Take inputs from an SCTR file")
        ->check(CLI::ExistingFile);
    c_cf->add_option("--n", cf.n, "Random input batches")->check(CLI::PositiveNumber);
    c_cf->add_option("--seed", cf.seed, "Input PRNG seed");
    c_cf->add_option("--row", cf.row, "Attacked row (aliasing)");
    c_cf->add_option("--prior", cf.prior, "Known weights above the row, e.g. 120,73");
    c_cf->add_option("--weights", cf.weights, "Weight file (pe-hd)")->check(CLI::ExistingFile);
    c_cf->add_option("--cycles", cf.cycles, "Cycles compared (pe-hd)")
        ->check(CLI::IsMember({"active", "transitions"}));
    c_cf->add_option("--out", cf.out, "CSV output");
    add_array_flags(c_cf, cf.array);
    c_cf->callback([&] { action = [&] { return cmd_corr_analysis(cf, out); }; });

    ConvFlags cv;
    auto *c_cv = app.add_subcommand("conv-dims", "Output size of a convolution layer");
    c_cv->add_option("--in-width", cv.in_width, "Input width")->required();
    c_cv->add_option("--in-height", cv.in_height, "Input height")->required();
    c_cv->add_option("--filter-width", cv.filter_width, "Filter width")->required();
    c_cv->add_option("--filter-height", cv.filter_height, "Filter height")->required();
    c_cv->add_option("--stride", cv.stride, "Stride");
    c_cv->add_option("--padding", cv.padding, "Zero padding");
    c_cv->callback([&] { action = [&] { return cmd_conv_dims(cv, out); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        return action();
    } catch (const DegenerateAttackError &e) {
        err << "sysdpa: degenerate attack: " << e.what() << '\n';
        return kDegenerate;
    } catch (const PhaseFailureError &e) {
        err << "sysdpa: " << e.what() << '\n';
        return kDegenerate;
    } catch (const std::exception &e) {
        err << "sysdpa: " << e.what() << '\n';
        return kUsage;
    }
}

} // namespace sysdpa::cli
