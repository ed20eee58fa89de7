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

#include "sysdpa/trace_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "sysdpa");
    std::vector<const char *> argv;
    for (const auto &a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code =
        sysdpa::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Cli : public ::testing::Test {
  protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("sysdpa_cli_" +
                std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        std::ofstream(p("dot.txt")) << "120\n73\n-96\n";
        std::ofstream(p("grid.txt")) << "23 120 -6\n-107 73 -31\n74 -96 17\n";
        std::ofstream(p("zero.txt")) << "0\n0\n0\n";
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string p(const std::string &name) const { return (dir_ / name).string(); }

  private:
    fs::path dir_;
};

} // namespace

TEST(CliBasics, ConvDims) {
    const auto r = run({"conv-dims", "--in-width", "32", "--in-height", "32", "--filter-width",
                        "5", "--filter-height", "5", "--stride", "1", "--padding", "0"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "28 28\n");
    const auto bad = run({"conv-dims", "--in-width", "32", "--in-height", "32",
                          "--filter-width", "4", "--filter-height", "4", "--stride", "3"});
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.err.find("stride"), std::string::npos);
}

TEST(CliBasics, UsageErrors) {
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"no-such-command"}).code, 1);
    EXPECT_EQ(run({"conv-dims", "--bogus"}).code, 1);
    EXPECT_EQ(run({"attack-1d", "--traces", "/nonexistent/file.sctr"}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);
    const auto v = run({"--version"});
    EXPECT_EQ(v.code, 0);
    EXPECT_NE(v.out.find(SYSDPA_VERSION), std::string::npos);
}

TEST_F(Cli, GenerateThenAttackDotProduct) {
    ASSERT_EQ(run({"gen-traces", "--rows", "3", "--cols", "1", "--batch", "3", "--weights",
                   p("dot.txt"), "--n", "10000", "--seed", "5", "--sigma", "0", "--out",
                   p("dot.sctr")})
                  .code,
              0);
    EXPECT_TRUE(fs::exists(p("dot.sctr.manifest")));
    const auto r = run({"attack-1d", "--traces", p("dot.sctr"), "--col", "0", "--k", "50",
                        "--score", "signed", "--truth", p("dot.txt"), "--report",
                        p("dot.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("guess (120,73,-96) | rank 1 |"), std::string::npos) << r.out;
    std::ifstream csv(p("dot.csv"));
    std::string line;
    std::size_t lines = 0;
    while (std::getline(csv, line))
        ++lines;
    EXPECT_EQ(lines, 51u);
}

TEST_F(Cli, RerunsAreIdentical) {
    for (const char *out : {"a.sctr", "b.sctr"})
        ASSERT_EQ(run({"gen-traces", "--weights", p("dot.txt"), "--n", "3000", "--seed", "9",
                       "--sigma", "2.5", "--out", p(out)})
                      .code,
                  0);
    EXPECT_EQ(slurp(p("a.sctr")), slurp(p("b.sctr")));
    const auto m = sysdpa::read_manifest(p("a.sctr.manifest"));
    sysdpa::write_traces(p("c.sctr"), sysdpa::regenerate(m));
    EXPECT_EQ(slurp(p("a.sctr")), slurp(p("c.sctr")));

    const auto r1 = run({"attack-1d", "--traces", p("a.sctr"), "--report", p("r1.csv")});
    const auto r2 = run({"attack-1d", "--traces", p("b.sctr"), "--report", p("r2.csv")});
    EXPECT_EQ(r1.out, r2.out);
    EXPECT_EQ(slurp(p("r1.csv")), slurp(p("r2.csv")));
    EXPECT_NE(r1.out.find("weight ? |"), std::string::npos);
}

TEST_F(Cli, DegenerateAttackExitsTwo) {
    ASSERT_EQ(run({"gen-traces", "--weights", p("zero.txt"), "--n", "200", "--reg-c-only",
                   "--out", p("z.sctr")})
                  .code,
              0);
    const auto r = run({"attack-1d", "--traces", p("z.sctr")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("degenerate"), std::string::npos);
}

TEST_F(Cli, ShapeMismatchExitsOne) {
    EXPECT_EQ(run({"gen-traces", "--weights", p("grid.txt"), "--rows", "2", "--n", "10",
                   "--out", p("x.sctr")})
                  .code,
              1);
    ASSERT_EQ(run({"gen-traces", "--weights", p("dot.txt"), "--n", "100", "--out", p("d.sctr")})
                  .code,
              0);
    EXPECT_EQ(run({"attack-1d", "--traces", p("d.sctr"), "--truth", p("grid.txt")}).code, 1);
    EXPECT_EQ(run({"attack-1d", "--traces", p("d.sctr"), "--col", "1"}).code, 1);
}

TEST_F(Cli, Conventional2dAndTemplates) {
    ASSERT_EQ(run({"gen-traces", "--rows", "3", "--cols", "3", "--weights", p("grid.txt"),
                   "--n", "10000", "--seed", "3", "--out", p("g.sctr")})
                  .code,
              0);
    const auto raw = run({"attack-2d", "--traces", p("g.sctr"), "--truth", p("grid.txt"),
                          "--report", p("raw.csv")});
    ASSERT_EQ(raw.code, 0) << raw.err;
    EXPECT_NE(raw.out.find("column 2 | weight (-6,-31,17) | guess (-6,-31,17) | rank 1"),
              std::string::npos)
        << raw.out;
    for (int c = 0; c < 3; ++c)
        EXPECT_TRUE(fs::exists(p("raw_col" + std::to_string(c) + ".csv")));

    // Profile with the last column known: column 1 becomes attackable.
    std::ofstream(p("phase1.txt")) << "0 0 -6\n0 0 -31\n0 0 17\n";
    ASSERT_EQ(run({"template-gen", "--traces", p("g.sctr"), "--weights", p("phase1.txt"),
                   "--out", p("t1.sctr")})
                  .code,
              0);
    const auto tmpl = run({"attack-2d", "--traces", p("g.sctr"), "--template", p("t1.sctr"),
                           "--col", "1", "--truth", p("grid.txt")});
    ASSERT_EQ(tmpl.code, 0) << tmpl.err;
    EXPECT_NE(tmpl.out.find("column 1 | weight (120,73,-96) | guess (120,73,-96) | rank 1"),
              std::string::npos)
        << tmpl.out;
}

TEST_F(Cli, MultiphaseWritesPhaseReports) {
    ASSERT_EQ(run({"gen-traces", "--rows", "3", "--cols", "3", "--weights", p("grid.txt"),
                   "--n", "50000", "--seed", "4", "--out", p("g.sctr")})
                  .code,
              0);
    const auto r = run({"attack-multiphase", "--traces", p("g.sctr"), "--profiler", "sim",
                        "--phase-report", p("phases"), "--truth", p("grid.txt"), "--report",
                        p("recovered.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(p("phases/phase1_col2.csv")));
    EXPECT_TRUE(fs::exists(p("phases/phase2_col1.csv")));
    EXPECT_TRUE(fs::exists(p("phases/phase3_col0.csv")));
    EXPECT_EQ(sysdpa::read_weights(p("recovered.txt")), sysdpa::read_weights(p("grid.txt")));
    std::size_t rank_one = 0;
    for (std::size_t pos = 0; (pos = r.out.find("| rank 1 |", pos)) != std::string::npos; ++pos)
        ++rank_one;
    EXPECT_EQ(rank_one, 3u) << r.out;
}

TEST_F(Cli, MtdSweepReportsDisclosure) {
    ASSERT_EQ(run({"gen-traces", "--weights", p("dot.txt"), "--n", "20000", "--seed", "6",
                   "--out", p("m.sctr")})
                  .code,
              0);
    const auto r = run({"mtd-sweep", "--traces", p("m.sctr"), "--truth", p("dot.txt"),
                        "--step", "10000", "--report", p("mtd.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("| MTD 10000"), std::string::npos) << r.out;
    EXPECT_EQ(slurp(p("mtd.csv")), "num_traces,rank\n10000,1\n");
    EXPECT_EQ(run({"mtd-sweep", "--traces", p("m.sctr"), "--step", "10000"}).code, 1);
}

TEST_F(Cli, CorrelationAnalyses) {
    const auto alias = run({"corr-analysis", "--mode", "aliasing", "--n", "2000", "--row", "1",
                            "--prior", "120", "--out", p("alias.csv")});
    ASSERT_EQ(alias.code, 0) << alias.err;
    EXPECT_NE(alias.out.find("median"), std::string::npos);
    EXPECT_TRUE(fs::exists(p("alias.csv")));

    const auto pe = run({"corr-analysis", "--mode", "pe-hd", "--weights", p("grid.txt"), "--n",
                         "2000", "--out", p("pe.csv")});
    ASSERT_EQ(pe.code, 0) << pe.err;
    std::ifstream csv(p("pe.csv"));
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, "pe,PE1,PE2,PE3,PE4,PE5,PE6,PE7,PE8,PE9");
    EXPECT_EQ(run({"corr-analysis", "--mode", "pe-hd"}).code, 1);
    EXPECT_EQ(run({"corr-analysis", "--mode", "nonsense"}).code, 1);
}
