// SPDX-License-Identifier: Apache-2.0
//
// radiv - link-level simulation of repeater-assisted DFT-s-OFDM uplinks
// Copyright (C) 2026 radiv contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "radiv/errors.hpp"
#include "radiv/experiment.hpp"

using namespace radiv;
namespace fs = std::filesystem;

namespace
{

const fs::path kConfigDir = RADIV_CONFIG_DIR;

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("radiv_test_experiment_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string error_of(const std::string& text)
{
    try
    {
        parse_config_text(text);
    }
    catch (const ConfigError& e)
    {
        return e.what();
    }
    return {};
}

const char* kMinimal = "[scenario.a]\nl_d = 4\n";

ExperimentConfig tiny_table1()
{
    ExperimentConfig cfg = parse_and_validate(kConfigDir / "table1.cfg");
    cfg.counts = RunCounts{3, 2, 2, 1};
    return cfg;
}

} // namespace

TEST_CASE("parse_and_validate: bundled reference setup")
{
    const ExperimentConfig cfg = parse_and_validate(kConfigDir / "table1.cfg");
    CHECK(cfg.waveform.n_fft == 128);
    CHECK(cfg.waveform.m_alloc == 72);
    CHECK(cfg.waveform.cp_len == 32);
    CHECK(cfg.waveform.alloc_start == 0);
    CHECK(cfg.constellation == "qpsk");
    REQUIRE(cfg.scenarios.size() == 3);
    CHECK(cfg.scenarios[0].name == "direct");
    CHECK(cfg.scenarios[0].channel.l_d == 4);
    CHECK(cfg.scenarios[0].channel.repeaters.empty());
    const auto& reps = cfg.scenarios[2].channel.repeaters;
    REQUIRE(reps.size() == 2);
    CHECK(reps[0].delay == 8);
    CHECK(reps[0].gain == 1.0);
    CHECK(reps[0].l_ur == 6);
    CHECK(reps[0].l_rg == 6);
    CHECK(reps[1].delay == 14);
    CHECK(reps[1].gain == 1.0);
    CHECK(cfg.scenarios[2].channel.support() == 25);
    CHECK(cfg.grid_full.values().size() == 26);
    CHECK(cfg.grid_semi.values().size() == 46);
    CHECK(cfg.grid_semi.values().back() == 45.0);
    CHECK(cfg.counts.full_frames_per_snr == 100000);
    CHECK(cfg.counts.semi_channels_per_snr == 1000000);
    CHECK(cfg.counts.semi_interf_samples == 1000);
    CHECK(cfg.counts.semi_chunk == 700);
    CHECK(cfg.seed == 20260101);

    const ExperimentConfig full_scale = parse_and_validate(kConfigDir / "table1.cfg", {.paper_scale = true});
    CHECK(full_scale.counts.semi_channels_per_snr == 30000000);
    CHECK(full_scale.digest() != cfg.digest());
}

TEST_CASE("parse_and_validate: debug config")
{
    const ExperimentConfig cfg = parse_and_validate(kConfigDir / "flat_debug.cfg");
    REQUIRE(cfg.scenarios.size() == 1);
    CHECK(cfg.scenarios[0].channel.fading == Fading::fixed);
}

TEST_CASE("parse_config_text: defaults")
{
    const ExperimentConfig cfg = parse_config_text(kMinimal);
    CHECK(cfg.waveform.n_fft == 128);
    CHECK(cfg.constellation == "qpsk");
    CHECK(cfg.counts.semi_chunk == 700);
    CHECK(cfg.grid_full.values().size() == 26);
}

TEST_CASE("parse_config_text: CP violation names the scenario and delay")
{
    const std::string msg = error_of("[scenario.late]\nl_d = 4\nrepeaters = 22:1.0:6:6\n");
    CHECK(msg.find("late") != std::string::npos);
    CHECK(msg.find("22") != std::string::npos);
    CHECK(msg.find("33") != std::string::npos);
    CHECK(error_of("[scenario.edge]\nl_d = 4\nrepeaters = 21:1.0:6:6\n").empty());
}

TEST_CASE("parse_config_text: rejected inputs")
{
    CHECK_FALSE(error_of("[waveform]\nn_fft = 128\n").empty());                          // no scenarios
    CHECK_FALSE(error_of(std::string("[modulation]\nconstellation = psk8\n") + kMinimal).empty());
    CHECK_FALSE(error_of("[scenario.a\nl_d = 4\n").empty());                             // syntax
    CHECK_FALSE(error_of(std::string("[bogus]\nx = 1\n") + kMinimal).empty());
    CHECK_FALSE(error_of(std::string("[waveform]\nnfft = 128\n") + kMinimal).empty());   // unknown key
    CHECK_FALSE(error_of("[scenario.a]\nl_d = 4\nrepeaters = 8.5:1.0:6:6\n").empty());  // fractional delay
    CHECK_FALSE(error_of("[scenario.a]\nl_d = 4\nrepeaters = 8:1.0:6\n").empty());
    CHECK_FALSE(error_of("[scenario.a]\nl_d = four\n").empty());
    CHECK_FALSE(error_of("[scenario.a]\nl_d = 4\nfading = ricean\n").empty());
    CHECK_FALSE(error_of(std::string("[grid]\nsemi = 0:0:10\n") + kMinimal).empty());
    CHECK_FALSE(error_of(std::string("[grid]\nsemi = 10:1:0\n") + kMinimal).empty());
    CHECK_FALSE(error_of(std::string("[counts]\nsemi_chunk = 0\n") + kMinimal).empty());
    CHECK_FALSE(error_of(std::string("[waveform]\nm_alloc = 200\n") + kMinimal).empty());
    CHECK_FALSE(error_of("[scenario.bad name]\nl_d = 4\n").empty());
    CHECK_THROWS_AS(parse_and_validate(kConfigDir / "does_not_exist.cfg"), ConfigError);
}

TEST_CASE("validate: programmatic configs")
{
    ExperimentConfig cfg;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.scenarios = {{"a", ChannelConfig{}}, {"a", ChannelConfig{}}};
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.scenarios[1].name = "b";
    CHECK_NOTHROW(validate(cfg));
    cfg.scenarios[1].channel.cp_len = 16;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("digest: covers results-relevant fields only")
{
    ExperimentConfig a = parse_config_text(kMinimal), b = a;
    b.seed = 99;
    b.output_dir = "elsewhere";
    CHECK(a.digest() == b.digest());
    b.counts.semi_interf_samples = 7;
    CHECK(a.digest() != b.digest());
    b = a;
    b.scenarios[0].channel.l_d = 3;
    CHECK(a.digest() != b.digest());
}

TEST_CASE("SnrGrid::values")
{
    CHECK(SnrGrid{0, 1, 25}.values().size() == 26);
    CHECK(SnrGrid{0, 2, 8}.values() == std::vector<double>{0, 2, 4, 6, 8});
    CHECK(SnrGrid{0, 0.1, 1}.values().size() == 11);
    CHECK(SnrGrid{5, 1, 5}.values() == std::vector<double>{5});
}

TEST_CASE("run_sweep: flat channel rows equal the closed form")
{
    ExperimentConfig cfg = parse_and_validate(kConfigDir / "flat_debug.cfg");
    const ResultsFile res = run_sweep(cfg, {RunMode::semi, 1});
    REQUIRE(res.rows.size() == 11);
    for (const auto& row : res.rows)
    {
        const double expect = q_function(std::sqrt(std::pow(10.0, row.point.snr_db / 10.0)));
        CHECK(std::abs(row.point.ber - expect) <= 1e-10 * expect);
        CHECK(row.mode == SweepMode::semi);
    }
}

TEST_CASE("run_sweep: row completeness and order")
{
    const ExperimentConfig cfg = tiny_table1();
    const ResultsFile res = run_sweep(cfg, {RunMode::both, 1});
    REQUIRE(res.rows.size() == 3 * 26 + 3 * 46);
    std::set<std::tuple<std::string, int, double>> seen;
    std::size_t full = 0;
    for (const auto& r : res.rows)
    {
        seen.emplace(r.scenario, int(r.mode), r.point.snr_db);
        full += r.mode == SweepMode::full;
        CHECK(r.point.n_effective > 0);
        CHECK(r.point.ber <= 0.5 + 1e-12);
        CHECK(r.diversity.has_value() ==
              (r.point.snr_db > 0.0 && r.point.ber > 0.0 && r.point.ber < 1.0));
    }
    CHECK(seen.size() == res.rows.size());
    CHECK(full == 3 * 26);
    // Scenario order follows the config; full precedes semi; snr increases.
    CHECK(res.rows.front().scenario == "direct");
    CHECK(res.rows.front().mode == SweepMode::full);
    CHECK(res.rows[26].mode == SweepMode::semi);
    CHECK(res.rows.back().scenario == "two_repeaters");
    for (const auto& sw : res.sweeps())
        for (std::size_t i = 1; i < sw.points.size(); ++i)
            CHECK(sw.points[i].snr_db > sw.points[i - 1].snr_db);
    CHECK(res.sweeps().size() == 6);
    CHECK(res.digest == cfg.digest());
    CHECK(res.seed == cfg.seed);

    CHECK(run_sweep(cfg, {RunMode::full, 1}).rows.size() == 78);
}

TEST_CASE("run_sweep: diversity absent at non-positive SNR")
{
    ExperimentConfig cfg = parse_and_validate(kConfigDir / "flat_debug.cfg");
    cfg.grid_semi = {-4.0, 2.0, 4.0};
    const ResultsFile res = run_sweep(cfg, {RunMode::semi, 1});
    for (const auto& r : res.rows)
        CHECK(r.diversity.has_value() == (r.point.snr_db > 0.0));
}

TEST_CASE("run_sweep: output independent of the worker count")
{
    ExperimentConfig cfg = tiny_table1();
    cfg.grid_full = {0, 5, 20};
    cfg.grid_semi = {0, 5, 40};
    cfg.counts = RunCounts{2500, 40, 5, 7};
    const std::string one = format_results(run_sweep(cfg, {RunMode::both, 1}));
    CHECK(one == format_results(run_sweep(cfg, {RunMode::both, 3})));
    CHECK(one == format_results(run_sweep(cfg, {RunMode::both, 8})));
    ExperimentConfig reseeded = cfg;
    reseeded.seed += 1;
    CHECK(one != format_results(run_sweep(reseeded, {RunMode::both, 1})));
}

TEST_CASE("results: text round trip")
{
    ExperimentConfig cfg = tiny_table1();
    cfg.grid_semi = {0, 10, 40};
    cfg.grid_full = {0, 10, 20};
    const ResultsFile res = run_sweep(cfg, {RunMode::both, 1});
    const std::string text = format_results(res);
    CHECK(text.rfind("# radiv-results v1 ", 0) == 0);
    const ResultsFile back = parse_results(text);
    CHECK(back.digest == res.digest);
    CHECK(back.seed == res.seed);
    CHECK(back.tool_version == res.tool_version);
    REQUIRE(back.rows.size() == res.rows.size());
    CHECK(format_results(back) == text);

    const fs::path dir = scratch("roundtrip");
    write_results(res, dir / "sub" / "r.csv");
    CHECK(slurp(dir / "sub" / "r.csv") == text);
    CHECK(format_results(read_results(dir / "sub" / "r.csv")) == text);
    CHECK_FALSE(fs::exists(dir / "sub" / "r.csv.tmp"));

    CHECK_THROWS_AS(parse_results(""), ConfigError);
    CHECK_THROWS_AS(parse_results("# radiv-results v1 tool=1 digest=00 seed=1\n"), ConfigError);
    CHECK_THROWS_AS(read_results(dir / "missing.csv"), ConfigError);
    std::string broken = text;
    broken += "direct,semi,1\n";
    CHECK_THROWS_AS(parse_results(broken), ConfigError);
}

TEST_CASE("emit_curves")
{
    const fs::path dir = scratch("curves");
    ResultsFile single;
    single.digest = 0xabc;
    single.seed = 3;
    single.rows.push_back({"flat", SweepMode::semi, {10.0, 1e-3, 100, 1e-5}, 0.3});
    const auto one = emit_curves(single, CurveKind::ber, dir);
    REQUIRE(one.size() == 1);
    CHECK(one[0].filename() == "flat_ber.dat");
    std::istringstream lines(slurp(one[0]));
    std::string line;
    int data_rows = 0;
    while (std::getline(lines, line))
        if (!line.empty() && line[0] != '#')
            ++data_rows;
    CHECK(data_rows == 1);

    ExperimentConfig cfg = tiny_table1();
    cfg.grid_semi = {0, 10, 40};
    cfg.grid_full = {0, 10, 20};
    const ResultsFile res = run_sweep(cfg, {RunMode::both, 1});
    const auto ber = emit_curves(res, CurveKind::ber, dir / "b");
    CHECK(ber.size() == 3);
    const std::string text = slurp(dir / "b" / "direct_ber.dat");
    CHECK(text.find("# mode=semi") != std::string::npos);
    CHECK(text.find("# mode=full") != std::string::npos);
    CHECK(text.find("\n\n\n# mode=full") != std::string::npos);

    const auto div = emit_curves(res, CurveKind::diversity, dir / "d");
    CHECK(div.size() == 3);
    const std::string dtext = slurp(dir / "d" / "two_repeaters_diversity.dat");
    CHECK(dtext.find("# mode=full") == std::string::npos);
    std::istringstream dl(dtext);
    data_rows = 0;
    while (std::getline(dl, line))
        if (!line.empty() && line[0] != '#')
            ++data_rows;
    CHECK(data_rows <= 4); // snr 0 carries no diversity

    CHECK_THROWS_AS(emit_curves(ResultsFile{}, CurveKind::ber, dir), ConfigError);
    ResultsFile full_only;
    full_only.rows.push_back({"x", SweepMode::full, {10.0, 1e-3, 100, 1e-5}, 0.3});
    CHECK_THROWS_AS(emit_curves(full_only, CurveKind::diversity, dir), ConfigError);
    CHECK_THROWS_AS(curve_kind_from_name("pdf"), ConfigError);
    CHECK(curve_kind_from_name("diversity") == CurveKind::diversity);
    CHECK(run_mode_from_name("both") == RunMode::both);
    CHECK_THROWS_AS(run_mode_from_name("all"), ConfigError);
}
