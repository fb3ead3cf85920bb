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

#include "radiv/errors.hpp"
#include "radiv/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

void print_summary(const radiv::ExperimentConfig& cfg)
{
    std::printf("config ok: digest=%016llx seed=%llu\n", static_cast<unsigned long long>(cfg.digest()),
                static_cast<unsigned long long>(cfg.seed));
    std::printf("  waveform N=%d M=%d CP=%d alloc_start=%d constellation=%s\n", cfg.waveform.n_fft,
                cfg.waveform.m_alloc, cfg.waveform.cp_len, cfg.waveform.alloc_start, cfg.constellation.c_str());
    std::printf("  counts full=%llu semi=%llu interf=%llu chunk=%llu\n",
                static_cast<unsigned long long>(cfg.counts.full_frames_per_snr),
                static_cast<unsigned long long>(cfg.counts.semi_channels_per_snr),
                static_cast<unsigned long long>(cfg.counts.semi_interf_samples),
                static_cast<unsigned long long>(cfg.counts.semi_chunk));
    for (const auto& s : cfg.scenarios)
    {
        std::printf("  scenario %s: l_d=%d support=%d", s.name.c_str(), s.channel.l_d, s.channel.support());
        for (const auto& r : s.channel.repeaters)
            std::printf(" [delay=%d gain=%g l_ur=%d l_rg=%d]", r.delay, r.gain, r.l_ur, r.l_rg);
        std::printf("\n");
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Repeater-assisted DFT-s-OFDM BER simulator"};
    app.set_version_flag("--version", std::string("radiv ") + RADIV_VERSION);
    app.require_subcommand(1);

    std::string config_path;
    std::string mode = "both";
    std::uint64_t seed = 0;
    std::string out;
    bool paper_scale = false;
    unsigned workers = 1;

    auto* validate_cmd = app.add_subcommand("validate", "Parse and validate a configuration file");
    validate_cmd->add_option("--config", config_path, "Configuration file")->required();
    validate_cmd->add_flag("--paper-scale", paper_scale, "Use the [paper_counts] per-SNR counts");

    auto* run_cmd = app.add_subcommand("run", "Run semi-analytic and/or full-stack sweeps");
    run_cmd->add_option("--config", config_path, "Configuration file")->required();
    run_cmd->add_option("--mode", mode, "semi | full | both")->check(CLI::IsMember({"semi", "full", "both"}));
    auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the configured seed");
    run_cmd->add_option("--out", out, "Results file (default <output_dir>/results.csv)");
    run_cmd->add_flag("--paper-scale", paper_scale, "Use the [paper_counts] per-SNR counts");
    run_cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    std::string results_path;
    std::string kind = "ber";
    auto* curves_cmd = app.add_subcommand("curves", "Write per-scenario curve tables from a results file");
    curves_cmd->add_option("--results", results_path, "Results file")->required();
    curves_cmd->add_option("--kind", kind, "ber | diversity")->check(CLI::IsMember({"ber", "diversity"}));
    curves_cmd->add_option("--out", out, "Output directory")->required();
    curves_cmd->add_option("--config", config_path, "Check the results digest against this configuration");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    radiv::ExperimentConfig cfg;
    try
    {
        if (!config_path.empty())
            cfg = radiv::parse_and_validate(config_path, radiv::ParseOptions{paper_scale});
        if (*seed_opt)
            cfg.seed = seed;
    }
    catch (const std::exception& e)
    {
        std::cerr << "validation failed: " << e.what() << '\n';
        return kExitValidation;
    }

    try
    {
        if (*validate_cmd)
        {
            print_summary(cfg);
        }
        else if (*run_cmd)
        {
            const std::filesystem::path path = out.empty() ? std::filesystem::path(cfg.output_dir) / "results.csv"
                                                           : std::filesystem::path(out);
            const auto results = radiv::run_sweep(cfg, radiv::RunOptions{radiv::run_mode_from_name(mode), workers});
            radiv::write_results(results, path);
            std::printf("wrote %zu rows to %s\n", results.rows.size(), path.string().c_str());
        }
        else if (*curves_cmd)
        {
            const auto results = radiv::read_results(results_path);
            if (!config_path.empty() && results.digest != cfg.digest())
            {
                std::cerr << "validation failed: results digest does not match configuration\n";
                return kExitValidation;
            }
            for (const auto& p : radiv::emit_curves(results, radiv::curve_kind_from_name(kind), out))
                std::printf("%s\n", p.string().c_str());
        }
    }
    catch (const radiv::ConfigError& e)
    {
        std::cerr << "validation failed: " << e.what() << '\n';
        return kExitValidation;
    }
    catch (const std::exception& e)
    {
        std::cerr << "run failed: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}
