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

#ifndef RADIV_EXPERIMENT_HPP
#define RADIV_EXPERIMENT_HPP

#include "radiv/ber.hpp"
#include "radiv/channel.hpp"
#include "radiv/waveform.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace radiv
{

struct ScenarioConfig
{
    std::string name;
    ChannelConfig channel;
};

// Inclusive dB grid start:step:stop.
struct SnrGrid
{
    double start = 0.0;
    double step = 1.0;
    double stop = 0.0;

    std::vector<double> values() const;
};

struct RunCounts
{
    std::uint64_t full_frames_per_snr = 100000;
    std::uint64_t semi_channels_per_snr = 1000000;
    std::uint64_t semi_interf_samples = 1000;
    std::uint64_t semi_chunk = 700;

    // Full reference-scale counts (3e7 semi-analytic channels per SNR).
    static RunCounts paper_scale();
};

struct ExperimentConfig
{
    WaveformConfig waveform;
    std::vector<ScenarioConfig> scenarios;
    std::string constellation = "qpsk";
    SnrGrid grid_semi{0.0, 1.0, 45.0};
    SnrGrid grid_full{0.0, 1.0, 25.0};
    RunCounts counts;
    std::uint64_t seed = 1;
    std::string output_dir = "results";

    // Every field that influences results except the seed, in a fixed textual form.
    std::string canonical() const;
    // 64-bit FNV-1a of canonical().
    std::uint64_t digest() const;
};

struct ParseOptions
{
    bool paper_scale = false;
};

/// Parses INI-style text: [waveform], [modulation], [grid], [counts], [paper_counts], [run]
/// and one [scenario.<name>] section per channel configuration. Throws ConfigError.
ExperimentConfig parse_config_text(const std::string& text, const ParseOptions& options = {});

ExperimentConfig parse_and_validate(const std::filesystem::path& path, const ParseOptions& options = {});

// Throws ConfigError naming the scenario at fault.
void validate(const ExperimentConfig& cfg);

enum class RunMode
{
    semi,
    full,
    both
};

struct ResultRow
{
    std::string scenario;
    SweepMode mode = SweepMode::semi;
    BerPoint point;
    std::optional<double> diversity;
};

struct ResultsFile
{
    std::uint64_t digest = 0;
    std::uint64_t seed = 0;
    std::string tool_version;
    std::vector<ResultRow> rows;

    // Regroups rows into one SweepResult per (scenario, mode) in row order.
    std::vector<SweepResult> sweeps() const;
};

struct RunOptions
{
    RunMode mode = RunMode::both;
    unsigned workers = 1;
};

// A work unit failed; the message names the unit.
class RunError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Frames per full-stack work unit.
inline constexpr std::uint64_t kFullStackChunk = 1000;

/// Evaluates every (scenario, snr) point of the selected grids. Work is split into
/// (scenario, mode, snr, chunk) units, each with its own RNG substream, and merged in unit
/// order, so the output does not depend on the worker count.
ResultsFile run_sweep(const ExperimentConfig& cfg, const RunOptions& options);

std::string format_results(const ResultsFile& results);
ResultsFile parse_results(const std::string& text);

// Temp file + rename.
void write_results(const ResultsFile& results, const std::filesystem::path& path);
ResultsFile read_results(const std::filesystem::path& path);

enum class CurveKind
{
    ber,
    diversity
};

CurveKind curve_kind_from_name(const std::string& name);

/// One table per scenario, named <scenario>_<kind>.dat, with columns (snr_db, value,
/// half_width). BER tables hold a semi block and a full block; diversity uses semi rows only.
std::vector<std::filesystem::path> emit_curves(const ResultsFile& results, CurveKind kind,
                                               const std::filesystem::path& out_dir);

std::string to_string(SweepMode mode);
RunMode run_mode_from_name(const std::string& name);

} // namespace radiv

#endif // RADIV_EXPERIMENT_HPP
