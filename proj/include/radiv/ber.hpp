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

#ifndef RADIV_BER_HPP
#define RADIV_BER_HPP

#include "radiv/channel.hpp"
#include "radiv/equalizer.hpp"
#include "radiv/numerics.hpp"
#include "radiv/waveform.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace radiv
{

/**
 * Symbol alphabet with bit labels and, for rectangular constellations, the per-axis
 * amplitude grid whose midpoints are the decision boundaries.
 *
 * Point p sits at (levels_i[axis_i[p]], levels_q[axis_q[p]]). An empty level list marks a
 * constellation without rectangular regions; the rectangular BER kernel rejects it.
 */
class ConstellationSpec
{
  public:
    ConstellationSpec(std::string name, std::vector<Complex> points, std::vector<std::uint32_t> labels,
                      std::vector<double> levels_i = {}, std::vector<double> levels_q = {});

    static ConstellationSpec qpsk();
    static ConstellationSpec qam16();
    // "qpsk" or "qam16"; anything else throws ConfigError.
    static ConstellationSpec from_name(const std::string& name);

    const std::string& name() const { return name_; }
    const std::vector<Complex>& points() const { return points_; }
    const std::vector<std::uint32_t>& labels() const { return labels_; }
    const std::vector<double>& levels_i() const { return levels_i_; }
    const std::vector<double>& levels_q() const { return levels_q_; }
    int size() const { return static_cast<int>(points_.size()); }
    int bits_per_symbol() const { return bits_; }
    bool rectangular() const { return !grid_.empty(); }
    bool is_gray_qpsk() const { return gray_qpsk_; }

    int axis_i(int p) const { return axis_i_[p]; }
    int axis_q(int p) const { return axis_q_[p]; }

    // Hard decision on the rectangular grid; returns a point index.
    int detect(Complex z) const;

  private:
    std::string name_;
    std::vector<Complex> points_;
    std::vector<std::uint32_t> labels_;
    std::vector<double> levels_i_, levels_q_;
    std::vector<int> axis_i_, axis_q_;
    std::vector<int> grid_; // point index at (i, q), row-major in i
    int bits_ = 0;
    bool gray_qpsk_ = false;
};

struct BerPoint
{
    double snr_db = 0.0;
    double ber = 0.0;
    std::uint64_t n_effective = 0;
    double half_width = 0.0; // 95% half-width (Wilson for full-stack, normal for semi-analytic)
};

enum class SweepMode
{
    semi,
    full
};

struct SweepResult
{
    std::string scenario;
    SweepMode mode = SweepMode::semi;
    std::vector<BerPoint> points;
    std::uint64_t config_digest = 0;
    std::uint64_t seed = 0;
};

inline double snr_db_to_noise_var(double snr_db) { return std::pow(10.0, -snr_db / 10.0); }

// Gray QPSK with zero-threshold detection, conditioned on the interference realization.
double conditional_ber_qpsk(Complex interference, double sigma_nu_sq);

/// Hamming-weighted transition probabilities over rectangular decision regions, averaged
/// over equiprobable transmitted points. Throws UnsupportedConstellationError otherwise.
double conditional_ber_rect_qam(const ConstellationSpec& constellation, Complex interference, double sigma_nu_sq);

// Dispatches to the QPSK closed form when applicable.
double conditional_ber(const ConstellationSpec& constellation, Complex interference, double sigma_nu_sq);

// Per-channel conditional-BER accumulation for one work unit.
struct SemiAnalyticSum
{
    CompensatedSum sum;
    CompensatedSum sum_sq;
    std::uint64_t n_channels = 0;
    std::uint64_t n_interf = 0;
    std::uint64_t n_degenerate = 0;

    void merge(const SemiAnalyticSum& other);
    BerPoint finalize(double snr_db) const;
};

struct FullStackSum
{
    std::uint64_t errors = 0;
    std::uint64_t bits = 0;
    std::uint64_t frames = 0;

    void merge(const FullStackSum& other);
    BerPoint finalize(double snr_db) const;
};

/// Mean conditional BER over n_interf fresh interference vectors at symbol `index` for one
/// fixed channel. Returns 0.5 for a degenerate equalizer.
double channel_conditional_ber(const ConstellationSpec& constellation, const EqualizerState& state,
                               std::uint64_t n_interf, SeededRng& rng, Eigen::Index index = 0);

SemiAnalyticSum semi_analytic_block(const ChannelConfig& ch_cfg, const WaveformConfig& wf_cfg,
                                    const ConstellationSpec& constellation, double snr_db, std::uint64_t n_channels,
                                    std::uint64_t n_interf, SeededRng& rng);

/// Semi-analytic estimate: channel draws are split into chunks of `chunk`, each with its own
/// substream derived from one draw of `rng`, and the chunk sums are merged in order.
BerPoint semi_analytic_ber(const ChannelConfig& ch_cfg, const WaveformConfig& wf_cfg,
                           const ConstellationSpec& constellation, double snr_db, std::uint64_t n_channels,
                           std::uint64_t n_interf, std::uint64_t chunk, SeededRng& rng);

FullStackSum full_stack_block(const ChannelConfig& ch_cfg, const WaveformConfig& wf_cfg,
                              const ConstellationSpec& constellation, double snr_db, std::uint64_t n_frames,
                              SeededRng& rng);

BerPoint full_stack_ber(const ChannelConfig& ch_cfg, const WaveformConfig& wf_cfg,
                        const ConstellationSpec& constellation, double snr_db, std::uint64_t n_frames, SeededRng& rng);

// d = -ln(ber) / ln(gamma); throws std::domain_error outside 0 < ber < 1, snr_db > 0.
double diversity_metric(double ber, double snr_db);

// 95% Wilson score half-width for k successes in n trials.
double wilson_half_width(std::uint64_t k, std::uint64_t n);

} // namespace radiv

#endif // RADIV_BER_HPP
