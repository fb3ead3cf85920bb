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

#ifndef RADIV_WAVEFORM_HPP
#define RADIV_WAVEFORM_HPP

#include "radiv/channel.hpp"
#include "radiv/numerics.hpp"

namespace radiv
{

struct WaveformConfig
{
    int n_fft = 128;
    int m_alloc = 72;
    int cp_len = 32;
    int alloc_start = 0;

    // Throws ConfigError on an impossible allocation.
    void validate() const;
};

struct TxBlock
{
    ComplexVector symbols;      // x, length M
    ComplexVector spread;       // x_f = F_M x
    ComplexVector time_samples; // CP + s, length N + cp_len
    int cp_len = 0;
};

// DFT spreading, contiguous subcarrier mapping, unitary N-IDFT and CP insertion.
TxBlock modulate(const ComplexVector& x, const WaveformConfig& cfg);

/// Linear convolution of `samples` with `h`, truncated to the input span. Samples before
/// the block are zero (blocks are independent). No CP check: `apply_channel` performs it.
ComplexVector convolve_block(const ComplexVector& samples, const ComplexVector& h);

/// Passes a transmit block through the channel and adds CN(0, noise_var) per sample.
/// Throws ConfigError if the impulse response is longer than the cyclic prefix.
ComplexVector apply_channel(const TxBlock& tx, const ChannelRealization& ch, double noise_var, SeededRng& rng);

// CP removal, unitary N-FFT and extraction of the M allocated subcarriers.
ComplexVector receive_demap(const ComplexVector& rx, const WaveformConfig& cfg);

// The allocated slice of a channel frequency response.
inline ComplexVector allocated_response(const ChannelRealization& ch, const WaveformConfig& cfg)
{
    return ch.h_freq.segment(cfg.alloc_start, cfg.m_alloc);
}

} // namespace radiv

#endif // RADIV_WAVEFORM_HPP
