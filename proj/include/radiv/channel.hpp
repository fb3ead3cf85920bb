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

#ifndef RADIV_CHANNEL_HPP
#define RADIV_CHANNEL_HPP

#include "radiv/numerics.hpp"

#include <string>
#include <vector>

namespace radiv
{

/// One amplify-and-forward branch: UE->repeater hop, repeater->gNB hop, integer processing
/// delay (samples) and amplitude gain applied to the cascaded response.
struct RepeaterSpec
{
    int l_ur = 1;
    int l_rg = 1;
    int delay = 0;
    double gain = 1.0;

    // Length of the delayed cascade, delay + l_ur + l_rg - 1.
    int support() const { return delay + l_ur + l_rg - 1; }
};

enum class Fading
{
    rayleigh, // i.i.d. CN taps, equal PDP per hop
    fixed     // deterministic real taps 1/sqrt(n) per hop (debug and closed-form checks)
};

struct ChannelConfig
{
    int l_d = 1;
    std::vector<RepeaterSpec> repeaters;
    int n_fft = 128;
    int cp_len = 32;
    Fading fading = Fading::rayleigh;

    /// Longest impulse response the configuration can produce.
    int support() const;

    /// Amplitude scale 1/sqrt(1[l_d > 0] + sum g_r^2) making the ensemble-average power one.
    double normalization() const;

    /// Throws ConfigError when any field is out of range or the response would exceed the CP.
    void validate() const;
};

struct ChannelRealization
{
    ComplexVector h_d;              // direct taps, length l_d
    std::vector<ComplexVector> h_c; // cascade per repeater, undelayed and unweighted
    ComplexVector h_eff;            // normalized composite impulse response
    ComplexVector h_freq;           // n_fft-point frequency response of h_eff
};

struct Pdp
{
    RealVector powers;
};

ComplexVector gen_rayleigh_taps(SeededRng& rng, int n_taps, double total_power);

// Linear convolution of the two hops; length l_ur + l_rg - 1.
ComplexVector cascade_branch(const ComplexVector& h_ur, const ComplexVector& h_rg);

/// Delayed, gain-weighted superposition of direct and cascaded branches for fixed hop taps.
/// No randomness; `draw_channel` draws the hops then calls this.
ChannelRealization compose_channel(const ChannelConfig& config, ComplexVector h_d,
                                   const std::vector<ComplexVector>& h_ur, const std::vector<ComplexVector>& h_rg);

ChannelRealization draw_channel(const ChannelConfig& config, SeededRng& rng);

// h_k = sum_l h[l] e^{-j2pi kl/N} (non-normalized, so a unit tap at delay 0 is flat).
ComplexVector freq_response(const ComplexVector& h_eff, int n_fft);

Pdp average_pdp(const ChannelConfig& config);

// R_H[dk] = sum_l p[l] e^{-j2pi dk l/N}, dk = 0..N-1.
ComplexVector frequency_correlation(const Pdp& pdp, int n_fft);

} // namespace radiv

#endif // RADIV_CHANNEL_HPP
