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

#include "radiv/waveform.hpp"

#include "radiv/errors.hpp"

#include <algorithm>
#include <string>

namespace radiv
{

void WaveformConfig::validate() const
{
    if (n_fft < 1)
        throw ConfigError("waveform: n_fft must be >= 1");
    if (m_alloc < 1 || m_alloc > n_fft)
        throw ConfigError("waveform: m_alloc must be in [1, n_fft]");
    if (alloc_start < 0 || alloc_start + m_alloc > n_fft)
        throw ConfigError("waveform: allocation exceeds n_fft");
    if (cp_len < 0)
        throw ConfigError("waveform: cp_len must be >= 0");
}

TxBlock modulate(const ComplexVector& x, const WaveformConfig& cfg)
{
    cfg.validate();
    if (x.size() != cfg.m_alloc)
        throw std::invalid_argument("modulate: symbol block length " + std::to_string(x.size()) +
                                    " != m_alloc " + std::to_string(cfg.m_alloc));
    TxBlock tx;
    tx.symbols = x;
    tx.spread = unitary_dft(x, Direction::forward);
    ComplexVector z = ComplexVector::Zero(cfg.n_fft);
    z.segment(cfg.alloc_start, cfg.m_alloc) = tx.spread;
    const ComplexVector s = unitary_dft(z, Direction::inverse);
    tx.time_samples.resize(cfg.n_fft + cfg.cp_len);
    tx.time_samples.head(cfg.cp_len) = s.tail(cfg.cp_len);
    tx.time_samples.tail(cfg.n_fft) = s;
    tx.cp_len = cfg.cp_len;
    return tx;
}

ComplexVector convolve_block(const ComplexVector& samples, const ComplexVector& h)
{
    const Eigen::Index n = samples.size();
    ComplexVector out = ComplexVector::Zero(n);
    for (Eigen::Index l = 0; l < std::min<Eigen::Index>(h.size(), n); ++l)
        out.tail(n - l) += h[l] * samples.head(n - l);
    return out;
}

ComplexVector apply_channel(const TxBlock& tx, const ChannelRealization& ch, double noise_var, SeededRng& rng)
{
    if (ch.h_eff.size() > tx.cp_len)
        throw ConfigError("apply_channel: impulse response length " + std::to_string(ch.h_eff.size()) +
                          " exceeds cp_len " + std::to_string(tx.cp_len));
    ComplexVector rx = convolve_block(tx.time_samples, ch.h_eff);
    if (noise_var > 0.0)
        rx += draw_complex_gaussian(rng, rx.size(), noise_var);
    else if (noise_var < 0.0)
        throw std::invalid_argument("apply_channel: negative noise variance");
    return rx;
}

ComplexVector receive_demap(const ComplexVector& rx, const WaveformConfig& cfg)
{
    cfg.validate();
    if (rx.size() != cfg.n_fft + cfg.cp_len)
        throw std::invalid_argument("receive_demap: expected " + std::to_string(cfg.n_fft + cfg.cp_len) +
                                    " samples, got " + std::to_string(rx.size()));
    const ComplexVector r = rx.tail(cfg.n_fft);
    return unitary_dft(r, Direction::forward).segment(cfg.alloc_start, cfg.m_alloc);
}

} // namespace radiv
