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

#include "radiv/channel.hpp"

#include "radiv/errors.hpp"

#include <algorithm>
#include <sstream>

namespace radiv
{

int ChannelConfig::support() const
{
    int s = l_d;
    for (const auto& r : repeaters)
        s = std::max(s, r.support());
    return s;
}

double ChannelConfig::normalization() const
{
    double power = l_d > 0 ? 1.0 : 0.0;
    for (const auto& r : repeaters)
        power += r.gain * r.gain;
    return power > 0.0 ? 1.0 / std::sqrt(power) : 0.0;
}

void ChannelConfig::validate() const
{
    if (n_fft < 1)
        throw ConfigError("channel: n_fft must be >= 1");
    if (cp_len < 0)
        throw ConfigError("channel: cp_len must be >= 0");
    if (l_d < 0)
        throw ConfigError("channel: l_d must be >= 0");
    if (l_d == 0 && repeaters.empty())
        throw ConfigError("channel: no direct path and no repeaters");
    if (l_d > cp_len)
    {
        std::ostringstream os;
        os << "channel: direct path support " << l_d << " exceeds cp_len " << cp_len;
        throw ConfigError(os.str());
    }
    for (std::size_t i = 0; i < repeaters.size(); ++i)
    {
        const auto& r = repeaters[i];
        std::ostringstream os;
        os << "channel: repeater " << i + 1 << " (delay " << r.delay << "): ";
        if (r.l_ur < 1 || r.l_rg < 1)
            throw ConfigError(os.str() + "hop tap counts must be >= 1");
        if (r.delay < 0)
            throw ConfigError(os.str() + "delay must be >= 0");
        if (!(r.gain >= 0.0) || !std::isfinite(r.gain))
            throw ConfigError(os.str() + "gain must be finite and >= 0");
        if (r.support() > cp_len)
        {
            os << "support " << r.support() << " exceeds cp_len " << cp_len;
            throw ConfigError(os.str());
        }
    }
    if (support() > n_fft)
        throw ConfigError("channel: support exceeds n_fft");
    if (normalization() == 0.0)
        throw ConfigError("channel: all branches have zero gain");
}

ComplexVector gen_rayleigh_taps(SeededRng& rng, int n_taps, double total_power)
{
    if (n_taps < 1)
        throw std::invalid_argument("gen_rayleigh_taps: n_taps must be >= 1");
    if (!(total_power > 0.0))
        throw std::invalid_argument("gen_rayleigh_taps: total_power must be > 0");
    return draw_complex_gaussian(rng, n_taps, total_power / n_taps);
}

ComplexVector cascade_branch(const ComplexVector& h_ur, const ComplexVector& h_rg)
{
    if (h_ur.size() == 0 || h_rg.size() == 0)
        throw std::invalid_argument("cascade_branch: empty hop");
    ComplexVector out = ComplexVector::Zero(h_ur.size() + h_rg.size() - 1);
    for (Eigen::Index m = 0; m < h_ur.size(); ++m)
        out.segment(m, h_rg.size()) += h_ur[m] * h_rg;
    return out;
}

ChannelRealization compose_channel(const ChannelConfig& config, ComplexVector h_d,
                                   const std::vector<ComplexVector>& h_ur, const std::vector<ComplexVector>& h_rg)
{
    config.validate();
    if (h_ur.size() != config.repeaters.size() || h_rg.size() != config.repeaters.size())
        throw std::invalid_argument("compose_channel: hop count does not match repeaters");
    if (h_d.size() != config.l_d)
        throw std::invalid_argument("compose_channel: direct tap count mismatch");

    ChannelRealization ch;
    ch.h_eff = ComplexVector::Zero(config.support());
    ch.h_eff.head(h_d.size()) = h_d;
    ch.h_d = std::move(h_d);
    ch.h_c.reserve(config.repeaters.size());
    for (std::size_t r = 0; r < config.repeaters.size(); ++r)
    {
        const auto& rep = config.repeaters[r];
        ComplexVector hc = cascade_branch(h_ur[r], h_rg[r]);
        ch.h_eff.segment(rep.delay, hc.size()) += rep.gain * hc;
        ch.h_c.push_back(std::move(hc));
    }
    ch.h_eff *= config.normalization();
    ch.h_freq = freq_response(ch.h_eff, config.n_fft);
    return ch;
}

namespace
{

ComplexVector draw_hop(const ChannelConfig& config, SeededRng& rng, int n_taps)
{
    if (config.fading == Fading::fixed)
        return ComplexVector::Constant(n_taps, Complex(1.0 / std::sqrt(double(n_taps)), 0.0));
    return gen_rayleigh_taps(rng, n_taps, 1.0);
}

} // namespace

ChannelRealization draw_channel(const ChannelConfig& config, SeededRng& rng)
{
    ComplexVector h_d = config.l_d > 0 ? draw_hop(config, rng, config.l_d) : ComplexVector();
    std::vector<ComplexVector> h_ur, h_rg;
    h_ur.reserve(config.repeaters.size());
    h_rg.reserve(config.repeaters.size());
    for (const auto& r : config.repeaters)
    {
        h_ur.push_back(draw_hop(config, rng, r.l_ur));
        h_rg.push_back(draw_hop(config, rng, r.l_rg));
    }
    return compose_channel(config, std::move(h_d), h_ur, h_rg);
}

ComplexVector freq_response(const ComplexVector& h_eff, int n_fft)
{
    if (n_fft < 1 || h_eff.size() > n_fft)
        throw std::invalid_argument("freq_response: impulse response longer than n_fft");
    ComplexVector padded = ComplexVector::Zero(n_fft);
    padded.head(h_eff.size()) = h_eff;
    return unitary_dft(padded, Direction::forward) * std::sqrt(double(n_fft));
}

Pdp average_pdp(const ChannelConfig& config)
{
    config.validate();
    const double alpha2 = config.normalization() * config.normalization();
    RealVector p = RealVector::Zero(config.support());
    if (config.l_d > 0)
        p.head(config.l_d).array() += alpha2 / config.l_d;
    for (const auto& r : config.repeaters)
    {
        // Independent zero-mean hop taps: the cascade PDP is the convolution of the hop PDPs.
        const RealVector ur = RealVector::Constant(r.l_ur, 1.0 / r.l_ur);
        const RealVector rg = RealVector::Constant(r.l_rg, 1.0 / r.l_rg);
        for (int m = 0; m < r.l_ur; ++m)
            p.segment(r.delay + m, r.l_rg) += alpha2 * r.gain * r.gain * ur[m] * rg;
    }
    return Pdp{p / p.sum()};
}

ComplexVector frequency_correlation(const Pdp& pdp, int n_fft)
{
    return freq_response(pdp.powers.cast<Complex>(), n_fft);
}

} // namespace radiv
