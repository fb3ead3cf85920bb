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

#include "radiv/numerics.hpp"

namespace radiv
{

namespace
{

std::uint64_t splitmix64(std::uint64_t& x)
{
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

} // namespace

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id)
{
    // Two SplitMix64 passes: the stream id perturbs the seed-derived sequence.
    std::uint64_t sm = seed;
    std::uint64_t key = splitmix64(sm);
    std::uint64_t sm2 = key ^ (stream_id * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
    for (auto& s : state_)
        s = splitmix64(sm2);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0)
        state_[0] = 1;
}

SeededRng::result_type SeededRng::operator()()
{
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double SeededRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double SeededRng::normal() { return normal_(*this); }

std::uint64_t substream_id(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d)
{
    std::uint64_t h = 0x243F6A8885A308D3ULL;
    for (std::uint64_t w : {a, b, c, d})
    {
        std::uint64_t x = h ^ w;
        h = splitmix64(x);
    }
    return h;
}

ComplexVector draw_complex_gaussian(SeededRng& rng, Eigen::Index n, double variance)
{
    if (!(variance >= 0.0))
        throw std::invalid_argument("draw_complex_gaussian: negative variance");
    ComplexVector out(n);
    const double sd = std::sqrt(variance / 2.0);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const double re = rng.normal();
        const double im = rng.normal();
        out[i] = Complex(sd * re, sd * im);
    }
    return out;
}

} // namespace radiv
