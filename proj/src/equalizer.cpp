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

#include "radiv/equalizer.hpp"

#include "radiv/errors.hpp"

#include <string>

namespace radiv
{

ComplexVector mmse_weights(const ComplexVector& h_alloc, double noise_var)
{
    if (!(noise_var >= 0.0))
        throw std::invalid_argument("mmse_weights: negative noise variance");
    ComplexVector w(h_alloc.size());
    for (Eigen::Index k = 0; k < h_alloc.size(); ++k)
    {
        const double den = std::norm(h_alloc[k]) + noise_var;
        w[k] = den > 0.0 ? std::conj(h_alloc[k]) / den : Complex(0.0);
    }
    return w;
}

EqualizerState build_state(const ComplexVector& h_alloc, double noise_var)
{
    if (h_alloc.size() == 0)
        throw std::invalid_argument("build_state: empty allocation");
    EqualizerState st;
    st.noise_var = noise_var;
    st.w = mmse_weights(h_alloc, noise_var);
    // Exactly real in exact arithmetic; the rounding residue of the imaginary part is dropped.
    st.d = (st.w.array() * h_alloc.array()).real();
    st.g = st.d.mean();
    if (!(st.g >= kDegenerateGain))
        throw DegenerateFrameError("build_state: mean equalized gain " + std::to_string(st.g) +
                                   " below threshold");
    st.c = scaled_idft((st.d / st.g).cast<Complex>());
    st.sigma_nu_sq = noise_var / (st.g * st.g) * st.w.squaredNorm() / double(st.w.size());
    return st;
}

ComplexVector equalize_despread(const ComplexVector& y, const EqualizerState& state)
{
    if (y.size() != state.w.size())
        throw std::invalid_argument("equalize_despread: length mismatch");
    if (!(state.g >= kDegenerateGain))
        throw DegenerateFrameError("equalize_despread: degenerate equalizer state");
    const ComplexVector weighted = state.w.cwiseProduct(y);
    return unitary_dft(weighted, Direction::inverse) / state.g;
}

Complex interference_term(const ComplexVector& c, const ComplexVector& symbols, Eigen::Index i)
{
    const Eigen::Index m_len = c.size();
    if (symbols.size() != m_len)
        throw std::invalid_argument("interference_term: length mismatch");
    if (i < 0 || i >= m_len)
        throw std::invalid_argument("interference_term: index " + std::to_string(i) + " out of range");
    Complex acc(0.0);
    for (Eigen::Index m = 1; m < m_len; ++m)
        acc += c[m] * symbols[(i - m + m_len) % m_len];
    return acc;
}

} // namespace radiv
