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

#ifndef RADIV_EQUALIZER_HPP
#define RADIV_EQUALIZER_HPP

#include "radiv/numerics.hpp"

namespace radiv
{

// Mean equalized gains below this are treated as a frame with no usable signal.
inline constexpr double kDegenerateGain = 1e-12;

/**
 * One-tap MMSE equalizer for a single allocation together with its symbol-domain model.
 *
 * After despreading and normalization by g the detector sees x~ = C x + nu, where C is
 * circulant with first column c (c_0 = 1) and nu has per-symbol variance sigma_nu_sq.
 */
struct EqualizerState
{
    ComplexVector w;
    RealVector d;
    double g = 0.0;
    ComplexVector c;
    double sigma_nu_sq = 0.0;
    double noise_var = 0.0;
};

// w_k = conj(h_k) / (|h_k|^2 + noise_var); zero where the denominator vanishes.
ComplexVector mmse_weights(const ComplexVector& h_alloc, double noise_var);

// Throws DegenerateFrameError when g < kDegenerateGain.
EqualizerState build_state(const ComplexVector& h_alloc, double noise_var);

// x~ = (1/g) F_M^H (w .* y).
ComplexVector equalize_despread(const ComplexVector& y, const EqualizerState& state);

/// I_i = sum_{m=1}^{M-1} c_m symbols[(i - m) mod M].
Complex interference_term(const ComplexVector& c, const ComplexVector& symbols, Eigen::Index i);

} // namespace radiv

#endif // RADIV_EQUALIZER_HPP
