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

#ifndef RADIV_NUMERICS_HPP
#define RADIV_NUMERICS_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace radiv
{

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

template <typename Scalar>
using ComplexVectorX = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

enum class Direction
{
    forward,
    inverse
};

/**
 * Reproducible random source addressed by (seed, stream_id).
 *
 * The 256-bit xoshiro256** state is expanded from both words with SplitMix64, so every
 * (seed, stream_id) pair names its own substream independent of how work is scheduled.
 * Satisfies UniformRandomBitGenerator and can drive <random> distributions directly.
 * Not thread-safe; give each worker its own instance.
 */
class SeededRng
{
  public:
    using result_type = std::uint64_t;

    SeededRng(std::uint64_t seed, std::uint64_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    // Uniform on [0, 1) with 53 random mantissa bits.
    double uniform();

    // Standard real normal N(0, 1).
    double normal();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_[4];
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// Mixes several identifiers into one 64-bit substream id (order-sensitive).
std::uint64_t substream_id(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0, std::uint64_t d = 0);

/// Unitary DFT, X_k = M^{-1/2} sum_n v_n e^{-j2pi kn/M} (forward) or its adjoint (inverse).
template <typename Derived>
ComplexVectorX<typename Derived::RealScalar> unitary_dft(const Eigen::MatrixBase<Derived>& v, Direction dir)
{
    using Real = typename Derived::RealScalar;
    const Eigen::Index n = v.size();
    if (n == 0)
        throw std::invalid_argument("unitary_dft: zero-length input");
    if (n == 1)
        return v;

    thread_local Eigen::FFT<Real> fft = [] {
        Eigen::FFT<Real> f;
        f.SetFlag(Eigen::FFT<Real>::Unscaled);
        return f;
    }();

    const ComplexVectorX<Real> src = v;
    ComplexVectorX<Real> dst(n);
    if (dir == Direction::forward)
        fft.fwd(dst, src);
    else
        fft.inv(dst, src);
    dst *= Real(1) / std::sqrt(Real(n));
    return dst;
}

/// First-column transform c_n = (1/M) sum_k v_k e^{+j2pi kn/M}, i.e. the 1/M-normalized inverse DFT.
/// Used for circulant first columns so that c_0 equals the mean of v.
template <typename Derived>
ComplexVectorX<typename Derived::RealScalar> scaled_idft(const Eigen::MatrixBase<Derived>& v)
{
    using Real = typename Derived::RealScalar;
    if (v.size() == 0)
        throw std::invalid_argument("scaled_idft: zero-length input");
    return unitary_dft(v, Direction::inverse) / std::sqrt(Real(v.size()));
}

// Q(x) underflows to zero beyond this argument.
inline constexpr double kQUnderflow = 38.6;

// Standard normal tail probability Q(x) = P(Z > x).
inline double q_function(double x)
{
    if (x > kQUnderflow)
        return 0.0;
    return 0.5 * std::erfc(x * M_SQRT1_2);
}

// n i.i.d. CN(0, variance) samples; real and imaginary parts each N(0, variance/2).
ComplexVector draw_complex_gaussian(SeededRng& rng, Eigen::Index n, double variance);

/// Neumaier-compensated accumulator. Sums are combined in a fixed order by callers so the
/// result does not depend on worker scheduling.
class CompensatedSum
{
  public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    void add(const CompensatedSum& other)
    {
        add(other.sum_);
        add(other.comp_);
    }

    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace radiv

#endif // RADIV_NUMERICS_HPP
