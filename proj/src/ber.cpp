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

#include "radiv/ber.hpp"

#include "radiv/errors.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <set>
#include <stdexcept>

namespace radiv
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLevelTol = 1e-9;

int level_index(const std::vector<double>& levels, double v)
{
    for (std::size_t j = 0; j < levels.size(); ++j)
        if (std::abs(levels[j] - v) < kLevelTol)
            return static_cast<int>(j);
    return -1;
}

int nearest_level(const std::vector<double>& levels, double v)
{
    // Levels are ascending; boundaries are midpoints.
    int j = 0;
    const int n = static_cast<int>(levels.size());
    while (j + 1 < n && v > 0.5 * (levels[j] + levels[j + 1]))
        ++j;
    return j;
}

// P(lo < mean + n < hi), n ~ N(0, sd^2); written so each tail keeps full relative accuracy.
double interval_probability(double lo, double hi, double mean, double sd)
{
    if (lo == -kInf && hi == kInf)
        return 1.0;
    if (lo == -kInf)
        return q_function((mean - hi) / sd);
    if (hi == kInf)
        return q_function((lo - mean) / sd);
    return q_function((lo - mean) / sd) - q_function((hi - mean) / sd);
}

void axis_probabilities(const std::vector<double>& levels, double mean, double sd, std::vector<double>& out)
{
    const std::size_t n = levels.size();
    out.resize(n);
    for (std::size_t j = 0; j < n; ++j)
    {
        const double lo = j == 0 ? -kInf : 0.5 * (levels[j - 1] + levels[j]);
        const double hi = j + 1 == n ? kInf : 0.5 * (levels[j] + levels[j + 1]);
        out[j] = interval_probability(lo, hi, mean, sd);
    }
}

ConstellationSpec rectangular_gray(std::string name, const std::vector<double>& levels,
                                   const std::vector<std::uint32_t>& gray, int axis_bits)
{
    std::vector<Complex> points;
    std::vector<std::uint32_t> labels;
    for (std::size_t i = 0; i < levels.size(); ++i)
        for (std::size_t q = 0; q < levels.size(); ++q)
        {
            points.emplace_back(levels[i], levels[q]);
            labels.push_back((gray[i] << axis_bits) | gray[q]);
        }
    return ConstellationSpec(std::move(name), std::move(points), std::move(labels), levels, levels);
}

void check_consistent(const ChannelConfig& ch_cfg, const WaveformConfig& wf_cfg)
{
    ch_cfg.validate();
    wf_cfg.validate();
    if (ch_cfg.n_fft != wf_cfg.n_fft || ch_cfg.cp_len != wf_cfg.cp_len)
        throw ConfigError("channel and waveform disagree on n_fft or cp_len");
}

void draw_symbol_indices(const ConstellationSpec& constellation, SeededRng& rng, int* out, Eigen::Index n)
{
    const int size = constellation.size();
    const int bits = constellation.bits_per_symbol();
    if (std::has_single_bit(static_cast<unsigned>(size)))
    {
        const std::uint64_t mask = (std::uint64_t(1) << bits) - 1;
        std::uint64_t word = 0;
        int left = 0;
        for (Eigen::Index i = 0; i < n; ++i)
        {
            if (left < bits)
            {
                word = rng();
                left = 64;
            }
            out[i] = static_cast<int>(word & mask);
            word >>= bits;
            left -= bits;
        }
    }
    else
    {
        std::uniform_int_distribution<int> pick(0, size - 1);
        for (Eigen::Index i = 0; i < n; ++i)
            out[i] = pick(rng);
    }
}

} // namespace

ConstellationSpec::ConstellationSpec(std::string name, std::vector<Complex> points, std::vector<std::uint32_t> labels,
                                     std::vector<double> levels_i, std::vector<double> levels_q)
    : name_(std::move(name)), points_(std::move(points)), labels_(std::move(labels)), levels_i_(std::move(levels_i)),
      levels_q_(std::move(levels_q))
{
    const std::size_t n = points_.size();
    if (n < 2 || labels_.size() != n)
        throw std::invalid_argument("constellation: need >= 2 points and one label per point");
    bits_ = std::bit_width(n - 1);
    if ((std::size_t(1) << bits_) != n)
        throw std::invalid_argument("constellation: size must be a power of two");
    if (std::set<std::uint32_t>(labels_.begin(), labels_.end()).size() != n ||
        *std::max_element(labels_.begin(), labels_.end()) >= n)
        throw std::invalid_argument("constellation: labels must be distinct and fit in log2(size) bits");
    double energy = 0.0;
    for (const auto& p : points_)
        energy += std::norm(p);
    if (std::abs(energy / n - 1.0) > 1e-12)
        throw std::invalid_argument("constellation: average energy must be 1");

    if (levels_i_.empty() || levels_q_.empty())
    {
        levels_i_.clear();
        levels_q_.clear();
        return;
    }
    if (!std::is_sorted(levels_i_.begin(), levels_i_.end()) || !std::is_sorted(levels_q_.begin(), levels_q_.end()))
        throw std::invalid_argument("constellation: axis levels must be ascending");
    if (levels_i_.size() * levels_q_.size() != n)
        throw std::invalid_argument("constellation: axis grid does not match point count");
    grid_.assign(n, -1);
    for (std::size_t p = 0; p < n; ++p)
    {
        const int i = level_index(levels_i_, points_[p].real());
        const int q = level_index(levels_q_, points_[p].imag());
        if (i < 0 || q < 0 || grid_[i * levels_q_.size() + q] >= 0)
            throw std::invalid_argument("constellation: points do not tile the axis grid");
        grid_[i * levels_q_.size() + q] = static_cast<int>(p);
        axis_i_.push_back(i);
        axis_q_.push_back(q);
    }

    if (n == 4)
    {
        gray_qpsk_ = true;
        for (std::size_t p = 0; p < n; ++p)
        {
            const std::uint32_t b_i = points_[p].real() < 0.0;
            const std::uint32_t b_q = points_[p].imag() < 0.0;
            gray_qpsk_ = gray_qpsk_ && labels_[p] == ((b_i << 1) | b_q) &&
                         std::abs(std::abs(points_[p].real()) - M_SQRT1_2) < kLevelTol &&
                         std::abs(std::abs(points_[p].imag()) - M_SQRT1_2) < kLevelTol;
        }
    }
}

ConstellationSpec ConstellationSpec::qpsk()
{
    // bit 0 -> +a, bit 1 -> -a on each axis
    return rectangular_gray("qpsk", {-M_SQRT1_2, M_SQRT1_2}, {1, 0}, 1);
}

ConstellationSpec ConstellationSpec::qam16()
{
    const double s = 1.0 / std::sqrt(10.0);
    // Gray 4-PAM per axis: -3 -> 10, -1 -> 11, +1 -> 01, +3 -> 00
    return rectangular_gray("qam16", {-3 * s, -s, s, 3 * s}, {2, 3, 1, 0}, 2);
}

ConstellationSpec ConstellationSpec::from_name(const std::string& name)
{
    if (name == "qpsk")
        return qpsk();
    if (name == "qam16")
        return qam16();
    throw ConfigError("unknown constellation '" + name + "' (expected qpsk or qam16)");
}

int ConstellationSpec::detect(Complex z) const
{
    if (grid_.empty())
        throw UnsupportedConstellationError("detect: constellation has no rectangular regions");
    return grid_[nearest_level(levels_i_, z.real()) * levels_q_.size() + nearest_level(levels_q_, z.imag())];
}

double conditional_ber_qpsk(Complex interference, double sigma_nu_sq)
{
    if (!(sigma_nu_sq > 0.0))
        throw std::invalid_argument("conditional_ber_qpsk: variance must be > 0");
    constexpr double a = M_SQRT1_2;
    const double sigma_r = std::sqrt(sigma_nu_sq / 2.0);
    const double re = interference.real();
    const double im = interference.imag();
    const double p_i = 0.5 * (q_function((a + re) / sigma_r) + q_function((a - re) / sigma_r));
    const double p_q = 0.5 * (q_function((a + im) / sigma_r) + q_function((a - im) / sigma_r));
    return 0.5 * (p_i + p_q);
}

double conditional_ber_rect_qam(const ConstellationSpec& constellation, Complex interference, double sigma_nu_sq)
{
    if (!constellation.rectangular())
        throw UnsupportedConstellationError("conditional_ber_rect_qam: '" + constellation.name() +
                                            "' has no rectangular decision regions");
    if (!(sigma_nu_sq > 0.0))
        throw std::invalid_argument("conditional_ber_rect_qam: variance must be > 0");
    const double sd = std::sqrt(sigma_nu_sq / 2.0);
    const auto& pts = constellation.points();
    const auto& labels = constellation.labels();
    const int n = constellation.size();
    thread_local std::vector<double> p_i, p_q;
    CompensatedSum total;
    for (int s = 0; s < n; ++s)
    {
        const Complex mean = pts[s] + interference;
        axis_probabilities(constellation.levels_i(), mean.real(), sd, p_i);
        axis_probabilities(constellation.levels_q(), mean.imag(), sd, p_q);
        for (int t = 0; t < n; ++t)
        {
            const int dh = std::popcount(labels[s] ^ labels[t]);
            if (dh != 0)
                total.add(dh * p_i[constellation.axis_i(t)] * p_q[constellation.axis_q(t)]);
        }
    }
    return total.value() / (double(constellation.bits_per_symbol()) * n);
}

double conditional_ber(const ConstellationSpec& constellation, Complex interference, double sigma_nu_sq)
{
    if (constellation.is_gray_qpsk())
        return conditional_ber_qpsk(interference, sigma_nu_sq);
    return conditional_ber_rect_qam(constellation, interference, sigma_nu_sq);
}

void SemiAnalyticSum::merge(const SemiAnalyticSum& other)
{
    sum.add(other.sum);
    sum_sq.add(other.sum_sq);
    n_channels += other.n_channels;
    n_interf += other.n_interf;
    n_degenerate += other.n_degenerate;
}

BerPoint SemiAnalyticSum::finalize(double snr_db) const
{
    BerPoint p;
    p.snr_db = snr_db;
    p.n_effective = n_interf;
    if (n_channels == 0)
        return p;
    const double n = double(n_channels);
    p.ber = sum.value() / n;
    if (n_channels > 1)
    {
        const double var = std::max(0.0, (sum_sq.value() - n * p.ber * p.ber) / (n - 1.0));
        p.half_width = 1.96 * std::sqrt(var / n);
    }
    return p;
}

void FullStackSum::merge(const FullStackSum& other)
{
    errors += other.errors;
    bits += other.bits;
    frames += other.frames;
}

BerPoint FullStackSum::finalize(double snr_db) const
{
    BerPoint p;
    p.snr_db = snr_db;
    p.n_effective = bits;
    if (bits == 0)
        return p;
    p.ber = double(errors) / double(bits);
    p.half_width = wilson_half_width(errors, bits);
    return p;
}

double channel_conditional_ber(const ConstellationSpec& constellation, const EqualizerState& state,
                               std::uint64_t n_interf, SeededRng& rng, Eigen::Index index)
{
    const Eigen::Index m_len = state.c.size();
    if (index < 0 || index >= m_len)
        throw std::invalid_argument("channel_conditional_ber: index out of range");
    if (n_interf == 0)
        throw std::invalid_argument("channel_conditional_ber: n_interf must be >= 1");

    // I_index = sum_j coeff_j x_j with coeff_j = c_{(index - j) mod M}, own symbol excluded.
    ComplexVector coeff(m_len);
    for (Eigen::Index j = 0; j < m_len; ++j)
        coeff[j] = state.c[(index - j + m_len) % m_len];
    coeff[index] = 0.0;

    // Per-position table of coeff_j * point_k; each draw is then M indexed additions.
    const auto& pts = constellation.points();
    const int n_pts = constellation.size();
    std::vector<Complex> table(static_cast<std::size_t>(m_len * n_pts));
    for (Eigen::Index j = 0; j < m_len; ++j)
        for (int k = 0; k < n_pts; ++k)
            table[j * n_pts + k] = coeff[j] * pts[k];

    CompensatedSum acc;
    if (std::has_single_bit(static_cast<unsigned>(n_pts)))
    {
        const int bits = constellation.bits_per_symbol();
        const std::uint64_t mask = static_cast<std::uint64_t>(n_pts - 1);
        for (std::uint64_t q = 0; q < n_interf; ++q)
        {
            double re = 0.0, im = 0.0;
            std::uint64_t word = 0;
            int left = 0;
            const Complex* row = table.data();
            for (Eigen::Index j = 0; j < m_len; ++j, row += n_pts)
            {
                if (left < bits)
                {
                    word = rng();
                    left = 64;
                }
                const Complex& t = row[word & mask];
                re += t.real();
                im += t.imag();
                word >>= bits;
                left -= bits;
            }
            acc.add(conditional_ber(constellation, Complex(re, im), state.sigma_nu_sq));
        }
    }
    else
    {
        std::vector<int> idx(static_cast<std::size_t>(m_len));
        for (std::uint64_t q = 0; q < n_interf; ++q)
        {
            draw_symbol_indices(constellation, rng, idx.data(), m_len);
            Complex sum(0.0);
            for (Eigen::Index j = 0; j < m_len; ++j)
                sum += table[j * n_pts + idx[j]];
            acc.add(conditional_ber(constellation, sum, state.sigma_nu_sq));
        }
    }
    return acc.value() / double(n_interf);
}

SemiAnalyticSum semi_analytic_block(const ChannelConfig& ch_cfg, const WaveformConfig& wf_cfg,
                                    const ConstellationSpec& constellation, double snr_db, std::uint64_t n_channels,
                                    std::uint64_t n_interf, SeededRng& rng)
{
    const double noise_var = snr_db_to_noise_var(snr_db);
    // Channels get their own child stream: equal seeds then give coupled channel draws across
    // scenarios (shared direct taps and leading branches), whatever the per-draw symbol usage.
    const std::uint64_t base = rng();
    SeededRng ch_rng(base, 0), sym_rng(base, 1);
    SemiAnalyticSum out;
    for (std::uint64_t h = 0; h < n_channels; ++h)
    {
        const ChannelRealization ch = draw_channel(ch_cfg, ch_rng);
        double value = 0.5;
        try
        {
            const EqualizerState st = build_state(allocated_response(ch, wf_cfg), noise_var);
            value = channel_conditional_ber(constellation, st, n_interf, sym_rng);
        }
        catch (const DegenerateFrameError&)
        {
            ++out.n_degenerate;
        }
        out.sum.add(value);
        out.sum_sq.add(value * value);
        ++out.n_channels;
        out.n_interf += n_interf;
    }
    return out;
}

BerPoint semi_analytic_ber(const ChannelConfig& ch_cfg, const WaveformConfig& wf_cfg,
                           const ConstellationSpec& constellation, double snr_db, std::uint64_t n_channels,
                           std::uint64_t n_interf, std::uint64_t chunk, SeededRng& rng)
{
    if (n_channels < 1 || n_interf < 1 || chunk < 1)
        throw std::invalid_argument("semi_analytic_ber: counts must be >= 1");
    check_consistent(ch_cfg, wf_cfg);
    const std::uint64_t base = rng();
    SemiAnalyticSum total;
    for (std::uint64_t start = 0, c = 0; start < n_channels; start += chunk, ++c)
    {
        SeededRng sub(base, c);
        total.merge(semi_analytic_block(ch_cfg, wf_cfg, constellation, snr_db, std::min(chunk, n_channels - start),
                                        n_interf, sub));
    }
    return total.finalize(snr_db);
}

FullStackSum full_stack_block(const ChannelConfig& ch_cfg, const WaveformConfig& wf_cfg,
                              const ConstellationSpec& constellation, double snr_db, std::uint64_t n_frames,
                              SeededRng& rng)
{
    if (!constellation.rectangular())
        throw UnsupportedConstellationError("full_stack_ber: detector needs rectangular regions");
    const double noise_var = snr_db_to_noise_var(snr_db);
    const int m_len = wf_cfg.m_alloc;
    const int bits_per_frame = m_len * constellation.bits_per_symbol();
    const auto& pts = constellation.points();
    const auto& labels = constellation.labels();
    std::vector<int> idx(m_len);
    ComplexVector x(m_len);
    const std::uint64_t base = rng();
    SeededRng ch_rng(base, 0), sym_rng(base, 1); // as in semi_analytic_block
    FullStackSum out;
    for (std::uint64_t f = 0; f < n_frames; ++f)
    {
        const ChannelRealization ch = draw_channel(ch_cfg, ch_rng);
        draw_symbol_indices(constellation, sym_rng, idx.data(), m_len);
        for (int i = 0; i < m_len; ++i)
            x[i] = pts[idx[i]];
        const TxBlock tx = modulate(x, wf_cfg);
        const ComplexVector rx = apply_channel(tx, ch, noise_var, sym_rng);
        const ComplexVector y = receive_demap(rx, wf_cfg);
        try
        {
            const EqualizerState st = build_state(allocated_response(ch, wf_cfg), noise_var);
            const ComplexVector x_hat = equalize_despread(y, st);
            for (int i = 0; i < m_len; ++i)
                out.errors += std::popcount(labels[idx[i]] ^ labels[constellation.detect(x_hat[i])]);
        }
        catch (const DegenerateFrameError&)
        {
            out.errors += bits_per_frame / 2;
        }
        out.bits += bits_per_frame;
        ++out.frames;
    }
    return out;
}

BerPoint full_stack_ber(const ChannelConfig& ch_cfg, const WaveformConfig& wf_cfg,
                        const ConstellationSpec& constellation, double snr_db, std::uint64_t n_frames, SeededRng& rng)
{
    if (n_frames < 1)
        throw std::invalid_argument("full_stack_ber: n_frames must be >= 1");
    check_consistent(ch_cfg, wf_cfg);
    return full_stack_block(ch_cfg, wf_cfg, constellation, snr_db, n_frames, rng).finalize(snr_db);
}

double diversity_metric(double ber, double snr_db)
{
    if (!(ber > 0.0 && ber < 1.0))
        throw std::domain_error("diversity_metric: ber must lie in (0, 1)");
    if (!(snr_db > 0.0))
        throw std::domain_error("diversity_metric: snr_db must be > 0");
    const double gamma = std::pow(10.0, snr_db / 10.0);
    return -std::log(ber) / std::log(gamma);
}

double wilson_half_width(std::uint64_t k, std::uint64_t n)
{
    if (n == 0)
        return 0.0;
    constexpr double z = 1.959963984540054;
    const double nn = double(n);
    const double p = double(k) / nn;
    return z / (1.0 + z * z / nn) * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn));
}

} // namespace radiv
