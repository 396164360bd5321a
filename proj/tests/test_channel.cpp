// SPDX-License-Identifier: Apache-2.0
//
// isac-shape: target shape sensing from mmWave MIMO-OFDM channels
// Copyright (C) 2026 The isac-shape Authors
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


#include "isac/channel.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

namespace
{
    using namespace isac;

    SystemConfig small_cfg(std::size_t nr = 4, std::size_t nt = 4, std::size_t nc = 8)
    {
        return SystemConfig::make(28e9, 1e9, nc, nt, nr);
    }

    PathRecord path(double tau, double aoa, double aod, cplx beta = 1.0)
    {
        PathRecord p;
        p.tau = tau;
        p.aoa = aoa;
        p.aod = aod;
        p.beta = beta;
        return p;
    }

    // Direct evaluation of the channel model, one element at a time.
    cplx model(const PathRecord &p, const SystemConfig &cfg, std::size_t r, std::size_t t, std::size_t c)
    {
        const double dl = cfg.spacing() / cfg.wavelength();
        const double f_low = cfg.carrier_hz - 0.5 * static_cast<double>(cfg.num_subcarriers) * cfg.subcarrier_spacing_hz;
        const double phase = -2.0 * kPi * f_low * p.tau - 2.0 * kPi * static_cast<double>(c) * cfg.subcarrier_spacing_hz * p.tau -
                             2.0 * kPi * static_cast<double>(t) * dl * std::sin(p.aod) +
                             2.0 * kPi * static_cast<double>(r) * dl * std::sin(p.aoa);
        return p.beta * std::polar(1.0, std::remainder(phase, 2.0 * kPi));
    }
} // namespace

TEST(Synthesize, BroadsideZeroDelayIsAllOnes)
{
    const auto cfg = small_cfg();
    const std::vector<PathRecord> paths{path(0.0, 0.0, 0.0)};
    const ChannelTensor h = synthesize(paths, cfg);
    for (const auto &v : h.data())
        EXPECT_NEAR(std::abs(v - cplx{1.0, 0.0}), 0.0, 1e-15);
}

TEST(Synthesize, IntegerCycleDelayIsConstant)
{
    const auto cfg = small_cfg();
    const double tau = 1.0 / cfg.subcarrier_spacing_hz;
    const std::vector<PathRecord> paths{path(tau, 0.0, 0.0)};
    const ChannelTensor h = synthesize(paths, cfg);
    const double f_low = cfg.carrier_hz - 0.5 * static_cast<double>(cfg.num_subcarriers) * cfg.subcarrier_spacing_hz;
    const cplx want = std::polar(1.0, -2.0 * kPi * std::remainder(f_low * tau, 1.0));
    for (const auto &v : h.data())
        EXPECT_NEAR(std::abs(v - want), 0.0, 1e-9);
}

TEST(Synthesize, MatchesElementwiseModel)
{
    const auto cfg = small_cfg(5, 3, 7);
    const auto p = path(37.3e-9, deg2rad(21.0), deg2rad(-48.0), std::polar(0.7, 0.4));
    const std::vector<PathRecord> paths{p};
    const ChannelTensor h = synthesize(paths, cfg);
    for (std::size_t r = 0; r < 5; ++r)
        for (std::size_t t = 0; t < 3; ++t)
            for (std::size_t c = 0; c < 7; ++c)
                EXPECT_NEAR(std::abs(h(r, t, c) - model(p, cfg, r, t, c)), 0.0, 1e-9);
}

TEST(Synthesize, EmptyPathListGivesZeroTensor)
{
    const ChannelTensor h = synthesize({}, small_cfg());
    EXPECT_EQ(h.size(), 4u * 4u * 8u);
    EXPECT_EQ(h.mean_power(), 0.0);
}

TEST(SynthesizeProperty, Linearity)
{
    const auto cfg = small_cfg(8, 8, 16);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ang(-1.2, 1.2), del(0.0, 60e-9), mag(0.1, 2.0);
    for (int trial = 0; trial < 10; ++trial)
    {
        std::vector<PathRecord> a, b;
        for (int k = 0; k < 3; ++k)
        {
            a.push_back(path(del(rng), ang(rng), ang(rng), mag(rng)));
            b.push_back(path(del(rng), ang(rng), ang(rng), mag(rng)));
        }
        std::vector<PathRecord> ab = a;
        ab.insert(ab.end(), b.begin(), b.end());
        const auto ha = synthesize(a, cfg), hb = synthesize(b, cfg), hab = synthesize(ab, cfg);
        for (std::size_t i = 0; i < hab.size(); ++i)
            EXPECT_LE(std::abs(hab.data()[i] - ha.data()[i] - hb.data()[i]), 1e-12 * (1.0 + std::abs(hab.data()[i])));
    }
}

TEST(SynthesizeProperty, SinglePathIsPurePhaseRamp)
{
    const auto cfg = small_cfg(8, 8, 16);
    const std::vector<PathRecord> paths{path(12e-9, 0.3, -0.2, 0.5)};
    const ChannelTensor h = synthesize(paths, cfg);
    const cplx ref = std::conj(h(0, 0, 0));
    for (const auto &v : h.data())
        EXPECT_NEAR(std::abs(v * ref), 0.25, 1e-12);
}

TEST(AddNoise, InfiniteSnrReturnsInput)
{
    const std::vector<PathRecord> paths{path(5e-9, 0.1, 0.2)};
    const ChannelTensor h = synthesize(paths, small_cfg());
    const ChannelTensor n = add_noise(h, kNoNoise, 1);
    for (std::size_t i = 0; i < h.size(); ++i)
        EXPECT_EQ(n.data()[i], h.data()[i]);
}

TEST(AddNoise, EmpiricalVarianceAtZeroDb)
{
    const auto cfg = small_cfg(32, 32, 16); // 16384 elements
    const std::vector<PathRecord> paths{path(0.0, 0.0, 0.0)};
    const ChannelTensor h = synthesize(paths, cfg);
    const ChannelTensor n = add_noise(h, 0.0, 42);
    double acc = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i)
        acc += std::norm(n.data()[i] - h.data()[i]);
    EXPECT_NEAR(acc / static_cast<double>(h.size()), 1.0, 0.05);
}

TEST(AddNoise, SnrDefinition)
{
    const auto cfg = small_cfg(16, 16, 32);
    const std::vector<PathRecord> paths{path(3e-9, 0.4, -0.1, 3.0), path(9e-9, -0.2, 0.5, 1.0)};
    const ChannelTensor h = synthesize(paths, cfg);
    const ChannelTensor n = add_noise(h, 10.0, 5);
    double acc = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i)
        acc += std::norm(n.data()[i] - h.data()[i]);
    const double sigma2 = acc / static_cast<double>(h.size());
    EXPECT_NEAR(10.0 * std::log10(h.mean_power() / sigma2), 10.0, 0.2);
}

TEST(AddNoise, DeterministicInSeed)
{
    const std::vector<PathRecord> paths{path(5e-9, 0.1, 0.2)};
    const ChannelTensor h = synthesize(paths, small_cfg());
    const ChannelTensor a = add_noise(h, 5.0, 11), b = add_noise(h, 5.0, 11), c = add_noise(h, 5.0, 12);
    bool differs = false;
    for (std::size_t i = 0; i < h.size(); ++i)
    {
        EXPECT_EQ(a.data()[i], b.data()[i]);
        differs = differs || a.data()[i] != c.data()[i];
    }
    EXPECT_TRUE(differs);
}

TEST(AddNoise, Errors)
{
    const ChannelTensor zero(small_cfg());
    EXPECT_THROW(
        {
            try
            {
                add_noise(zero, 10.0, 1);
            }
            catch (const Error &e)
            {
                EXPECT_EQ(e.code(), ErrorCode::AllZeroChannel);
                throw;
            }
        },
        Error);
    ChannelTensor bad(small_cfg());
    bad(0, 0, 0) = cplx{std::numeric_limits<double>::quiet_NaN(), 0.0};
    EXPECT_THROW(add_noise(bad, 10.0, 1), Error);
    EXPECT_THROW(add_noise_variance(zero, -1.0, 1), Error);
}

TEST(Window, HammingTaper)
{
    const auto w = hamming(9);
    EXPECT_NEAR(w.front(), 0.08, 1e-15);
    EXPECT_NEAR(w.back(), 0.08, 1e-15);
    EXPECT_EQ(w[4], 1.0);
    for (std::size_t n = 0; n < 9; ++n)
        EXPECT_NEAR(w[n], 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(n) / 8.0), 1e-15);
}

TEST(Window, CornerAndCentre)
{
    ChannelTensor ones(5, 7, 9);
    for (auto &v : ones.data())
        v = 1.0;
    const WindowedTensor w = apply_window(ones);
    EXPECT_NEAR(w.tensor()(0, 0, 0).real(), 0.08 * 0.08 * 0.08, 1e-15);
    EXPECT_NEAR(w.tensor()(2, 3, 4).real(), 1.0, 1e-15);
}

TEST(WindowProperty, SeparableAndInUnitInterval)
{
    const auto w = Window3D::hamming_for(4, 6, 8);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t t = 0; t < 6; ++t)
            for (std::size_t c = 0; c < 8; ++c)
            {
                const double v = w(r, t, c);
                EXPECT_GT(v, 0.0);
                EXPECT_LE(v, 1.0);
                EXPECT_DOUBLE_EQ(v, w.rx[r] * w.tx[t] * w.sc[c]);
            }
}

TEST(TensorIo, BinaryRoundTrip)
{
    const std::vector<PathRecord> paths{path(5e-9, 0.1, 0.2, {0.3, -0.4})};
    const ChannelTensor h = synthesize(paths, small_cfg(3, 2, 5));
    std::stringstream ss;
    write_tensor_binary(ss, h);
    EXPECT_EQ(ss.str().size(), 8u + 3u * 2u * 5u * 8u);
    const std::string bytes = ss.str();
    EXPECT_EQ(static_cast<unsigned char>(bytes[0]), 3);
    EXPECT_EQ(static_cast<unsigned char>(bytes[2]), 2);
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 5);
    const ChannelTensor back = read_tensor_binary(ss);
    ASSERT_EQ(back.size(), h.size());
    for (std::size_t i = 0; i < h.size(); ++i)
    {
        EXPECT_EQ(back.data()[i].real(), static_cast<double>(static_cast<float>(h.data()[i].real())));
        EXPECT_EQ(back.data()[i].imag(), static_cast<double>(static_cast<float>(h.data()[i].imag())));
    }
    std::stringstream truncated(bytes.substr(0, 20));
    EXPECT_THROW(read_tensor_binary(truncated), Error);
}
