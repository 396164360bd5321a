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


#include "isac/estimate.hpp"

#include <gtest/gtest.h>

#include <random>

namespace
{
    using namespace isac;

    CMatrix rank_one_plus_noise(std::size_t m, std::vector<double> omegas, double noise)
    {
        CMatrix r = noise * CMatrix::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        for (double w : omegas)
        {
            const Eigen::VectorXcd a = steering(m, w);
            r += a * a.adjoint();
        }
        return r;
    }

    double wrapped_diff(double a, double b)
    {
        return std::abs(std::remainder(a - b, 2.0 * kPi));
    }
} // namespace

TEST(Music, SteeringVector)
{
    const Eigen::VectorXcd a = steering(4, 0.5);
    for (Eigen::Index n = 0; n < 4; ++n)
        EXPECT_NEAR(std::abs(a(n) - std::polar(1.0, 0.5 * static_cast<double>(n))), 0.0, 1e-15);
}

TEST(Music, RankOneOracle)
{
    const auto res = music_1d(rank_one_plus_noise(16, {0.7}, 0.01), 1);
    ASSERT_EQ(res.omegas.size(), 1u);
    EXPECT_FALSE(res.rank_deficient);
    EXPECT_LT(std::abs(res.omegas[0] - 0.7), 1e-4);
}

TEST(Music, ZeroFrequency)
{
    const auto res = music_1d(rank_one_plus_noise(16, {0.0}, 0.01), 1);
    ASSERT_EQ(res.omegas.size(), 1u);
    EXPECT_LT(std::abs(res.omegas[0]), 1e-6);
}

TEST(Music, NearWrapPoint)
{
    const double w0 = kPi - 1e-3;
    const auto res = music_1d(rank_one_plus_noise(16, {w0}, 0.01), 1);
    ASSERT_EQ(res.omegas.size(), 1u);
    EXPECT_LT(wrapped_diff(res.omegas[0], w0), 1e-4);
}

TEST(Music, TwoSources)
{
    const auto res = music_1d(rank_one_plus_noise(16, {-1.1, 0.9}, 0.01), 2);
    ASSERT_EQ(res.omegas.size(), 2u);
    std::vector<double> w = res.omegas;
    std::sort(w.begin(), w.end());
    EXPECT_LT(std::abs(w[0] + 1.1), 1e-4);
    EXPECT_LT(std::abs(w[1] - 0.9), 1e-4);
}

TEST(Music, WindowedSearch)
{
    const CMatrix r = rank_one_plus_noise(16, {-1.1, 0.9}, 0.01);
    MusicOptions o;
    o.window = std::make_pair(0.5, 1.3);
    const auto res = music_1d(r, 2, o);
    ASSERT_GE(res.omegas.size(), 1u);
    EXPECT_LT(std::abs(res.omegas[0] - 0.9), 1e-4);

    // A window across the wrap point.
    const CMatrix rw = rank_one_plus_noise(16, {-3.0}, 0.01);
    o.window = std::make_pair(2.9, 3.6);
    const auto ww = music_1d(rw, 1, o);
    ASSERT_EQ(ww.omegas.size(), 1u);
    EXPECT_LT(wrapped_diff(ww.omegas[0], -3.0), 1e-4);
}

TEST(Music, Errors)
{
    const CMatrix r = rank_one_plus_noise(8, {0.2}, 0.1);
    EXPECT_THROW(music_1d(r, 0), Error);
    EXPECT_THROW(music_1d(r, 8), Error);
    EXPECT_THROW(music_1d(CMatrix::Zero(3, 4), 1), Error);
    MusicOptions o;
    o.window = std::make_pair(1.0, 1.0);
    EXPECT_THROW(music_1d(r, 1, o), Error);
}

TEST(Music, RankDeficientFlag)
{
    const auto res = music_1d(CMatrix::Zero(8, 8), 1);
    EXPECT_TRUE(res.rank_deficient);
    EXPECT_TRUE(res.omegas.empty());
}

TEST(Music, NoiseSubspaceOrthogonalToSignal)
{
    const CMatrix r = rank_one_plus_noise(12, {0.4}, 0.05);
    const CMatrix un = noise_subspace(r, 1);
    EXPECT_EQ(un.cols(), 11);
    EXPECT_LT((un.adjoint() * steering(12, 0.4)).norm(), 1e-10);
    EXPECT_GT(music_pseudospectrum(un, 0.4), 1e10);
}

TEST(Music, SearchMatchesMusic1d)
{
    const CMatrix r = rank_one_plus_noise(16, {-0.8, 1.9}, 0.02);
    const auto direct = music_1d(r, 2);
    const auto split = music_search(noise_subspace(r, 2), 2);
    ASSERT_EQ(split.omegas.size(), 2u);
    EXPECT_EQ(split.omegas, direct.omegas);
    EXPECT_THROW(music_search(CMatrix(16, 0), 1), Error);
}

// A noise basis with fewer columns than M - 1 still has a null at the source.
TEST(Music, SearchOnReducedBasis)
{
    const std::size_t m = 16;
    const double w0 = 0.31;
    const CMatrix un = noise_subspace(rank_one_plus_noise(m, {w0}, 0.01), 1).leftCols(4);
    MusicOptions o;
    o.window = std::make_pair(0.0, 0.6);
    const auto res = music_search(un, 1, o);
    ASSERT_EQ(res.omegas.size(), 1u);
    EXPECT_LT(std::abs(res.omegas[0] - w0), 1e-5);
}

TEST(MusicProperty, ArgmaxScaleInvariant)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> w(-3.0, 3.0);
    for (int trial = 0; trial < 20; ++trial)
    {
        const double w0 = w(rng);
        const CMatrix r = rank_one_plus_noise(16, {w0}, 0.05);
        const double base = music_1d(r, 1).omegas.at(0);
        for (double s : {1e-3, 10.0, 1e5})
            EXPECT_NEAR(music_1d(s * r, 1).omegas.at(0), base, 1e-6);
    }
}

TEST(MusicProperty, RandomFrequencies)
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> w(-3.1, 3.1);
    for (int trial = 0; trial < 50; ++trial)
    {
        const double w0 = w(rng);
        const auto res = music_1d(rank_one_plus_noise(16, {w0}, 0.01), 1);
        EXPECT_LT(wrapped_diff(res.omegas.at(0), w0), 1e-4);
    }
}

TEST(OmegaMaps, RoundTrips)
{
    const auto cfg = SystemConfig::make(28e9, 1e9, 64, 32, 32);
    for (double a : {-1.2, -0.3, 0.0, 0.5, 1.4})
    {
        EXPECT_NEAR(omega_to_aoa(aoa_to_omega(a, cfg), cfg), a, 1e-12);
        EXPECT_NEAR(omega_to_aod(-aoa_to_omega(a, cfg), cfg), a, 1e-12);
    }
    for (double tau : {0.0, 1e-9, 33.3e-9, 63.9e-9})
    {
        const double omega = std::remainder(-2.0 * kPi * cfg.subcarrier_spacing_hz * tau, 2.0 * kPi);
        const double back = omega_to_delay(omega, cfg);
        EXPECT_GE(back, 0.0);
        EXPECT_LT(back, cfg.max_delay());
        EXPECT_NEAR(std::min(std::abs(back - tau), cfg.max_delay() - std::abs(back - tau)), 0.0, 1e-18);
    }
}
