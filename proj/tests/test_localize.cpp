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


#include "isac/localize.hpp"
#include "isac/pipeline.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace
{
    using namespace isac;

    BaseStation make_bs(std::string name, Vec2 pos, Vec2 boresight = {0.0, 1.0})
    {
        BaseStation bs;
        bs.name = std::move(name);
        bs.position = pos;
        bs.boresight = boresight;
        return bs;
    }

    PathEstimate from_path(const PathRecord &p)
    {
        PathEstimate e;
        e.kind = p.kind;
        e.aoa = p.aoa;
        e.aod = p.aod;
        e.tau = p.tau;
        e.method = EstimationMethod::Music;
        return e;
    }
} // namespace

TEST(LocalizeDual, SymmetricPair)
{
    const BaseStation tx = make_bs("tx", {0, 0}), rx = make_bs("rx", {10, 0});
    // Positive array angles turn toward +x for a +y boresight.
    const DetectedPoint p = localize_dual(deg2rad(-45.0), deg2rad(45.0), tx, rx);
    EXPECT_NEAR(p.position.x, 5.0, 1e-12);
    EXPECT_NEAR(p.position.y, 5.0, 1e-12);
    EXPECT_EQ(p.kind, PathKind::Scatter);
    EXPECT_EQ(p.source.tx, "tx");
    EXPECT_EQ(p.source.rx, "rx");
}

TEST(LocalizeDual, BisectorGivesMidpoint)
{
    const BaseStation tx = make_bs("tx", {-3, 0}), rx = make_bs("rx", {3, 0});
    for (double a : {5.0, 20.0, 60.0})
    {
        const DetectedPoint p = localize_dual(deg2rad(-a), deg2rad(a), tx, rx);
        EXPECT_NEAR(p.position.x, 0.0, 1e-12);
    }
}

TEST(LocalizeDual, ParallelRaysRejected)
{
    const BaseStation tx = make_bs("tx", {0, 0}), rx = make_bs("rx", {10, 0});
    try
    {
        localize_dual(0.0, 0.0, tx, rx);
        FAIL();
    }
    catch (const Error &e)
    {
        EXPECT_EQ(e.code(), ErrorCode::NearParallelRays);
    }
}

TEST(LocalizeSingle, RoundTripRange)
{
    const BaseStation bs = make_bs("bs", {0, 0});
    const DetectedPoint p = localize_single(0.0, 2.0 * 10.0 / kSpeedOfLight, bs);
    EXPECT_NEAR(p.position.x, 0.0, 1e-12);
    EXPECT_NEAR(p.position.y, 10.0, 1e-12);
    try
    {
        localize_single(0.0, 0.0, bs);
        FAIL();
    }
    catch (const Error &e)
    {
        EXPECT_EQ(e.code(), ErrorCode::NonPositiveDelay);
    }
}

TEST(UnwrapDelay, PlacesRangeInWindow)
{
    const SystemConfig cfg = SystemConfig::make(28e9, 1e9, 64, 32, 32);
    const double period = cfg.max_delay();
    const double r_amb = kSpeedOfLight * period / 2.0;
    EXPECT_DOUBLE_EQ(unwrap_delay(10e-9, 0.0, cfg), 10e-9);
    EXPECT_DOUBLE_EQ(unwrap_delay(0.0, 0.0, cfg), 0.0);
    // An echo from 10 m aliases to 0.4 m and comes back with a 2 m window.
    const double tau = 2.0 * 10.0 / kSpeedOfLight;
    EXPECT_NEAR(unwrap_delay(tau - period, 2.0, cfg), tau, 1e-20);
    EXPECT_NEAR(unwrap_delay(tau + 3.0 * period, 2.0, cfg), tau, 1e-20);
    for (double t = 0.0; t < period; t += period / 37.0)
    {
        const double r = kSpeedOfLight * unwrap_delay(t, 5.0, cfg) / 2.0;
        EXPECT_GE(r, 5.0 - 1e-9);
        EXPECT_LT(r, 5.0 + r_amb);
    }
}

TEST(LocalizeProperty, ExactInversionOfTracedPaths)
{
    const Scene s = default_experiment().scene;
    for (const auto &tx : s.base_stations)
        for (const auto &rx : s.base_stations)
            for (const auto &p : trace_paths(s, tx, rx))
            {
                const DetectedPoint d = tx.name == rx.name ? localize_single(p.aoa, p.tau, rx)
                                                           : localize_dual(p.aoa, p.aod, tx, rx);
                EXPECT_LT(distance(d.position, p.point), 1e-9) << tx.name << "->" << rx.name;
            }
}

TEST(LocalizeProperty, DualSwapSymmetry)
{
    const BaseStation a = make_bs("a", {-4, -9}, normalized({0.3, 1.0})), b = make_bs("b", {7, -8}, normalized({-0.4, 1.0}));
    for (double u = -0.6; u <= 0.6; u += 0.15)
        for (double v = -0.6; v <= 0.6; v += 0.15)
        {
            try
            {
                const Vec2 p = localize_dual(u, v, a, b).position;
                const Vec2 q = localize_dual(v, u, b, a).position;
                EXPECT_LT(distance(p, q), 1e-9);
            }
            catch (const Error &e)
            {
                EXPECT_EQ(e.code(), ErrorCode::NearParallelRays);
            }
        }
}

TEST(ReflectionSurface, Monostatic)
{
    const Scene s = validate_scene(SystemConfig::make(28e9, 1e9, 64, 32, 32), {make_bs("bs", {5, -5})},
                                   {{0, 0}, {10, 0}, {10, 10}, {0, 10}}, Material{});
    const auto &bs = s.base_stations[0];
    const auto path = find_reflection_path(s, bs, bs);
    ASSERT_TRUE(path);
    const DetectedPoint d = reflection_surface(from_path(*path), bs, bs, s.system);
    EXPECT_EQ(d.kind, PathKind::Reflect);
    EXPECT_NEAR(d.position.x, 5.0, 1e-9);
    EXPECT_NEAR(d.position.y, 0.0, 1e-9);
    ASSERT_TRUE(d.normal && d.surface_dir);
    EXPECT_NEAR(d.normal->y, -1.0, 1e-12);
    EXPECT_NEAR(std::abs(d.surface_dir->x), 1.0, 1e-12);
    EXPECT_NEAR(dot(*d.surface_dir, bs.direction(path->aoa)), 0.0, 1e-12);
    EXPECT_FALSE(d.inconsistent);
}

TEST(ReflectionSurface, BistaticWall)
{
    // Wall along y = 5 facing the two stations below it.
    const Scene s = validate_scene(SystemConfig::make(28e9, 1e9, 64, 32, 32),
                                   {make_bs("tx", {0, 0}), make_bs("rx", {10, 0})},
                                   {{-5, 5}, {15, 5}, {15, 9}, {-5, 9}}, Material{});
    const auto &tx = s.base_stations[0];
    const auto &rx = s.base_stations[1];
    const auto path = find_reflection_path(s, tx, rx);
    ASSERT_TRUE(path);
    const DetectedPoint d = reflection_surface(from_path(*path), tx, rx, s.system);
    EXPECT_NEAR(d.position.x, 5.0, 1e-9);
    EXPECT_NEAR(d.position.y, 5.0, 1e-9);
    EXPECT_NEAR(d.normal->x, 0.0, 1e-12);
    EXPECT_NEAR(d.normal->y, -1.0, 1e-12);
    EXPECT_NEAR(std::abs(d.surface_dir->x), 1.0, 1e-12);
    EXPECT_NEAR(norm(*d.surface_dir), 1.0, 1e-15);
    EXPECT_FALSE(d.inconsistent);

    PathEstimate off = from_path(*path);
    *off.tau += 10.0 / s.system.bandwidth_hz;
    EXPECT_TRUE(reflection_surface(off, tx, rx, s.system).inconsistent);
}

TEST(PointsCsv, RoundTrip)
{
    std::vector<DetectedPoint> pts(3);
    pts[0].position = {1.25, -3.5};
    pts[1].position = {0.1, 0.2};
    pts[2].position = {7.0, 8.0};
    pts[2].kind = PathKind::Reflect;
    pts[2].normal = Vec2{0.0, -1.0};
    pts[2].surface_dir = Vec2{1.0, 0.0};
    std::stringstream ss;
    write_points_csv(ss, pts);
    const auto back = read_points_csv(ss);
    ASSERT_EQ(back.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i)
    {
        EXPECT_EQ(back[i].position, pts[i].position);
        EXPECT_EQ(back[i].kind, pts[i].kind);
    }
    EXPECT_FALSE(back[0].surface_dir.has_value());
    ASSERT_TRUE(back[2].surface_dir.has_value());
    EXPECT_NEAR(std::abs(back[2].surface_dir->x), 1.0, 1e-15);
}

TEST(PointsCsv, Malformed)
{
    std::stringstream ss("kind,x,y,nx,ny\nscatter,1.0\n");
    EXPECT_THROW(read_points_csv(ss), Error);
}
