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


#include "isac/scene.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace
{
    using namespace isac;

    std::vector<BaseStation> one_bs(Vec2 where = {5.0, -20.0})
    {
        BaseStation bs;
        bs.name = "bs0";
        bs.position = where;
        bs.boresight = {0.0, 1.0};
        return {bs};
    }

    const std::vector<Vec2> kSquare{{0, 0}, {10, 0}, {10, 10}, {0, 10}};

    ErrorCode code_of(auto &&fn)
    {
        try
        {
            fn();
        }
        catch (const Error &e)
        {
            return e.code();
        }
        ADD_FAILURE() << "no exception";
        return ErrorCode::IoError;
    }
} // namespace

TEST(SystemConfig, MakeDerivesSpacingAndWavelength)
{
    const auto cfg = SystemConfig::make(28e9, 1e9, 64, 32, 32);
    EXPECT_NEAR(cfg.subcarrier_spacing_hz * 64, 1e9, 1e-3);
    EXPECT_DOUBLE_EQ(cfg.wavelength(), kSpeedOfLight / 28e9);
    EXPECT_DOUBLE_EQ(cfg.spacing(), 0.5 * cfg.wavelength());
    EXPECT_NO_THROW(cfg.validate());
}

TEST(SystemConfig, RejectsBrokenInvariants)
{
    auto cfg = SystemConfig::make(28e9, 1e9, 64, 32, 32);
    cfg.subcarrier_spacing_hz *= 1.01;
    EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::BadSystemConfig);

    cfg = SystemConfig::make(28e9, 1e9, 64, 32, 32);
    cfg.num_tx = 1;
    EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::BadSystemConfig);

    cfg = SystemConfig::make(28e9, 1e9, 64, 32, 32);
    cfg.carrier_hz = -1.0;
    EXPECT_EQ(code_of([&] { cfg.validate(); }), ErrorCode::BadSystemConfig);
}

TEST(Scene, ValidSquare)
{
    const auto sys = SystemConfig::make(28e9, 1e9, 64, 32, 32);
    const Scene s = validate_scene(sys, one_bs(), kSquare, Material{0.6, 0.8});
    EXPECT_EQ(s.target.size(), 4u);
    EXPECT_GT(s.target.signed_area(), 0.0);
}

TEST(Scene, EnergyConservation)
{
    const auto sys = SystemConfig::make(28e9, 1e9, 64, 32, 32);
    EXPECT_EQ(code_of([&] { validate_scene(sys, one_bs(), kSquare, Material{0.6, 0.6}); }),
              ErrorCode::EnergyConservationViolated);
}

TEST(Scene, NonConvex)
{
    const auto sys = SystemConfig::make(28e9, 1e9, 64, 32, 32);
    // cross((5,1)-(10,0), (0,10)-(5,1)) = (-5)(9) - (1)(-5) = -40 < 0 while the others are positive.
    EXPECT_EQ(code_of([&] { validate_scene(sys, one_bs(), {{0, 0}, {10, 0}, {5, 1}, {0, 10}}, Material{}); }),
              ErrorCode::NonConvexTarget);
    EXPECT_EQ(code_of([&] { check_convex({{0, 0}, {1, 0}}); }), ErrorCode::NonConvexTarget);
    EXPECT_EQ(code_of([&] { check_convex({{0, 0}, {1, 0}, {2, 0}}); }), ErrorCode::NonConvexTarget);
}

TEST(Scene, BsInsideTarget)
{
    const auto sys = SystemConfig::make(28e9, 1e9, 64, 32, 32);
    EXPECT_EQ(code_of([&] { validate_scene(sys, one_bs({5.0, 5.0}), kSquare, Material{}); }),
              ErrorCode::BSInsideTarget);
}

TEST(Scene, BoresightMustBeUnit)
{
    const auto sys = SystemConfig::make(28e9, 1e9, 64, 32, 32);
    auto bss = one_bs();
    bss[0].boresight = {0.0, 2.0};
    EXPECT_EQ(code_of([&] { validate_scene(sys, bss, kSquare, Material{}); }), ErrorCode::BadSystemConfig);
}

TEST(ConvexPolygon, ClockwiseInputIsReversed)
{
    std::vector<Vec2> cw(kSquare.rbegin(), kSquare.rend());
    const ConvexPolygon p(cw);
    EXPECT_GT(p.signed_area(), 0.0);
    EXPECT_DOUBLE_EQ(p.signed_area(), 100.0);
    for (const auto &e : p.edges())
        EXPECT_LT(dot(e.normal, p.centroid() - e.midpoint()), 0.0);
}

TEST(ConvexPolygon, OutwardNormals)
{
    const ConvexPolygon p(kSquare);
    const Edge bottom = p.edge(0);
    EXPECT_NEAR(bottom.normal.x, 0.0, 1e-15);
    EXPECT_NEAR(bottom.normal.y, -1.0, 1e-15);
    EXPECT_TRUE(p.contains({5, 5}));
    EXPECT_FALSE(p.contains({11, 5}));
}

TEST(ConvexPolygonProperty, ConvexityInvariantUnderRotationOfList)
{
    std::vector<Vec2> hexagon;
    for (int k = 0; k < 6; ++k)
        hexagon.push_back(rotate({3.0, 0.0}, kPi / 3.0 * k));
    for (int shift = 0; shift < 6; ++shift)
    {
        auto v = hexagon;
        std::rotate(v.begin(), v.begin() + shift, v.end());
        EXPECT_NO_THROW(check_convex(v));
        auto bad = v;
        bad[2] = 0.2 * bad[2];
        EXPECT_THROW(check_convex(bad), Error);
    }
}

TEST(SceneProperty, MaterialInvariantHoldsForAdmittedScenes)
{
    const auto sys = SystemConfig::make(28e9, 1e9, 64, 32, 32);
    for (double ar = 0.0; ar <= 1.0; ar += 0.05)
    {
        const Material m{ar, std::sqrt(1.0 - ar * ar)};
        const Scene s = validate_scene(sys, one_bs(), kSquare, m);
        EXPECT_NEAR(s.material.alpha_r * s.material.alpha_r + s.material.alpha_s * s.material.alpha_s, 1.0, 1e-12);
    }
}

TEST(BaseStation, ArrayFrame)
{
    BaseStation bs;
    bs.boresight = {0.0, 1.0};
    EXPECT_NEAR(bs.tangent().x, 1.0, 0.0);
    const Vec2 d = bs.direction(deg2rad(30.0));
    EXPECT_NEAR(d.x, 0.5, 1e-15);
    EXPECT_NEAR(bs.array_angle(d), deg2rad(30.0), 1e-15);
}

TEST(SceneJson, RoundTrip)
{
    const auto sys = SystemConfig::make(28e9, 1e9, 64, 32, 32);
    const Scene s = validate_scene(sys, one_bs(), kSquare, Material{0.6, 0.8});
    const Scene t = parse_scene(scene_to_json(s));
    EXPECT_EQ(t.target.vertices(), s.target.vertices());
    EXPECT_EQ(t.base_stations.size(), 1u);
    EXPECT_EQ(t.base_stations[0].position, s.base_stations[0].position);
    EXPECT_DOUBLE_EQ(t.material.alpha_r, 0.6);
    EXPECT_DOUBLE_EQ(t.system.carrier_hz, 28e9);
}

TEST(SceneJson, MalformedIsConfigError)
{
    EXPECT_EQ(code_of([] { parse_scene("{\"target\": [[0, 0], [1]]}"); }), ErrorCode::ConfigError);
    EXPECT_EQ(code_of([] { parse_scene("not json"); }), ErrorCode::ConfigError);
}
