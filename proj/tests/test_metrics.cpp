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


#include "isac/metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace
{
    using namespace isac;

    const ConvexPolygon kSquare({{0, 0}, {5, 0}, {5, 5}, {0, 5}});

    FittedLine line_through(Vec2 p, double angle)
    {
        FittedLine l;
        l.a = -std::sin(angle);
        l.b = std::cos(angle);
        l.c = -(l.a * p.x + l.b * p.y);
        l.support = {0};
        return l;
    }

    ShapeEstimate exact_square()
    {
        ShapeEstimate s;
        for (const auto &e : kSquare.edges())
        {
            const Vec2 d = e.b - e.a;
            s.lines.push_back(line_through(e.a, std::atan2(d.y, d.x)));
            s.completed.push_back(false);
        }
        return s;
    }

    // Distance from p to the segment ab, clamped projection.
    double segment_oracle(Vec2 p, Vec2 a, Vec2 b)
    {
        const Vec2 ab = b - a;
        double t = dot(p - a, ab) / dot(ab, ab);
        t = std::clamp(t, 0.0, 1.0);
        return distance(p, a + t * ab);
    }
} // namespace

TEST(PointMse, Examples)
{
    const std::vector<Vec2> on{{0, 1}, {2.5, 0}, {5, 5}, {3, 5}};
    EXPECT_EQ(point_mse(on, kSquare), 0.0);
    const std::vector<Vec2> off{{2.5, -0.3}};
    EXPECT_NEAR(point_mse(off, kSquare), 0.09, 1e-15);
    // Beyond a vertex the segment end, not the line, is nearest.
    const std::vector<Vec2> corner{{-3, -4}};
    EXPECT_NEAR(point_mse(corner, kSquare), 25.0, 1e-12);
    try
    {
        point_mse(std::span<const Vec2>{}, kSquare);
        FAIL();
    }
    catch (const Error &e)
    {
        EXPECT_EQ(e.code(), ErrorCode::EmptyPointSet);
    }
}

TEST(PointMse, MatchesBruteForce)
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3.0, 8.0);
    std::vector<Vec2> pts(300);
    for (auto &p : pts)
        p = {u(rng), u(rng)};
    const auto &v = kSquare.vertices();
    double acc = 0.0;
    for (const auto &p : pts)
    {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < v.size(); ++i)
            best = std::min(best, segment_oracle(p, v[i], v[(i + 1) % v.size()]));
        acc += best * best;
    }
    EXPECT_NEAR(point_mse(pts, kSquare), acc / static_cast<double>(pts.size()), 1e-12);
}

TEST(PointMseProperty, RigidMotionInvariant)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 7.0), ang(-kPi, kPi), sh(-50.0, 50.0);
    for (int rep = 0; rep < 20; ++rep)
    {
        std::vector<Vec2> pts(40);
        for (auto &p : pts)
            p = {u(rng), u(rng)};
        const double a = ang(rng);
        const Vec2 t{sh(rng), sh(rng)};
        std::vector<Vec2> moved, verts;
        for (const auto &p : pts)
            moved.push_back(rotate(p, a) + t);
        for (const auto &p : kSquare.vertices())
            verts.push_back(rotate(p, a) + t);
        const double base = point_mse(pts, kSquare);
        EXPECT_NEAR(point_mse(moved, ConvexPolygon(verts)), base, 1e-9 * (1.0 + base));
    }
}

TEST(PointMseProperty, OnEdgePointNeverIncreases)
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-2.0, 7.0), t(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> edge(0, 3);
    std::vector<Vec2> pts{{6.0, 6.0}};
    for (int rep = 0; rep < 50; ++rep)
    {
        const double before = point_mse(pts, kSquare);
        const Edge e = kSquare.edge(edge(rng));
        pts.push_back(e.a + t(rng) * (e.b - e.a));
        EXPECT_LE(point_mse(pts, kSquare), before + 1e-15);
        pts.push_back({u(rng), u(rng)});
    }
}

TEST(DirectionError, Perfect)
{
    const auto r = direction_error(exact_square(), kSquare, 0.6);
    EXPECT_NEAR(r.mean_deg, 0.0, 1e-12);
    EXPECT_EQ(r.matches.size(), 4u);
    EXPECT_EQ(r.unmatched, 0u);
}

TEST(DirectionError, RotatedLine)
{
    ShapeEstimate s;
    s.lines.push_back(line_through({2.5, 0.0}, deg2rad(1.0)));
    const auto r = direction_error(s, kSquare, 0.6);
    ASSERT_EQ(r.matches.size(), 1u);
    EXPECT_EQ(r.matches[0].edge, 0u);
    EXPECT_NEAR(r.mean_deg, 1.0, 1e-9);
}

TEST(DirectionError, RandomThreeEdgeCase)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> jitter(-3.0, 3.0), slide(-0.2, 0.2);
    for (int rep = 0; rep < 20; ++rep)
    {
        ShapeEstimate s;
        std::vector<double> truth;
        for (std::size_t e = 0; e < 3; ++e)
        {
            const Edge edge = kSquare.edge(e);
            const Vec2 d = edge.b - edge.a;
            const double err = jitter(rng);
            s.lines.push_back(line_through(edge.midpoint() + slide(rng) * edge.normal, std::atan2(d.y, d.x) + deg2rad(err)));
            truth.push_back(std::abs(err));
        }
        // A stray line far from every edge midpoint.
        s.lines.push_back(line_through({20, 20}, 0.3));
        const auto r = direction_error(s, kSquare, 0.6);
        ASSERT_EQ(r.matches.size(), 3u);
        EXPECT_EQ(r.unmatched, 1u);
        double oracle = 0.0;
        for (std::size_t e = 0; e < 3; ++e)
        {
            EXPECT_EQ(r.matches[e].edge, e);
            EXPECT_NEAR(r.matches[e].error_deg, truth[e], 1e-9);
            oracle += truth[e];
        }
        EXPECT_NEAR(r.mean_deg, oracle / 3.0, 1e-9);
        EXPECT_GE(r.mean_deg, 0.0);
        EXPECT_LE(r.mean_deg, 90.0);
    }
}

TEST(DirectionError, NoMatches)
{
    ShapeEstimate s;
    s.lines.push_back(line_through({20, 20}, 0.0));
    try
    {
        direction_error(s, kSquare, 0.6);
        FAIL();
    }
    catch (const Error &e)
    {
        EXPECT_EQ(e.code(), ErrorCode::NoMatches);
    }
}

TEST(IsClosed, EdgeCount)
{
    const Vec2 centre{2.5, 2.5};
    auto s = exact_square();
    EXPECT_TRUE(is_closed(s, centre, kSquare));
    s.lines.pop_back();
    s.completed.pop_back();
    EXPECT_FALSE(is_closed(s, centre, kSquare));
    // Five lines can bound a polygon, but not the four-edge target.
    auto extra = exact_square();
    extra.lines.push_back(line_through({0, 4.5}, deg2rad(45.0)));
    extra.completed.push_back(false);
    EXPECT_FALSE(is_closed(extra, centre, kSquare));
}

TEST(CloseRate, Examples)
{
    std::vector<TrialResult> all(5);
    for (auto &t : all)
        t.closed = true;
    EXPECT_DOUBLE_EQ(close_rate(all), 1.0);
    EXPECT_DOUBLE_EQ(close_rate(std::span<const TrialResult>{}), 0.0);

    std::mt19937_64 rng(23);
    std::bernoulli_distribution b(0.3);
    std::vector<TrialResult> trials(100);
    std::size_t miss = 0;
    for (auto &t : trials)
    {
        t.closed = b(rng);
        miss += t.closed ? 0 : 1;
    }
    const double r = close_rate(trials);
    EXPECT_DOUBLE_EQ(r, 1.0 - static_cast<double>(miss) / 100.0);
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
}

TEST(Aggregate, GroupsAndSkipsMissingValues)
{
    std::vector<TrialResult> trials;
    for (double snr : {10.0, 5.0})
        for (Method m : {Method::PerMusicSpd, Method::PerSpd})
            for (std::size_t k = 0; k < 3; ++k)
            {
                TrialResult t;
                t.snr_db = snr;
                t.method = m;
                t.trial = k;
                t.mse = k == 2 ? std::numeric_limits<double>::quiet_NaN() : 1.0 + static_cast<double>(k);
                t.direction_error = 2.0;
                t.closed = k == 0;
                trials.push_back(t);
            }
    const auto rows = aggregate(trials);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].snr_db, 5.0);
    EXPECT_EQ(rows[0].method, Method::PerSpd);
    EXPECT_EQ(rows[1].method, Method::PerMusicSpd);
    EXPECT_EQ(rows[3].snr_db, 10.0);
    for (const auto &r : rows)
    {
        EXPECT_DOUBLE_EQ(r.mse_mean, 1.5);
        EXPECT_NEAR(r.mse_std, std::sqrt(0.5), 1e-15);
        EXPECT_DOUBLE_EQ(r.close_rate, 1.0 / 3.0);
        EXPECT_EQ(r.n_trials, 3u);
    }
    std::ostringstream os;
    write_results_csv(os, rows);
    const std::string text = os.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "snr_db,method,mse_mean,mse_std,dir_err_mean,close_rate,n_trials");
    EXPECT_EQ(std::ranges::count(os.str(), '\n'), 5);
}

TEST(Methods, NamesRoundTrip)
{
    for (Method m : {Method::PerSpd, Method::PerMusicSpd, Method::Refined})
        EXPECT_EQ(parse_method(to_string(m)), m);
    EXPECT_THROW(parse_method("music"), Error);
}
