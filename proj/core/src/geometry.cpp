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

#include "isac/geometry.hpp"

#include <algorithm>

namespace isac
{
    const char *to_string(ErrorCode code) noexcept
    {
        switch (code)
        {
        case ErrorCode::BadSystemConfig: return "BadSystemConfig";
        case ErrorCode::NonConvexTarget: return "NonConvexTarget";
        case ErrorCode::EnergyConservationViolated: return "EnergyConservationViolated";
        case ErrorCode::BSInsideTarget: return "BSInsideTarget";
        case ErrorCode::MultipleReflectionPaths: return "MultipleReflectionPaths";
        case ErrorCode::AllZeroChannel: return "AllZeroChannel";
        case ErrorCode::IndexOutOfVisibleRange: return "IndexOutOfVisibleRange";
        case ErrorCode::WindowTooLarge: return "WindowTooLarge";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NearParallelRays: return "NearParallelRays";
        case ErrorCode::NonPositiveDelay: return "NonPositiveDelay";
        case ErrorCode::DegeneratePoints: return "DegeneratePoints";
        case ErrorCode::EmptyPointSet: return "EmptyPointSet";
        case ErrorCode::NoMatches: return "NoMatches";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
        }
        return "Unknown";
    }

    Vec2 normalized(Vec2 a)
    {
        const double n = norm(a);
        if (n == 0.0)
            throw Error(ErrorCode::InvalidArgument, "cannot normalize a zero vector");
        return a / n;
    }

    double line_angle_difference(double a, double b)
    {
        double d = std::fmod(std::abs(a - b), kPi);
        if (d > kPi / 2.0)
            d = kPi - d;
        return d;
    }

    double point_segment_distance(Vec2 p, Vec2 a, Vec2 b)
    {
        const Vec2 ab = b - a;
        const double len2 = dot(ab, ab);
        if (len2 == 0.0)
            return distance(p, a);
        const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
        return distance(p, a + t * ab);
    }

    std::optional<Vec2> intersect_lines(Vec2 p0, Vec2 u0, Vec2 p1, Vec2 u1, double min_sin)
    {
        const double denom = cross(u0, u1);
        const double sin_angle = std::abs(denom) / (norm(u0) * norm(u1));
        if (!(sin_angle > min_sin) || denom == 0.0)
            return std::nullopt;
        const double s = cross(p1 - p0, u1) / denom;
        return p0 + s * u0;
    }

    std::optional<double> segment_line_crossing(Vec2 a, Vec2 b, Vec2 c, Vec2 d)
    {
        const Vec2 dir = d - c;
        const double sa = cross(dir, a - c);
        const double sb = cross(dir, b - c);
        if ((sa > 0.0 && sb > 0.0) || (sa < 0.0 && sb < 0.0) || sa == sb)
            return std::nullopt;
        return sa / (sa - sb);
    }

} // namespace isac
