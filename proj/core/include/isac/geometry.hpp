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

#ifndef ISAC_GEOMETRY_HPP
#define ISAC_GEOMETRY_HPP

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace isac
{
    inline constexpr double kSpeedOfLight = 299792458.0; // m/s
    inline constexpr double kPi = std::numbers::pi;

    // Error categories surfaced by the library. Non-fatal conditions (rank
    // deficiency, inconsistent geometry) are reported as flags on results.
    enum class ErrorCode
    {
        BadSystemConfig,
        NonConvexTarget,
        EnergyConservationViolated,
        BSInsideTarget,
        MultipleReflectionPaths,
        AllZeroChannel,
        IndexOutOfVisibleRange,
        WindowTooLarge,
        InvalidArgument,
        NearParallelRays,
        NonPositiveDelay,
        DegeneratePoints,
        EmptyPointSet,
        NoMatches,
        ConfigError,
        IoError,
    };

    const char *to_string(ErrorCode code) noexcept;

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCode code, const std::string &what)
            : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

        ErrorCode code() const noexcept { return code_; }

    private:
        ErrorCode code_;
    };

    struct Vec2
    {
        double x = 0.0;
        double y = 0.0;

        constexpr Vec2 &operator+=(Vec2 o)
        {
            x += o.x;
            y += o.y;
            return *this;
        }
        constexpr Vec2 &operator-=(Vec2 o)
        {
            x -= o.x;
            y -= o.y;
            return *this;
        }
        constexpr Vec2 &operator*=(double s)
        {
            x *= s;
            y *= s;
            return *this;
        }
        friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
        friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
        friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
        friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
        friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
        friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
        friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
    };

    constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
    constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
    inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
    inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
    Vec2 normalized(Vec2 a);

    // Counter-clockwise rotation by `angle` radians.
    inline Vec2 rotate(Vec2 a, double angle)
    {
        const double c = std::cos(angle), s = std::sin(angle);
        return {c * a.x - s * a.y, s * a.x + c * a.y};
    }

    // Clockwise quarter turn: (x, y) -> (y, -x).
    constexpr Vec2 perp_cw(Vec2 a) { return {a.y, -a.x}; }
    // Counter-clockwise quarter turn: (x, y) -> (-y, x).
    constexpr Vec2 perp_ccw(Vec2 a) { return {-a.y, a.x}; }

    inline double deg2rad(double deg) { return deg * kPi / 180.0; }
    inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

    // Absolute difference between two undirected line directions, folded to [0, pi/2].
    double line_angle_difference(double a, double b);

    // Distance from p to the closed segment [a, b].
    double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

    // Intersection of the rays p0 + s*u0 and p1 + t*u1 (s, t unrestricted).
    // Empty when |sin| of the angle between u0 and u1 is below `min_sin`.
    std::optional<Vec2> intersect_lines(Vec2 p0, Vec2 u0, Vec2 p1, Vec2 u1, double min_sin = 0.0);

    // Parameter t of the crossing of segment [a, b] with the supporting line of
    // [c, d], or empty if the segment does not reach the line.
    std::optional<double> segment_line_crossing(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

} // namespace isac

#endif
