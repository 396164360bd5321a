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

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace isac
{
    namespace
    {
        constexpr double kMinRaySine = 1e-3;

        Vec2 surface_from_normal(Vec2 n) { return perp_ccw(n); }

        double parse_number(const std::string &s, std::size_t line)
        {
            try
            {
                std::size_t used = 0;
                const double v = std::stod(s, &used);
                if (used != s.size())
                    throw std::invalid_argument(s);
                return v;
            }
            catch (const std::exception &)
            {
                throw Error(ErrorCode::IoError, "points CSV line " + std::to_string(line) + ": bad number '" + s + "'");
            }
        }
    } // namespace

    DetectedPoint localize_dual(double aoa, double aod, const BaseStation &tx, const BaseStation &rx)
    {
        const Vec2 u_tx = tx.direction(aod);
        const Vec2 u_rx = rx.direction(aoa);
        const auto p = intersect_lines(tx.position, u_tx, rx.position, u_rx, kMinRaySine);
        if (!p)
            throw Error(ErrorCode::NearParallelRays, "departure and arrival rays are nearly parallel");
        DetectedPoint out;
        out.position = *p;
        out.source = {tx.name, rx.name, EstimationMethod::Periodogram};
        return out;
    }

    double unwrap_delay(double tau, double min_range, const SystemConfig &cfg)
    {
        const double period = cfg.max_delay();
        const double lo = 2.0 * min_range / kSpeedOfLight;
        return tau + period * std::ceil((lo - tau) / period - 1e-12);
    }

    DetectedPoint localize_single(double aoa, double tau, const BaseStation &bs)
    {
        if (!(tau > 0.0))
            throw Error(ErrorCode::NonPositiveDelay, "monostatic ranging needs a positive delay");
        DetectedPoint out;
        out.position = bs.position + (0.5 * kSpeedOfLight * tau) * bs.direction(aoa);
        out.source = {bs.name, bs.name, EstimationMethod::Periodogram};
        return out;
    }

    DetectedPoint reflection_surface(const PathEstimate &refl, const BaseStation &tx, const BaseStation &rx,
                                     const SystemConfig &cfg)
    {
        const bool monostatic = tx.position == rx.position;
        DetectedPoint out;
        if (monostatic)
        {
            if (!refl.tau)
                throw Error(ErrorCode::InvalidArgument, "monostatic reflection needs a delay estimate");
            out = localize_single(refl.aoa, *refl.tau, rx);
        }
        else
        {
            if (!refl.aod)
                throw Error(ErrorCode::InvalidArgument, "bistatic reflection needs an AoD estimate");
            out = localize_dual(refl.aoa, *refl.aod, tx, rx);
        }
        out.kind = PathKind::Reflect;
        out.source = {tx.name, rx.name, refl.method};

        const Vec2 to_tx = normalized(tx.position - out.position);
        const Vec2 to_rx = normalized(rx.position - out.position);
        const Vec2 n = normalized(to_tx + to_rx);
        out.normal = n;
        out.surface_dir = surface_from_normal(n);

        if (!monostatic && refl.tau)
        {
            const double path = distance(tx.position, out.position) + distance(out.position, rx.position);
            const double period = kSpeedOfLight * cfg.max_delay();
            double diff = std::fmod(path - kSpeedOfLight * *refl.tau, period);
            if (diff < 0.0)
                diff += period;
            diff = std::min(diff, period - diff);
            out.inconsistent = diff >= kSpeedOfLight / (2.0 * cfg.bandwidth_hz);
        }
        return out;
    }

    void write_points_csv(std::ostream &os, const std::vector<DetectedPoint> &points)
    {
        os << "kind,x,y,nx,ny\n" << std::setprecision(17);
        for (const auto &p : points)
        {
            os << to_string(p.kind) << ',' << p.position.x << ',' << p.position.y << ',';
            if (p.normal)
                os << p.normal->x << ',' << p.normal->y;
            else
                os << ',';
            os << '\n';
        }
    }

    std::vector<DetectedPoint> read_points_csv(std::istream &is)
    {
        std::vector<DetectedPoint> out;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(is, line))
        {
            ++lineno;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.empty() || (lineno == 1 && line.rfind("kind", 0) == 0))
                continue;
            std::vector<std::string> f;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ','))
                f.push_back(cell);
            while (f.size() < 5)
                f.emplace_back();
            DetectedPoint p;
            if (f[0] == "scatter")
                p.kind = PathKind::Scatter;
            else if (f[0] == "reflect")
                p.kind = PathKind::Reflect;
            else
                throw Error(ErrorCode::IoError, "points CSV line " + std::to_string(lineno) + ": unknown kind '" + f[0] + "'");
            p.position = {parse_number(f[1], lineno), parse_number(f[2], lineno)};
            if (p.kind == PathKind::Reflect)
            {
                if (f[3].empty() || f[4].empty())
                    throw Error(ErrorCode::IoError, "points CSV line " + std::to_string(lineno) + ": reflection without a normal");
                const Vec2 n = normalized({parse_number(f[3], lineno), parse_number(f[4], lineno)});
                p.normal = n;
                p.surface_dir = surface_from_normal(n);
            }
            out.push_back(p);
        }
        return out;
    }

} // namespace isac
