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


#ifndef ISAC_LOCALIZE_HPP
#define ISAC_LOCALIZE_HPP

#include "isac/estimate.hpp"
#include "isac/scene.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace isac
{
    struct PointSource
    {
        std::string tx;
        std::string rx;
        EstimationMethod method = EstimationMethod::Periodogram;
    };

    // A scatter or reflection point in world coordinates.
    struct DetectedPoint
    {
        Vec2 position;
        PathKind kind = PathKind::Scatter;
        std::optional<Vec2> surface_dir; // reflections only, unit norm
        std::optional<Vec2> normal;      // reflections only, points toward the BSs
        PointSource source;
        bool inconsistent = false; // delay disagrees with the angle geometry
    };

    // Intersection of the departure ray at `aod` from tx with the arrival ray at
    // `aoa` into rx. Throws NearParallelRays when |sin| between them < 1e-3.
    DetectedPoint localize_dual(double aoa, double aod, const BaseStation &tx, const BaseStation &rx);

    // Monostatic delays are only known modulo Nc / B. Returns the alias whose
    // range c tau / 2 falls in [min_range, min_range + c Nc / (2B)).
    double unwrap_delay(double tau, double min_range, const SystemConfig &cfg);

    // Monostatic ranging: bs + (c tau / 2) * direction(aoa). Throws NonPositiveDelay.
    DetectedPoint localize_single(double aoa, double tau, const BaseStation &bs);

    // Reflection point with the surface normal taken as the bisector of the unit
    // vectors toward tx and rx. Delay, when present, is checked against the
    // bistatic path length modulo the unambiguous range; a mismatch above
    // c / (2B) sets `inconsistent`.
    DetectedPoint reflection_surface(const PathEstimate &refl, const BaseStation &tx, const BaseStation &rx,
                                     const SystemConfig &cfg);

    // Point cloud CSV: kind,x,y,nx,ny with the normal left blank for scatter points.
    void write_points_csv(std::ostream &os, const std::vector<DetectedPoint> &points);
    std::vector<DetectedPoint> read_points_csv(std::istream &is);

} // namespace isac

#endif
