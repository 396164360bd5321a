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


#ifndef ISAC_METRICS_HPP
#define ISAC_METRICS_HPP

#include "isac/reconstruct.hpp"
#include "isac/scene.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace isac
{
    enum class Method
    {
        PerSpd,      // periodogram only
        PerMusicSpd, // periodogram then MUSIC
        Refined,     // PerMusicSpd plus reflection refinement
    };

    const char *to_string(Method m) noexcept;
    Method parse_method(std::string_view s); // throws ConfigError

    struct TrialResult
    {
        double snr_db = 0.0;
        Method method = Method::PerSpd;
        std::size_t trial = 0;
        double mse = 0.0;             // m^2, NaN when no scatter point was found
        double direction_error = 0.0; // deg, NaN when no line matched
        bool closed = false;
        std::size_t edge_count = 0;
        std::size_t num_points = 0;
        std::size_t num_reflections = 0;
        bool failed = false;
        std::string failure;
        double runtime_s = 0.0;
    };

    // Mean squared distance from each point to the nearest target edge segment.
    // Throws EmptyPointSet.
    double point_mse(std::span<const Vec2> points, const ConvexPolygon &target);

    struct DirectionMatch
    {
        std::size_t line = 0;
        std::size_t edge = 0;
        double error_deg = 0.0;
    };

    struct DirectionReport
    {
        double mean_deg = 0.0;
        std::vector<DirectionMatch> matches;
        std::size_t unmatched = 0;
    };

    // Each line is matched to the edge of smallest angular difference among
    // edges whose midpoint lies within `max_offset` of the line. Throws NoMatches.
    DirectionReport direction_error(const ShapeEstimate &shape, const ConvexPolygon &target, double max_offset);

    // Bounded convex polygon from the lines with as many edges as the target.
    bool is_closed(const ShapeEstimate &shape, Vec2 interior, const ConvexPolygon &target);

    double close_rate(std::span<const TrialResult> trials);

    struct AggregateRow
    {
        double snr_db = 0.0;
        Method method = Method::PerSpd;
        double mse_mean = 0.0;
        double mse_std = 0.0;
        double dir_err_mean = 0.0;
        double close_rate = 0.0;
        std::size_t n_trials = 0;
    };

    // One row per (snr, method) in ascending snr, then method order. Means skip
    // trials without a value.
    std::vector<AggregateRow> aggregate(std::span<const TrialResult> trials);

    // snr_db,method,mse_mean,mse_std,dir_err_mean,close_rate,n_trials
    void write_results_csv(std::ostream &os, std::span<const AggregateRow> rows);

    // Per-trial rows with the runtime column last.
    void write_trials_csv(std::ostream &os, std::span<const TrialResult> trials);

} // namespace isac

#endif
