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

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>

namespace isac
{
    const char *to_string(Method m) noexcept
    {
        switch (m)
        {
        case Method::PerSpd: return "per-spd";
        case Method::PerMusicSpd: return "per-music-spd";
        case Method::Refined: return "refined";
        }
        return "per-spd";
    }

    Method parse_method(std::string_view s)
    {
        if (s == "per-spd")
            return Method::PerSpd;
        if (s == "per-music-spd")
            return Method::PerMusicSpd;
        if (s == "refined")
            return Method::Refined;
        throw Error(ErrorCode::ConfigError, "unknown method '" + std::string(s) + "'");
    }

    double point_mse(std::span<const Vec2> points, const ConvexPolygon &target)
    {
        if (points.empty())
            throw Error(ErrorCode::EmptyPointSet, "MSE of an empty point set");
        const auto edges = target.edges();
        double acc = 0.0;
        for (const auto &p : points)
        {
            double best = std::numeric_limits<double>::infinity();
            for (const auto &e : edges)
                best = std::min(best, point_segment_distance(p, e.a, e.b));
            acc += best * best;
        }
        return acc / static_cast<double>(points.size());
    }

    DirectionReport direction_error(const ShapeEstimate &shape, const ConvexPolygon &target, double max_offset)
    {
        const auto edges = target.edges();
        DirectionReport report;
        double acc = 0.0;
        for (std::size_t k = 0; k < shape.lines.size(); ++k)
        {
            const auto &line = shape.lines[k];
            std::optional<DirectionMatch> best;
            for (std::size_t e = 0; e < edges.size(); ++e)
            {
                if (line.distance(edges[e].midpoint()) > max_offset)
                    continue;
                const Vec2 d = edges[e].b - edges[e].a;
                const double err = rad2deg(line_angle_difference(line.angle(), std::atan2(d.y, d.x)));
                if (!best || err < best->error_deg)
                    best = DirectionMatch{k, e, err};
            }
            if (best)
            {
                report.matches.push_back(*best);
                acc += best->error_deg;
            }
            else
            {
                ++report.unmatched;
            }
        }
        if (report.matches.empty())
            throw Error(ErrorCode::NoMatches, "no fitted line lies near a target edge");
        report.mean_deg = acc / static_cast<double>(report.matches.size());
        return report;
    }

    bool is_closed(const ShapeEstimate &shape, Vec2 interior, const ConvexPolygon &target)
    {
        return shape.edge_count() == target.size() && close_polygon(shape, interior).has_value();
    }

    double close_rate(std::span<const TrialResult> trials)
    {
        if (trials.empty())
            return 0.0;
        std::size_t closed = 0;
        for (const auto &t : trials)
            closed += t.closed ? 1 : 0;
        return static_cast<double>(closed) / static_cast<double>(trials.size());
    }

    std::vector<AggregateRow> aggregate(std::span<const TrialResult> trials)
    {
        std::map<std::pair<double, int>, std::vector<const TrialResult *>> groups;
        for (const auto &t : trials)
            groups[{t.snr_db, static_cast<int>(t.method)}].push_back(&t);

        std::vector<AggregateRow> rows;
        for (auto &[key, group] : groups)
        {
            // Sum in trial order so the result does not depend on completion order.
            std::sort(group.begin(), group.end(),
                      [](const TrialResult *a, const TrialResult *b) { return a->trial < b->trial; });
            AggregateRow row;
            row.snr_db = key.first;
            row.method = static_cast<Method>(key.second);
            row.n_trials = group.size();

            double sum = 0.0, sq = 0.0, dsum = 0.0;
            std::size_t n = 0, nd = 0, closed = 0;
            for (const auto *t : group)
            {
                if (std::isfinite(t->mse))
                {
                    sum += t->mse;
                    ++n;
                }
                if (std::isfinite(t->direction_error))
                {
                    dsum += t->direction_error;
                    ++nd;
                }
                closed += t->closed ? 1 : 0;
            }
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.mse_mean = n > 0 ? sum / static_cast<double>(n) : nan;
            for (const auto *t : group)
                if (std::isfinite(t->mse))
                    sq += (t->mse - row.mse_mean) * (t->mse - row.mse_mean);
            row.mse_std = n > 1 ? std::sqrt(sq / static_cast<double>(n - 1)) : (n == 1 ? 0.0 : nan);
            row.dir_err_mean = nd > 0 ? dsum / static_cast<double>(nd) : nan;
            row.close_rate = static_cast<double>(closed) / static_cast<double>(group.size());
            rows.push_back(row);
        }
        return rows;
    }

    void write_results_csv(std::ostream &os, std::span<const AggregateRow> rows)
    {
        os << "snr_db,method,mse_mean,mse_std,dir_err_mean,close_rate,n_trials\n" << std::setprecision(17);
        for (const auto &r : rows)
            os << r.snr_db << ',' << to_string(r.method) << ',' << r.mse_mean << ',' << r.mse_std << ','
               << r.dir_err_mean << ',' << r.close_rate << ',' << r.n_trials << '\n';
    }

    void write_trials_csv(std::ostream &os, std::span<const TrialResult> trials)
    {
        os << "snr_db,method,trial,mse,direction_error,closed,edge_count,num_points,num_reflections,failure,runtime_s\n"
           << std::setprecision(17);
        auto clean = [](std::string s) {
            std::replace(s.begin(), s.end(), ',', ';');
            std::replace(s.begin(), s.end(), '\n', ' ');
            return s;
        };
        for (const auto &t : trials)
            os << t.snr_db << ',' << to_string(t.method) << ',' << t.trial << ',' << t.mse << ','
               << t.direction_error << ',' << (t.closed ? 1 : 0) << ',' << t.edge_count << ',' << t.num_points << ','
               << t.num_reflections << ',' << (t.failed ? clean(t.failure) : std::string()) << ',' << t.runtime_s << '\n';
    }

} // namespace isac
