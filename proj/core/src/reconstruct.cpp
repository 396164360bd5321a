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


#include "isac/reconstruct.hpp"

#include <algorithm>
#include <iomanip>
#include <iterator>
#include <limits>
#include <ostream>

namespace isac
{
    namespace
    {
        std::size_t intersection_size(const PointSet &a, const PointSet &b)
        {
            std::size_t n = 0;
            auto i = a.begin();
            auto j = b.begin();
            while (i != a.end() && j != b.end())
            {
                if (*i < *j)
                    ++i;
                else if (*j < *i)
                    ++j;
                else
                {
                    ++n;
                    ++i;
                    ++j;
                }
            }
            return n;
        }

        PointSet set_union(const PointSet &a, const PointSet &b)
        {
            PointSet out;
            out.reserve(a.size() + b.size());
            std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
            return out;
        }

        FittedLine line_through(Vec2 p, Vec2 dir)
        {
            Vec2 n = perp_ccw(normalized(dir));
            if (n.y < 0.0 || (n.y == 0.0 && n.x < 0.0))
                n = -n;
            FittedLine l;
            l.a = n.x;
            l.b = n.y;
            l.c = -(n.x * p.x + n.y * p.y);
            return l;
        }
    } // namespace

    void merge_or_add(const PointSet &cell, const FittedLine &cell_line, ShapeEstimate &shape,
                      std::span<const Vec2> points, const ReconstructionParams &params)
    {
        bool merged = false;
        PointSet claimed;
        for (auto &line : shape.lines)
        {
            if (line.support.empty())
                continue; // completed edges carry no scatter support
            const auto common = static_cast<double>(intersection_size(cell, line.support));
            claimed = set_union(claimed, line.support);
            if (common / static_cast<double>(line.support.size()) >= params.gamma_l &&
                line_angle_difference(cell_line.angle(), line.angle()) <= params.eps_theta)
            {
                line = pca_fit(points, set_union(line.support, cell));
                merged = true;
            }
        }
        // A cell whose points mostly sit on existing lines already is not a
        // new edge, however small it is next to them.
        const bool fresh = static_cast<double>(intersection_size(cell, claimed)) <=
                           params.gamma_u * static_cast<double>(cell.size());
        if (fresh && !merged)
        {
            shape.lines.push_back(cell_line);
            shape.completed.push_back(false);
        }
    }

    ShapeEstimate ht_pca_tsr(std::span<const Vec2> points, const ReconstructionParams &params)
    {
        params.validate();
        ShapeEstimate shape;
        for (const auto &cell : hough_transform(points, params))
        {
            FittedLine line;
            try
            {
                line = pca_fit(points, cell.points);
            }
            catch (const Error &e)
            {
                if (e.code() == ErrorCode::DegeneratePoints)
                    continue;
                throw;
            }
            if (!validate_line(line, points, params))
                continue;
            merge_or_add(cell.points, line, shape, points, params);
        }
        resolve_shared_support(shape, points);
        return shape;
    }

    void resolve_shared_support(ShapeEstimate &shape, std::span<const Vec2> points)
    {
        const std::size_t k = shape.lines.size();
        std::vector<PointSet> keep(k);
        for (std::size_t a = 0; a < k; ++a)
        {
            for (auto i : shape.lines[a].support)
            {
                const double d = shape.lines[a].distance(points[i]);
                bool closer_elsewhere = false;
                for (std::size_t b = 0; b < k && !closer_elsewhere; ++b)
                {
                    if (b == a)
                        continue;
                    const auto &sb = shape.lines[b].support;
                    closer_elsewhere = std::binary_search(sb.begin(), sb.end(), i) && shape.lines[b].distance(points[i]) < d;
                }
                if (!closer_elsewhere)
                    keep[a].push_back(i);
            }
        }
        for (std::size_t a = 0; a < k; ++a)
        {
            auto &line = shape.lines[a];
            if (keep[a].size() == line.support.size() || keep[a].size() < 2)
                continue;
            try
            {
                line = pca_fit(points, keep[a]);
            }
            catch (const Error &e)
            {
                if (e.code() != ErrorCode::DegeneratePoints)
                    throw;
            }
        }
    }

    double mean_line_distance(const FittedLine &line, std::span<const Vec2> points, const PointSet &support)
    {
        if (support.empty())
            return 0.0;
        double acc = 0.0;
        for (auto i : support)
            acc += line.distance(points[i]);
        return acc / static_cast<double>(support.size());
    }

    RefineOutcome refine_with_reflection(ShapeEstimate &shape, std::span<const Vec2> points,
                                         const DetectedPoint &reflection, const ReconstructionParams &params)
    {
        if (!reflection.surface_dir)
            throw Error(ErrorCode::InvalidArgument, "reflection point has no surface direction");
        const FittedLine lr = line_through(reflection.position, *reflection.surface_dir);

        std::optional<std::size_t> nearest;
        double best = 0.0;
        for (std::size_t k = 0; k < shape.lines.size(); ++k)
        {
            if (shape.lines[k].support.empty())
                continue;
            const double d = mean_line_distance(lr, points, shape.lines[k].support);
            if (!nearest || d < best)
            {
                nearest = k;
                best = d;
            }
        }

        RefineOutcome out;
        if (nearest)
        {
            FittedLine &ls = shape.lines[*nearest];
            out.sigma_s = mean_line_distance(ls, points, ls.support);
            out.sigma_r = best;
            if (out.sigma_r <= params.gamma_s * out.sigma_s)
            {
                double proj = 0.0;
                for (auto i : ls.support)
                    proj += lr.a * points[i].x + lr.b * points[i].y;
                proj /= static_cast<double>(ls.support.size());
                const double at_reflection = lr.a * reflection.position.x + lr.b * reflection.position.y;
                ls.a = lr.a;
                ls.b = lr.b;
                ls.c = -(params.lambda_r * at_reflection + (1.0 - params.lambda_r) * proj);
                out.fused = true;
                out.line = *nearest;
                return out;
            }
        }
        shape.lines.push_back(lr);
        shape.completed.push_back(true);
        out.line = shape.lines.size() - 1;
        return out;
    }

    bool reflection_conflicts(const ShapeEstimate &shape, std::span<const Vec2> points,
                              const DetectedPoint &reflection, const ReconstructionParams &params)
    {
        if (!reflection.surface_dir)
            throw Error(ErrorCode::InvalidArgument, "reflection point has no surface direction");
        const FittedLine lr = line_through(reflection.position, *reflection.surface_dir);
        for (const auto &ls : shape.lines)
        {
            if (ls.support.empty() || ls.distance(reflection.position) > params.delta_rho)
                continue;
            const Vec2 dir = ls.direction();
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (auto i : ls.support)
            {
                const double t = dot(points[i], dir);
                lo = std::min(lo, t);
                hi = std::max(hi, t);
            }
            const double t = dot(reflection.position, dir);
            if (t < lo || t > hi)
                continue;
            if (mean_line_distance(lr, points, ls.support) > params.gamma_s * mean_line_distance(ls, points, ls.support))
                return true;
        }
        return false;
    }

    std::optional<Vec2> interior_reference(const ShapeEstimate &shape, std::span<const Vec2> points,
                                           std::span<const Vec2> extra)
    {
        PointSet all;
        for (const auto &l : shape.lines)
            all = set_union(all, l.support);
        if (all.empty() && extra.empty())
            return std::nullopt;
        Vec2 acc;
        for (auto i : all)
            acc += points[i];
        for (const auto &p : extra)
            acc += p;
        return acc / static_cast<double>(all.size() + extra.size());
    }

    std::optional<std::vector<Vec2>> close_polygon(const ShapeEstimate &shape, Vec2 interior)
    {
        // Neighbouring normals closer to antiparallel than this meet too far
        // away to count as a vertex of the target.
        constexpr double kMinTurn = 5.0 * kPi / 180.0;
        const std::size_t k = shape.lines.size();
        if (k < 3)
            return std::nullopt;

        struct HalfPlane
        {
            Vec2 n;
            double c;
            double angle;
        };
        std::vector<HalfPlane> hp;
        for (const auto &l : shape.lines)
        {
            Vec2 n = l.normal();
            double c = l.c;
            const double s = dot(n, interior) + c;
            if (!(std::abs(s) > 1e-12))
                return std::nullopt;
            if (s > 0.0)
            {
                n = -n;
                c = -c;
            }
            // Outward normal: the interior sits on the negative side.
            hp.push_back({n, c, std::atan2(n.y, n.x)});
        }
        std::sort(hp.begin(), hp.end(), [](const HalfPlane &a, const HalfPlane &b) { return a.angle < b.angle; });

        for (std::size_t i = 0; i < k; ++i)
        {
            double gap = hp[(i + 1) % k].angle - hp[i].angle;
            if (gap <= 0.0)
                gap += 2.0 * kPi;
            if (!(gap > 0.0 && gap < kPi - kMinTurn))
                return std::nullopt;
        }

        std::vector<Vec2> vertices;
        for (std::size_t i = 0; i < k; ++i)
        {
            const HalfPlane &p = hp[i];
            const HalfPlane &q = hp[(i + 1) % k];
            const double det = cross(p.n, q.n);
            if (std::abs(det) < 1e-12)
                return std::nullopt;
            vertices.push_back({(-p.c * q.n.y + q.c * p.n.y) / det, (-p.n.x * q.c + q.n.x * p.c) / det});
        }
        for (const auto &v : vertices)
        {
            for (const auto &h : hp)
                if (dot(h.n, v) + h.c > 1e-9 * (1.0 + norm(v)))
                    return std::nullopt;
        }
        try
        {
            check_convex(vertices);
        }
        catch (const Error &)
        {
            return std::nullopt;
        }
        return vertices;
    }

    void write_shape_csv(std::ostream &os, const ShapeEstimate &shape, const std::optional<std::vector<Vec2>> &polygon)
    {
        os << std::setprecision(17) << "a,b,c,support_size,completed\n";
        for (std::size_t i = 0; i < shape.lines.size(); ++i)
        {
            const auto &l = shape.lines[i];
            os << l.a << ',' << l.b << ',' << l.c << ',' << l.support.size() << ','
               << (i < shape.completed.size() && shape.completed[i] ? 1 : 0) << '\n';
        }
        if (polygon)
        {
            os << "\nx,y\n";
            for (const auto &v : *polygon)
                os << v.x << ',' << v.y << '\n';
        }
    }

} // namespace isac
