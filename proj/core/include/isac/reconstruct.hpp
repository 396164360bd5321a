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


#ifndef ISAC_RECONSTRUCT_HPP
#define ISAC_RECONSTRUCT_HPP

#include "isac/geometry.hpp"
#include "isac/localize.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace isac
{
    struct ReconstructionParams
    {
        double gamma_v = 5.0;             // minimum sigma1 / sigma2
        double gamma_l = 0.2;             // merge overlap
        double gamma_u = 0.5;             // new-line overlap ceiling
        double eps_theta = kPi / 180.0;   // merge angle, rad
        double gamma_s = 3.0;             // fusion gate on sigma_r / sigma_s
        double lambda_r = 0.5;            // reflection weight in the fused offset
        double delta_rho = 0.2;           // m
        double delta_theta = kPi / 90.0;  // rad
        std::size_t min_points = 10;
        double alpha_u = 0.05;            // uniformity test significance

        // Throws InvalidArgument unless 0 < gamma_l < gamma_u <= 1, gamma_v > 1,
        // eps_theta > 0 and the grid steps are positive.
        void validate() const;
    };

    // Point indices, kept sorted ascending.
    using PointSet = std::vector<std::size_t>;

    struct HoughCell
    {
        long rho_bin = 0;
        std::size_t theta_bin = 0;
        PointSet points;
    };

    // rho = x cos(theta) + y sin(theta) over theta in [0, pi), one vote per point
    // and theta column.
    class HoughGrid
    {
    public:
        HoughGrid(std::span<const Vec2> points, double delta_rho, double delta_theta);

        double delta_rho() const { return delta_rho_; }
        double delta_theta() const { return delta_theta_; }
        std::size_t theta_bins() const { return theta_bins_; }
        double rho_min() const { return rho_min_; }
        const std::map<std::pair<long, std::size_t>, PointSet> &cells() const { return cells_; }

        // Cells with at least `min_points` entries, largest first, ties by
        // (rho bin, theta bin) ascending.
        std::vector<HoughCell> sorted_cells(std::size_t min_points) const;

    private:
        double delta_rho_;
        double delta_theta_;
        std::size_t theta_bins_;
        double rho_min_ = 0.0;
        std::map<std::pair<long, std::size_t>, PointSet> cells_;
    };

    std::vector<HoughCell> hough_transform(std::span<const Vec2> points, const ReconstructionParams &params);

    // a x + b y + c = 0 with a^2 + b^2 = 1.
    struct FittedLine
    {
        double a = 0.0;
        double b = 1.0;
        double c = 0.0;
        PointSet support;
        double sigma1 = 0.0;
        double sigma2 = 0.0;

        Vec2 normal() const { return {a, b}; }
        Vec2 direction() const { return {-b, a}; }
        double angle() const { return std::atan2(a, -b); } // direction angle
        double signed_distance(Vec2 p) const { return a * p.x + b * p.y + c; }
        double distance(Vec2 p) const { return std::abs(signed_distance(p)); }
    };

    // Total least squares line through the centroid along the principal axis.
    // Throws DegeneratePoints when all points coincide, EmptyPointSet when empty.
    FittedLine pca_fit(std::span<const Vec2> points);
    FittedLine pca_fit(std::span<const Vec2> points, const PointSet &subset);

    // Kolmogorov-Smirnov statistic of samples against U(min, max) of the samples.
    double ks_uniform_statistic(std::vector<double> samples);
    // Asymptotic P(D_n > d) with the Stephens small-sample correction.
    double ks_pvalue(double d, std::size_t n);

    // Uniform spread along the line and sigma1 / sigma2 >= gamma_v.
    bool validate_line(const FittedLine &line, std::span<const Vec2> points, const ReconstructionParams &params);

    struct ShapeEstimate
    {
        std::vector<FittedLine> lines;
        std::vector<bool> completed; // true for edges added from a reflection
        std::size_t edge_count() const { return lines.size(); }
    };

    // One step of the merge / new-line rule for a validated cell.
    void merge_or_add(const PointSet &cell, const FittedLine &cell_line, ShapeEstimate &shape,
                      std::span<const Vec2> points, const ReconstructionParams &params);

    // A point held by several lines stays only with the nearest of them; lines
    // that lose points are refitted. Lines left with fewer than two points are
    // kept as they were.
    void resolve_shared_support(ShapeEstimate &shape, std::span<const Vec2> points);

    ShapeEstimate ht_pca_tsr(std::span<const Vec2> points, const ReconstructionParams &params);

    // Mean distance from the points of `support` to a line.
    double mean_line_distance(const FittedLine &line, std::span<const Vec2> points, const PointSet &support);

    struct RefineOutcome
    {
        bool fused = false;   // false: a completed edge was appended
        std::size_t line = 0; // index of the fused or appended line
        double sigma_s = 0.0;
        double sigma_r = 0.0;
    };

    // Fuses the reflection line into the nearest fitted line, or appends it as a
    // new edge when it is far from every supported line.
    RefineOutcome refine_with_reflection(ShapeEstimate &shape, std::span<const Vec2> points,
                                         const DetectedPoint &reflection, const ReconstructionParams &params);

    // True when the reflection point sits on the supported part of a fitted
    // line that it could not be fused into. Appending it would put a second
    // edge through the same points.
    bool reflection_conflicts(const ShapeEstimate &shape, std::span<const Vec2> points,
                              const DetectedPoint &reflection, const ReconstructionParams &params);

    // Vertices of the polygon bounded by the lines, each line oriented with the
    // interior point on its negative side and sorted by normal angle. Empty
    // unless every line contributes an edge of a bounded convex polygon whose
    // normals turn by at least 5 degrees at each vertex.
    std::optional<std::vector<Vec2>> close_polygon(const ShapeEstimate &shape, Vec2 interior);

    // Mean of all supporting points and reflection points, used as the
    // interior reference for closure.
    std::optional<Vec2> interior_reference(const ShapeEstimate &shape, std::span<const Vec2> points,
                                           std::span<const Vec2> extra = {});

    // Lines as a,b,c,support_size,completed, then polygon vertices (if any) as x,y.
    void write_shape_csv(std::ostream &os, const ShapeEstimate &shape, const std::optional<std::vector<Vec2>> &polygon);

} // namespace isac

#endif
