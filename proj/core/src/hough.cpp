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


// Hough voting, PCA line fitting and the two line validity tests.

#include "isac/reconstruct.hpp"

#include <Eigen/Dense>

#include <algorithm>

namespace isac
{
    void ReconstructionParams::validate() const
    {
        auto fail = [](const char *msg) { throw Error(ErrorCode::InvalidArgument, msg); };
        if (!(gamma_l > 0.0 && gamma_l < gamma_u && gamma_u <= 1.0))
            fail("reconstruction needs 0 < gamma_l < gamma_u <= 1");
        if (!(gamma_v > 1.0))
            fail("gamma_v must exceed 1");
        if (!(eps_theta > 0.0))
            fail("eps_theta must be positive");
        if (!(gamma_s > 0.0))
            fail("gamma_s must be positive");
        if (!(lambda_r >= 0.0 && lambda_r <= 1.0))
            fail("lambda_r must lie in [0, 1]");
        if (!(delta_rho > 0.0 && delta_theta > 0.0))
            fail("Hough grid steps must be positive");
        if (!(alpha_u > 0.0 && alpha_u < 1.0))
            fail("alpha_u must lie in (0, 1)");
    }

    HoughGrid::HoughGrid(std::span<const Vec2> points, double delta_rho, double delta_theta)
        : delta_rho_(delta_rho), delta_theta_(delta_theta),
          theta_bins_(static_cast<std::size_t>(std::ceil(kPi / delta_theta - 1e-9)))
    {
        if (!(delta_rho > 0.0 && delta_theta > 0.0))
            throw Error(ErrorCode::InvalidArgument, "Hough grid steps must be positive");
        if (points.empty())
            return;
        double xmin = points[0].x, xmax = xmin, ymin = points[0].y, ymax = ymin;
        for (const auto &p : points)
        {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
        // |rho| never exceeds the farthest bounding-box corner.
        const double r = std::max({std::hypot(xmin, ymin), std::hypot(xmin, ymax), std::hypot(xmax, ymin),
                                   std::hypot(xmax, ymax)});
        rho_min_ = -r - delta_rho;

        std::vector<double> cs(theta_bins_), sn(theta_bins_);
        for (std::size_t j = 0; j < theta_bins_; ++j)
        {
            cs[j] = std::cos(static_cast<double>(j) * delta_theta);
            sn[j] = std::sin(static_cast<double>(j) * delta_theta);
        }
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t j = 0; j < theta_bins_; ++j)
            {
                const double rho = points[i].x * cs[j] + points[i].y * sn[j];
                const auto bin = static_cast<long>(std::floor((rho - rho_min_) / delta_rho));
                cells_[{bin, j}].push_back(i); // i ascends, so each set stays sorted
            }
    }

    std::vector<HoughCell> HoughGrid::sorted_cells(std::size_t min_points) const
    {
        std::vector<HoughCell> out;
        for (const auto &[key, pts] : cells_)
            if (pts.size() >= min_points)
                out.push_back({key.first, key.second, pts});
        // The map already iterates in (rho, theta) order; a stable sort keeps it for ties.
        std::stable_sort(out.begin(), out.end(),
                         [](const HoughCell &a, const HoughCell &b) { return a.points.size() > b.points.size(); });
        return out;
    }

    std::vector<HoughCell> hough_transform(std::span<const Vec2> points, const ReconstructionParams &params)
    {
        return HoughGrid(points, params.delta_rho, params.delta_theta).sorted_cells(params.min_points);
    }

    FittedLine pca_fit(std::span<const Vec2> points, const PointSet &subset)
    {
        if (subset.empty())
            throw Error(ErrorCode::EmptyPointSet, "cannot fit a line to no points");
        Vec2 mean;
        for (auto i : subset)
            mean += points[i];
        mean = mean / static_cast<double>(subset.size());
        double sxx = 0.0, sxy = 0.0, syy = 0.0;
        for (auto i : subset)
        {
            const Vec2 d = points[i] - mean;
            sxx += d.x * d.x;
            sxy += d.x * d.y;
            syy += d.y * d.y;
        }
        if (!(sxx + syy > 0.0))
            throw Error(ErrorCode::DegeneratePoints, "all points coincide");
        const double denom = subset.size() > 1 ? static_cast<double>(subset.size() - 1) : 1.0;
        Eigen::Matrix2d cov;
        cov << sxx / denom, sxy / denom, sxy / denom, syy / denom;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig;
        eig.computeDirect(cov);
        const Eigen::Vector2d major = eig.eigenvectors().col(1);

        FittedLine line;
        // Normal is the major axis turned a quarter; fix its sign so the
        // representation does not depend on the solver.
        Vec2 n{-major(1), major(0)};
        n = normalized(n);
        if (n.y < 0.0 || (n.y == 0.0 && n.x < 0.0))
            n = -n;
        line.a = n.x;
        line.b = n.y;
        line.c = -(n.x * mean.x + n.y * mean.y);
        line.support = subset;
        line.sigma1 = std::sqrt(std::max(eig.eigenvalues()(1), 0.0));
        line.sigma2 = std::sqrt(std::max(eig.eigenvalues()(0), 0.0));
        return line;
    }

    FittedLine pca_fit(std::span<const Vec2> points)
    {
        PointSet all(points.size());
        for (std::size_t i = 0; i < all.size(); ++i)
            all[i] = i;
        return pca_fit(points, all);
    }

    double ks_uniform_statistic(std::vector<double> samples)
    {
        const std::size_t n = samples.size();
        if (n < 2)
            return 0.0;
        std::sort(samples.begin(), samples.end());
        const double lo = samples.front(), hi = samples.back();
        if (!(hi > lo))
            return 1.0;
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double f = (samples[i] - lo) / (hi - lo);
            const double above = static_cast<double>(i + 1) / static_cast<double>(n) - f;
            const double below = f - static_cast<double>(i) / static_cast<double>(n);
            d = std::max({d, above, below});
        }
        return d;
    }

    double ks_pvalue(double d, std::size_t n)
    {
        if (n == 0 || !(d > 0.0))
            return 1.0;
        const double sn = std::sqrt(static_cast<double>(n));
        const double lambda = (sn + 0.12 + 0.11 / sn) * d;
        if (lambda < 0.2)
            return 1.0;
        double sum = 0.0;
        for (int k = 1; k <= 100; ++k)
        {
            const double term = std::exp(-2.0 * k * k * lambda * lambda);
            sum += (k % 2 == 1 ? 1.0 : -1.0) * term;
            if (term < 1e-16)
                break;
        }
        return std::clamp(2.0 * sum, 0.0, 1.0);
    }

    bool validate_line(const FittedLine &line, std::span<const Vec2> points, const ReconstructionParams &params)
    {
        if (line.support.size() < 2)
            return false;
        const Vec2 dir = line.direction();
        std::vector<double> proj;
        proj.reserve(line.support.size());
        for (auto i : line.support)
            proj.push_back(dot(points[i], dir));
        const double d = ks_uniform_statistic(proj);
        if (ks_pvalue(d, proj.size()) < params.alpha_u)
            return false;
        if (line.sigma2 == 0.0)
            return line.sigma1 > 0.0;
        return line.sigma1 / line.sigma2 >= params.gamma_v;
    }

} // namespace isac
