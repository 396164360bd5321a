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

// MUSIC pseudo-spectrum search: coarse grid through zero-padded FFTs of the
// noise eigenvectors, then golden-section refinement around each peak.

#include "isac/estimate.hpp"

#include "fft.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>

namespace isac
{
    namespace
    {
        double wrap_to_pi(double w)
        {
            double r = std::fmod(w + kPi, 2.0 * kPi);
            if (r < 0.0)
                r += 2.0 * kPi;
            return r - kPi;
        }

        // a^H Un Un^H a, evaluated directly.
        double null_projection(const CMatrix &un, double omega)
        {
            const auto m = static_cast<std::size_t>(un.rows());
            const Eigen::VectorXcd a = steering(m, omega);
            return (un.adjoint() * a).squaredNorm();
        }

        // Golden-section minimisation of the null projection on [lo, hi].
        double refine_minimum(const CMatrix &un, double lo, double hi, double tol)
        {
            const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
            double a = lo, b = hi;
            double c = b - invphi * (b - a);
            double d = a + invphi * (b - a);
            double fc = null_projection(un, c);
            double fd = null_projection(un, d);
            while (b - a > tol)
            {
                if (fc < fd)
                {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - invphi * (b - a);
                    fc = null_projection(un, c);
                }
                else
                {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + invphi * (b - a);
                    fd = null_projection(un, d);
                }
            }
            return 0.5 * (a + b);
        }

        // Null projection on the uniform grid w_g = -pi + 2 pi g / G.
        std::vector<double> grid_projection(const CMatrix &un, std::size_t grid)
        {
            const auto m = static_cast<std::size_t>(un.rows());
            const auto q = static_cast<std::size_t>(un.cols());
            std::vector<double> out(grid, 0.0);
            if (grid < m)
            {
                for (std::size_t g = 0; g < grid; ++g)
                    out[g] = null_projection(un, -kPi + 2.0 * kPi * static_cast<double>(g) / static_cast<double>(grid));
                return out;
            }
            // u^H a(w_g) = sum_n conj(u_n) (-1)^n e^{+j 2 pi g n / G}
            std::vector<cplx> buf(grid * q, cplx{0.0, 0.0});
            for (std::size_t col = 0; col < q; ++col)
                for (std::size_t n = 0; n < m; ++n)
                    buf[col * grid + n] = std::conj(un(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(col))) *
                                          (n % 2 == 0 ? 1.0 : -1.0);
            fft::transform(buf, grid, q, 1, grid, fft::Direction::Backward);
            for (std::size_t col = 0; col < q; ++col)
                for (std::size_t g = 0; g < grid; ++g)
                    out[g] += std::norm(buf[col * grid + g]);
            return out;
        }
    } // namespace

    Eigen::VectorXcd steering(std::size_t m, double omega)
    {
        Eigen::VectorXcd a(static_cast<Eigen::Index>(m));
        for (std::size_t n = 0; n < m; ++n)
            a(static_cast<Eigen::Index>(n)) = std::polar(1.0, omega * static_cast<double>(n));
        return a;
    }

    double music_pseudospectrum(const CMatrix &un, double omega)
    {
        return 1.0 / null_projection(un, omega);
    }

    CMatrix noise_subspace(const CMatrix &r, std::size_t k, bool *rank_deficient)
    {
        const auto m = static_cast<std::size_t>(r.rows());
        if (r.rows() != r.cols())
            throw Error(ErrorCode::InvalidArgument, "covariance must be square");
        if (k == 0 || k >= m)
            throw Error(ErrorCode::InvalidArgument, "MUSIC needs 0 < k < M");
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(r);
        if (eig.info() != Eigen::Success)
            throw Error(ErrorCode::InvalidArgument, "eigendecomposition failed");
        // Eigenvalues come back ascending.
        const auto &ev = eig.eigenvalues();
        if (rank_deficient != nullptr)
        {
            const double top = ev(static_cast<Eigen::Index>(m - 1));
            const double kth = ev(static_cast<Eigen::Index>(m - k));
            *rank_deficient = !(top > 0.0) || !(kth > 1e-12 * top);
        }
        return eig.eigenvectors().leftCols(static_cast<Eigen::Index>(m - k));
    }

    MusicResult music_1d(const CMatrix &r, std::size_t k, const MusicOptions &opts)
    {
        bool rank_deficient = false;
        const CMatrix un = noise_subspace(r, k, &rank_deficient);
        if (rank_deficient)
            return {{}, true};
        return music_search(un, k, opts);
    }

    MusicResult music_search(const CMatrix &un, std::size_t k, const MusicOptions &opts)
    {
        if (un.rows() == 0 || un.cols() == 0 || k == 0)
            throw Error(ErrorCode::InvalidArgument, "MUSIC search needs a noise basis and k > 0");
        MusicResult result;
        const std::size_t grid = std::max<std::size_t>(opts.grid, 8);
        const double step = 2.0 * kPi / static_cast<double>(grid);
        const auto proj = grid_projection(un, grid);

        // Candidate grid cells, optionally limited to a window (which may wrap).
        // Each cell keeps its unwrapped omega so brackets stay continuous.
        struct Cell
        {
            std::size_t index;
            double omega;
        };
        std::vector<Cell> cells;
        double lo = -kPi, hi = kPi;
        bool full = true;
        if (opts.window)
        {
            lo = opts.window->first;
            hi = opts.window->second;
            if (!(hi > lo))
                throw Error(ErrorCode::InvalidArgument, "empty MUSIC search window");
            full = hi - lo >= 2.0 * kPi;
        }
        const auto n = static_cast<long long>(grid);
        if (full)
        {
            for (long long g = 0; g < n; ++g)
                cells.push_back({static_cast<std::size_t>(g), -kPi + step * static_cast<double>(g)});
        }
        else
        {
            const auto g0 = static_cast<long long>(std::ceil((lo + kPi) / step));
            const auto g1 = static_cast<long long>(std::floor((hi + kPi) / step));
            for (long long g = g0; g <= g1; ++g)
                cells.push_back({static_cast<std::size_t>(((g % n) + n) % n), -kPi + step * static_cast<double>(g)});
        }
        if (cells.empty())
        {
            // Window narrower than one grid step: refine across it directly.
            result.omegas.push_back(wrap_to_pi(refine_minimum(un, lo, hi, opts.tolerance)));
            return result;
        }

        struct Candidate
        {
            double value;
            std::size_t pos; // index into cells
        };
        std::vector<Candidate> minima;
        const std::size_t nc = cells.size();
        for (std::size_t i = 0; i < nc; ++i)
        {
            const double v = proj[cells[i].index];
            double left, right;
            if (full)
            {
                left = proj[cells[(i + nc - 1) % nc].index];
                right = proj[cells[(i + 1) % nc].index];
            }
            else
            {
                left = i > 0 ? proj[cells[i - 1].index] : null_projection(un, lo);
                right = i + 1 < nc ? proj[cells[i + 1].index] : null_projection(un, hi);
            }
            if (v < left && v <= right)
                minima.push_back({v, i});
        }
        if (minima.empty())
        {
            // Monotone inside the window: take the best sample.
            std::size_t best = 0;
            for (std::size_t i = 1; i < nc; ++i)
                if (proj[cells[i].index] < proj[cells[best].index])
                    best = i;
            minima.push_back({proj[cells[best].index], best});
        }
        std::stable_sort(minima.begin(), minima.end(),
                         [](const Candidate &a, const Candidate &b) { return a.value < b.value; });

        for (std::size_t j = 0; j < std::min(k, minima.size()); ++j)
        {
            const double centre = cells[minima[j].pos].omega;
            double a = centre - step, b = centre + step;
            if (!full)
            {
                a = std::max(a, lo);
                b = std::min(b, hi);
            }
            result.omegas.push_back(wrap_to_pi(refine_minimum(un, a, b, opts.tolerance)));
        }
        return result;
    }

} // namespace isac
