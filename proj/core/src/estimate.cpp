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

#include "isac/estimate.hpp"

#include "fft.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

namespace isac
{
    namespace
    {
        using fft::Direction;

        // Multiplies by (-1)^n along an axis, which moves bin N/2 to broadside.
        void alternate_sign(ChannelTensor &h, int axis)
        {
            for (std::size_t r = 0; r < h.nr(); ++r)
                for (std::size_t t = 0; t < h.nt(); ++t)
                    for (std::size_t c = 0; c < h.nc(); ++c)
                    {
                        const std::size_t n = axis == 0 ? r : (axis == 1 ? t : c);
                        if (n % 2 == 1)
                            h(r, t, c) = -h(r, t, c);
                    }
        }

        void transform(ChannelTensor &h, int axis, Direction dir)
        {
            fft::transform_axis(h.data(), h.nr(), h.nt(), h.nc(), axis, dir);
        }

        // Projects an Nr x Nr covariance onto the DFT beams [centre - half, centre + half].
        // Beamspace MUSIC on the DFT beams centre +- half: the noise subspace of
        // W R W^H, mapped back to element space as W^H Un so the ordinary
        // steering search applies.
        CMatrix beamspace_noise_basis(const CMatrix &r, std::size_t centre, std::size_t half, bool *rank_deficient)
        {
            const auto nr = static_cast<std::size_t>(r.rows());
            const std::size_t width = std::min(2 * half + 1, nr);
            if (width < 2)
                throw Error(ErrorCode::InvalidArgument, "beamspace needs at least two beams");
            // Row k: beam (centre - half + k), w[k, n] = (-1)^n e^{-j 2 pi n b / Nr}.
            CMatrix w(static_cast<Eigen::Index>(width), static_cast<Eigen::Index>(nr));
            for (std::size_t k = 0; k < width; ++k)
            {
                const std::size_t b = (centre + nr - half + k) % nr;
                for (std::size_t n = 0; n < nr; ++n)
                {
                    const double ph = -2.0 * kPi * static_cast<double>(n * b % nr) / static_cast<double>(nr);
                    w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n)) =
                        std::polar(n % 2 == 0 ? 1.0 : -1.0, ph);
                }
            }
            const CMatrix rb = w * r * w.adjoint();
            return w.adjoint() * noise_subspace(rb, 1, rank_deficient);
        }

        // Rx covariance from the snapshots in one delay bin (single-BS) or one
        // AoD bin (dual-BS), tapered along the gated axis.
        CMatrix gated_rx_covariance(const ChannelTensor &h, SensingMode mode, std::size_t bin)
        {
            const std::size_t nr = h.nr(), nt = h.nt(), nc = h.nc();
            if (mode == SensingMode::SingleBS)
            {
                const auto w = hamming(nc);
                std::vector<cplx> k(nc);
                for (std::size_t c = 0; c < nc; ++c)
                    k[c] = w[c] * std::polar(1.0, 2.0 * kPi * static_cast<double>(c * bin % nc) / static_cast<double>(nc));
                CMatrix x(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nt));
                for (std::size_t r = 0; r < nr; ++r)
                    for (std::size_t t = 0; t < nt; ++t)
                    {
                        cplx acc{0.0, 0.0};
                        for (std::size_t c = 0; c < nc; ++c)
                            acc += h(r, t, c) * k[c];
                        x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(t)) = acc;
                    }
                return (x * x.adjoint()) / static_cast<double>(nt);
            }
            const auto w = hamming(nt);
            std::vector<cplx> k(nt);
            for (std::size_t t = 0; t < nt; ++t)
                k[t] = (t % 2 == 0 ? 1.0 : -1.0) * w[t] *
                       std::polar(1.0, 2.0 * kPi * static_cast<double>(t * bin % nt) / static_cast<double>(nt));
            CMatrix x = CMatrix::Zero(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nc));
            for (std::size_t r = 0; r < nr; ++r)
                for (std::size_t t = 0; t < nt; ++t)
                    for (std::size_t c = 0; c < nc; ++c)
                        x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) += h(r, t, c) * k[t];
            return (x * x.adjoint()) / static_cast<double>(nc);
        }

        void taper_rx(ChannelTensor &h)
        {
            const auto w = hamming(h.nr());
            for (std::size_t r = 0; r < h.nr(); ++r)
                for (std::size_t t = 0; t < h.nt(); ++t)
                    for (std::size_t c = 0; c < h.nc(); ++c)
                        h(r, t, c) *= w[r];
        }

        double bin_sine(double i, std::size_t n, const SystemConfig &cfg)
        {
            return cfg.wavelength() / cfg.spacing() * (i / static_cast<double>(n) - 0.5);
        }

        double checked_asin(double s)
        {
            if (s < -1.0 - 1e-12 || s > 1.0 + 1e-12)
                throw Error(ErrorCode::IndexOutOfVisibleRange, "sine " + std::to_string(s) + " outside [-1, 1]");
            return std::asin(std::clamp(s, -1.0, 1.0));
        }
    } // namespace

    Periodogram::Periodogram(std::vector<std::size_t> shape) : shape_(std::move(shape))
    {
        std::size_t n = 1;
        for (auto d : shape_)
            n *= d;
        values_.assign(n, 0.0);
    }

    ChannelTensor rx_transform(const ChannelTensor &h)
    {
        ChannelTensor f = h;
        alternate_sign(f, 0);
        transform(f, 0, Direction::Forward);
        return f;
    }

    Periodogram periodogram_3d(const ChannelTensor &h)
    {
        ChannelTensor f = rx_transform(h);
        alternate_sign(f, 1);
        transform(f, 1, Direction::Backward);
        transform(f, 2, Direction::Backward);
        Periodogram s({h.nr(), h.nt(), h.nc()});
        auto out = s.values();
        auto in = f.data();
        for (std::size_t i = 0; i < in.size(); ++i)
            out[i] = std::norm(in[i]);
        return s;
    }

    Periodogram aoa_periodogram(const ChannelTensor &h)
    {
        const ChannelTensor f = rx_transform(h);
        Periodogram s({h.nr()});
        const std::size_t snaps = h.nt() * h.nc();
        for (std::size_t r = 0; r < h.nr(); ++r)
        {
            double acc = 0.0;
            const cplx *row = f.data().data() + r * snaps;
            for (std::size_t k = 0; k < snaps; ++k)
                acc += std::norm(row[k]);
            s.at(r) = acc / static_cast<double>(snaps);
        }
        return s;
    }

    Periodogram aoa_aod_periodogram(const ChannelTensor &h)
    {
        ChannelTensor f = rx_transform(h);
        alternate_sign(f, 1);
        transform(f, 1, Direction::Backward);
        Periodogram s({h.nr(), h.nt()});
        auto out = s.values();
        for (std::size_t r = 0; r < h.nr(); ++r)
            for (std::size_t t = 0; t < h.nt(); ++t)
            {
                double acc = 0.0;
                for (std::size_t c = 0; c < h.nc(); ++c)
                    acc += std::norm(f(r, t, c));
                out[r * h.nt() + t] = acc / static_cast<double>(h.nc());
            }
        return s;
    }

    Periodogram aoa_delay_periodogram(const ChannelTensor &h)
    {
        ChannelTensor f = rx_transform(h);
        transform(f, 2, Direction::Backward);
        Periodogram s({h.nr(), h.nc()});
        auto out = s.values();
        for (std::size_t r = 0; r < h.nr(); ++r)
            for (std::size_t t = 0; t < h.nt(); ++t)
                for (std::size_t c = 0; c < h.nc(); ++c)
                    out[r * h.nc() + c] += std::norm(f(r, t, c));
        for (auto &v : out)
            v /= static_cast<double>(h.nt());
        return s;
    }

    double aoa_from_bin(double i_phi, const SystemConfig &cfg)
    {
        return checked_asin(bin_sine(i_phi, cfg.num_rx, cfg));
    }

    double aod_from_bin(double i_varphi, const SystemConfig &cfg)
    {
        return checked_asin(bin_sine(i_varphi, cfg.num_tx, cfg));
    }

    double delay_from_bin(double i_tau, const SystemConfig &cfg)
    {
        return i_tau / cfg.bandwidth_hz;
    }

    PathParameters index_to_params(double i_phi, double i_varphi, double i_tau, const SystemConfig &cfg)
    {
        return {aoa_from_bin(i_phi, cfg), aod_from_bin(i_varphi, cfg), delay_from_bin(i_tau, cfg)};
    }

    double soca_pfa(double alpha, std::size_t n)
    {
        const double x = 2.0 + alpha / static_cast<double>(n);
        double sum = 0.0, binom = 1.0, xk = 1.0;
        for (std::size_t k = 0; k < n; ++k)
        {
            sum += binom / xk;
            binom = binom * static_cast<double>(n + k) / static_cast<double>(k + 1);
            xk *= x;
        }
        return 2.0 * std::pow(x, -static_cast<double>(n)) * sum;
    }

    double cfar_alpha(const CfarConfig &cfg)
    {
        if (!cfg.smallest_of)
        {
            const double n = 2.0 * static_cast<double>(cfg.num_train);
            return n * (std::pow(cfg.pfa, -1.0 / n) - 1.0);
        }
        // soca_pfa falls monotonically in alpha.
        double lo = 0.0, hi = 1.0;
        while (soca_pfa(hi, cfg.num_train) > cfg.pfa)
            hi *= 2.0;
        for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it)
        {
            const double mid = 0.5 * (lo + hi);
            (soca_pfa(mid, cfg.num_train) > cfg.pfa ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    DetectionMap cfar_1d(std::span<const double> s, const CfarConfig &cfg)
    {
        const std::size_t n = s.size();
        if (cfg.num_train == 0)
            throw Error(ErrorCode::InvalidArgument, "CFAR needs at least one training cell per side");
        if (!(cfg.pfa > 0.0 && cfg.pfa < 1.0))
            throw Error(ErrorCode::InvalidArgument, "CFAR false-alarm probability must be in (0, 1)");
        if (2 * (cfg.num_train + cfg.num_guard) + 1 > n)
            throw Error(ErrorCode::WindowTooLarge, "CFAR window of " +
                                                       std::to_string(2 * (cfg.num_train + cfg.num_guard) + 1) +
                                                       " cells exceeds spectrum length " + std::to_string(n));
        const double alpha = cfar_alpha(cfg);
        DetectionMap det(n, 0);
        for (std::size_t i = 0; i < n; ++i)
        {
            double left = 0.0, right = 0.0;
            for (std::size_t k = cfg.num_guard + 1; k <= cfg.num_guard + cfg.num_train; ++k)
            {
                left += s[(i + n - k) % n];
                right += s[(i + k) % n];
            }
            const double mean = cfg.smallest_of ? std::min(left, right) / static_cast<double>(cfg.num_train)
                                                : (left + right) / (2.0 * static_cast<double>(cfg.num_train));
            det[i] = s[i] > alpha * mean ? 1 : 0;
        }
        return det;
    }

    std::vector<std::pair<std::size_t, std::size_t>> rowwise_peak(const Periodogram &s2d, const DetectionMap &det)
    {
        if (s2d.rank() != 2 || det.size() != s2d.shape()[0])
            throw Error(ErrorCode::InvalidArgument, "detection map must match the first periodogram axis");
        std::vector<std::pair<std::size_t, std::size_t>> peaks;
        const std::size_t cols = s2d.shape()[1];
        for (std::size_t i = 0; i < det.size(); ++i)
        {
            if (!det[i])
                continue;
            std::size_t best = 0;
            for (std::size_t j = 1; j < cols; ++j)
                if (s2d.at(i, j) > s2d.at(i, best))
                    best = j;
            peaks.emplace_back(i, best);
        }
        return peaks;
    }

    double aoa_to_omega(double aoa, const SystemConfig &cfg)
    {
        return 2.0 * kPi * cfg.spacing() / cfg.wavelength() * std::sin(aoa);
    }

    double omega_to_aoa(double omega, const SystemConfig &cfg)
    {
        return std::asin(std::clamp(omega * cfg.wavelength() / (2.0 * kPi * cfg.spacing()), -1.0, 1.0));
    }

    double omega_to_aod(double omega, const SystemConfig &cfg)
    {
        return std::asin(std::clamp(-omega * cfg.wavelength() / (2.0 * kPi * cfg.spacing()), -1.0, 1.0));
    }

    namespace
    {
        // A delay close to the wrap point can come back from MUSIC on the far
        // side of it; keep the alias next to the periodogram bin, clipped to
        // the unambiguous range.
        double delay_near(double tau, double ref, const SystemConfig &cfg)
        {
            const double period = 1.0 / cfg.subcarrier_spacing_hz;
            if (tau - ref > 0.5 * period)
                tau -= period;
            else if (ref - tau > 0.5 * period)
                tau += period;
            return std::clamp(tau, 0.0, std::nextafter(period, 0.0));
        }
    } // namespace

    double omega_to_delay(double omega, const SystemConfig &cfg)
    {
        const double period = 1.0 / cfg.subcarrier_spacing_hz;
        double tau = std::fmod(-omega / (2.0 * kPi * cfg.subcarrier_spacing_hz), period);
        if (tau < 0.0)
            tau += period;
        if (tau >= period)
            tau -= period;
        return tau;
    }

    SliceCovariances slice_covariances(const ChannelTensor &fr, std::size_t i_phi)
    {
        if (i_phi >= fr.nr())
            throw Error(ErrorCode::InvalidArgument, "AoA bin out of range");
        const auto nt = static_cast<Eigen::Index>(fr.nt());
        const auto nc = static_cast<Eigen::Index>(fr.nc());
        CMatrix slice(nt, nc);
        for (Eigen::Index t = 0; t < nt; ++t)
            for (Eigen::Index c = 0; c < nc; ++c)
                slice(t, c) = fr(i_phi, static_cast<std::size_t>(t), static_cast<std::size_t>(c));
        SliceCovariances out;
        out.tx = (slice * slice.adjoint()) / static_cast<double>(nt);
        out.sc = (slice.transpose() * slice.conjugate()) / static_cast<double>(nc);
        return out;
    }

    SliceCovariances aoa_slice_covariances(const ChannelTensor &h, std::size_t i_phi)
    {
        return slice_covariances(rx_transform(h), i_phi);
    }

    FullCovariances full_covariances(const ChannelTensor &h)
    {
        const auto nr = static_cast<Eigen::Index>(h.nr());
        const auto nt = static_cast<Eigen::Index>(h.nt());
        const auto nc = static_cast<Eigen::Index>(h.nc());
        using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const Eigen::Map<const RowMajor> by_rx(h.data().data(), nr, nt * nc);
        const Eigen::Map<const RowMajor> by_sc(h.data().data(), nr * nt, nc);

        FullCovariances out;
        out.rx = (by_rx * by_rx.adjoint()) / static_cast<double>(nt * nc);
        out.sc = (by_sc.transpose() * by_sc.conjugate()) / static_cast<double>(nr * nt);
        out.tx = CMatrix::Zero(nt, nt);
        for (Eigen::Index r = 0; r < nr; ++r)
        {
            const Eigen::Map<const RowMajor> block(h.data().data() + r * nt * nc, nt, nc);
            out.tx.noalias() += block * block.adjoint();
        }
        out.tx /= static_cast<double>(nr * nc);
        return out;
    }

    const char *to_string(AoaRefinement r) noexcept
    {
        switch (r)
        {
        case AoaRefinement::Off: return "off";
        case AoaRefinement::Beamspace: return "beamspace";
        case AoaRefinement::Gated: return "gated";
        }
        return "off";
    }

    AoaRefinement parse_aoa_refinement(std::string_view s)
    {
        for (auto r : {AoaRefinement::Off, AoaRefinement::Beamspace, AoaRefinement::Gated})
            if (s == to_string(r))
                return r;
        throw Error(ErrorCode::ConfigError, "unknown AoA refinement '" + std::string(s) + "'");
    }

    const char *to_string(EstimationMethod m) noexcept
    {
        return m == EstimationMethod::Music ? "music" : "periodogram";
    }

    std::vector<PathEstimate> detect_scatter_points(const ChannelTensor &h, SensingMode mode,
                                                    EstimationMethod method, const SystemConfig &cfg,
                                                    const DetectionOptions &opts)
    {
        const WindowedTensor windowed = apply_window(h);
        const Periodogram s_aoa = aoa_periodogram(windowed.tensor());
        DetectionMap det = cfar_1d(s_aoa.values(), opts.cfar);
        // Bins mapping to |sin| >= 1 sit on the endfire alias and cannot be localised.
        for (std::size_t i = 0; i < det.size(); ++i)
            if (std::abs(bin_sine(static_cast<double>(i), cfg.num_rx, cfg)) >= 1.0)
                det[i] = 0;

        const Periodogram s2 = mode == SensingMode::DualBS ? aoa_aod_periodogram(windowed.tensor())
                                                           : aoa_delay_periodogram(windowed.tensor());
        const auto peaks = rowwise_peak(s2, det);

        ChannelTensor fr;
        CMatrix rx_cov;
        if (method == EstimationMethod::Music)
        {
            ChannelTensor src = h;
            if (opts.slice_window)
                taper_rx(src);
            fr = rx_transform(src);
            if (opts.aoa_refine == AoaRefinement::Beamspace && !peaks.empty())
                rx_cov = full_covariances(h).rx;
        }

        MusicOptions mopts;
        mopts.grid = opts.music_grid;

        std::vector<PathEstimate> out;
        for (const auto &[i_phi, j] : peaks)
        {
            PathEstimate e;
            e.kind = PathKind::Scatter;
            e.method = method;
            e.aoa_bin = i_phi;
            e.power = s_aoa.at(i_phi);
            e.aoa = aoa_from_bin(static_cast<double>(i_phi), cfg);
            if (mode == SensingMode::DualBS)
            {
                if (std::abs(bin_sine(static_cast<double>(j), cfg.num_tx, cfg)) >= 1.0)
                    continue;
                e.aod = aod_from_bin(static_cast<double>(j), cfg);
            }
            else
            {
                e.tau = delay_from_bin(static_cast<double>(j), cfg);
            }

            if (method == EstimationMethod::Music)
            {
                const SliceCovariances cov = slice_covariances(fr, i_phi);
                const MusicResult res = music_1d(mode == SensingMode::DualBS ? cov.tx : cov.sc, 1, mopts);
                if (res.rank_deficient || res.omegas.empty())
                {
                    e.rank_deficient = true;
                }
                else if (mode == SensingMode::DualBS)
                {
                    e.aod = omega_to_aod(res.omegas.front(), cfg);
                }
                else
                {
                    e.tau = delay_near(omega_to_delay(res.omegas.front(), cfg), *e.tau, cfg);
                }

                if (opts.aoa_refine != AoaRefinement::Off)
                {
                    CMatrix rr;
                    if (opts.aoa_refine == AoaRefinement::Beamspace)
                    {
                        rr = rx_cov;
                    }
                    else
                    {
                        std::size_t gate = 0;
                        if (mode == SensingMode::SingleBS)
                        {
                            const double b = std::round(*e.tau * cfg.bandwidth_hz);
                            gate = static_cast<std::size_t>(b) % cfg.num_subcarriers;
                        }
                        else
                        {
                            const double sn = cfg.spacing() / cfg.wavelength() * std::sin(*e.aod);
                            const double b = std::round(static_cast<double>(cfg.num_tx) * (sn + 0.5));
                            gate = static_cast<std::size_t>(b) % cfg.num_tx;
                        }
                        rr = gated_rx_covariance(h, mode, gate);
                    }
                    const double half = static_cast<double>(opts.aoa_refine_bins) + 0.5;
                    const double n = static_cast<double>(cfg.num_rx);
                    MusicOptions wopts = mopts;
                    wopts.window = std::make_pair(2.0 * kPi * ((static_cast<double>(i_phi) - half) / n - 0.5),
                                                  2.0 * kPi * ((static_cast<double>(i_phi) + half) / n - 0.5));
                    bool deficient = false;
                    const CMatrix un = beamspace_noise_basis(rr, i_phi, opts.aoa_refine_bins, &deficient);
                    const MusicResult ra = deficient ? MusicResult{{}, true} : music_search(un, 1, wopts);
                    if (!ra.rank_deficient && !ra.omegas.empty())
                        e.aoa = omega_to_aoa(ra.omegas.front(), cfg);
                    else
                        e.rank_deficient = true;
                }
            }
            out.push_back(e);
        }
        return out;
    }

    std::optional<PathEstimate> detect_reflection(const ChannelTensor &h, const SystemConfig &cfg,
                                                  const DetectionOptions &opts)
    {
        const Periodogram s3 = periodogram_3d(apply_window(h).tensor());
        std::vector<double> sorted(s3.values().begin(), s3.values().end());
        if (sorted.empty())
            return std::nullopt;
        const double peak = *std::max_element(sorted.begin(), sorted.end());
        auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
        std::nth_element(sorted.begin(), mid, sorted.end());
        const double median = *mid;
        if (!(peak > 0.0) || !(peak > opts.reflection_gamma * median))
            return std::nullopt;

        const FullCovariances cov = full_covariances(h);
        if (opts.reflection_dominance > 0.0)
        {
            Eigen::SelfAdjointEigenSolver<CMatrix> eig(cov.rx, Eigen::EigenvaluesOnly);
            const double trace = cov.rx.trace().real();
            const double top = eig.eigenvalues()(eig.eigenvalues().size() - 1);
            if (!(trace > 0.0) || top / trace < opts.reflection_dominance)
                return std::nullopt;
        }

        MusicOptions mopts;
        mopts.grid = opts.music_grid;
        const MusicResult ra = music_1d(cov.rx, 1, mopts);
        const MusicResult rt = music_1d(cov.tx, 1, mopts);
        const MusicResult rc = music_1d(cov.sc, 1, mopts);
        if (ra.omegas.empty() || rt.omegas.empty() || rc.omegas.empty())
            return std::nullopt;

        PathEstimate e;
        e.kind = PathKind::Reflect;
        e.method = EstimationMethod::Music;
        e.aoa = omega_to_aoa(ra.omegas.front(), cfg);
        e.aod = omega_to_aod(rt.omegas.front(), cfg);
        e.tau = omega_to_delay(rc.omegas.front(), cfg);
        e.power = peak;
        e.rank_deficient = ra.rank_deficient || rt.rank_deficient || rc.rank_deficient;
        return e;
    }

    void write_periodogram_csv(std::ostream &os, const Periodogram &s)
    {
        os << std::setprecision(17);
        if (s.rank() == 1)
        {
            os << "i,value\n";
            for (std::size_t i = 0; i < s.size(); ++i)
                os << i << ',' << s.at(i) << '\n';
        }
        else if (s.rank() == 2)
        {
            os << "i,j,value\n";
            for (std::size_t i = 0; i < s.shape()[0]; ++i)
                for (std::size_t j = 0; j < s.shape()[1]; ++j)
                    os << i << ',' << j << ',' << s.at(i, j) << '\n';
        }
        else
        {
            os << "i,j,k,value\n";
            for (std::size_t i = 0; i < s.shape()[0]; ++i)
                for (std::size_t j = 0; j < s.shape()[1]; ++j)
                    for (std::size_t k = 0; k < s.shape()[2]; ++k)
                        os << i << ',' << j << ',' << k << ',' << s.at(i, j, k) << '\n';
        }
    }

} // namespace isac
