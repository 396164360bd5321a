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

#include "isac/channel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>

namespace isac
{
    namespace
    {
        // exp(-j 2 pi x) with the integer part of x removed first.
        cplx cycles_phasor(double x)
        {
            const double frac = x - std::floor(x);
            return std::polar(1.0, -2.0 * kPi * frac);
        }

        template <typename T>
        void put_le(std::ostream &os, T value)
        {
            std::array<unsigned char, sizeof(T)> bytes;
            std::memcpy(bytes.data(), &value, sizeof(T));
            if constexpr (std::endian::native == std::endian::big)
                std::reverse(bytes.begin(), bytes.end());
            os.write(reinterpret_cast<const char *>(bytes.data()), sizeof(T));
        }

        template <typename T>
        T get_le(std::istream &is)
        {
            std::array<unsigned char, sizeof(T)> bytes;
            if (!is.read(reinterpret_cast<char *>(bytes.data()), sizeof(T)))
                throw Error(ErrorCode::IoError, "truncated tensor file");
            if constexpr (std::endian::native == std::endian::big)
                std::reverse(bytes.begin(), bytes.end());
            T value;
            std::memcpy(&value, bytes.data(), sizeof(T));
            return value;
        }
    } // namespace

    ChannelTensor::ChannelTensor(std::size_t nr, std::size_t nt, std::size_t nc)
        : nr_(nr), nt_(nt), nc_(nc), data_(nr * nt * nc, cplx{0.0, 0.0})
    {
    }

    ChannelTensor::ChannelTensor(const SystemConfig &cfg)
        : ChannelTensor(cfg.num_rx, cfg.num_tx, cfg.num_subcarriers)
    {
    }

    double ChannelTensor::mean_power() const
    {
        if (data_.empty())
            return 0.0;
        double acc = 0.0;
        for (const auto &v : data_)
            acc += std::norm(v);
        return acc / static_cast<double>(data_.size());
    }

    bool ChannelTensor::all_finite() const
    {
        for (const auto &v : data_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                return false;
        return true;
    }

    ChannelTensor synthesize(std::span<const PathRecord> paths, const SystemConfig &cfg)
    {
        const std::size_t nr = cfg.num_rx, nt = cfg.num_tx, nc = cfg.num_subcarriers;
        ChannelTensor h(nr, nt, nc);
        const double spacing = cfg.spacing() / cfg.wavelength();
        const double df = cfg.subcarrier_spacing_hz;
        const double f_low = cfg.carrier_hz - 0.5 * static_cast<double>(nc) * df;

        std::vector<cplx> rx(nr), tx(nt), sc(nc), rt(nr * nt);
        auto out = h.data();
        for (const auto &p : paths)
        {
            const double srx = spacing * std::sin(p.aoa);
            const double stx = spacing * std::sin(p.aod);
            for (std::size_t r = 0; r < nr; ++r)
                rx[r] = cycles_phasor(-static_cast<double>(r) * srx);
            for (std::size_t t = 0; t < nt; ++t)
                tx[t] = cycles_phasor(static_cast<double>(t) * stx);
            const cplx base = p.beta * cycles_phasor(f_low * p.tau);
            for (std::size_t c = 0; c < nc; ++c)
                sc[c] = base * cycles_phasor(static_cast<double>(c) * df * p.tau);
            for (std::size_t r = 0; r < nr; ++r)
                for (std::size_t t = 0; t < nt; ++t)
                    rt[r * nt + t] = rx[r] * tx[t];
            for (std::size_t rtix = 0; rtix < nr * nt; ++rtix)
            {
                const cplx a = rt[rtix];
                cplx *row = out.data() + rtix * nc;
                for (std::size_t c = 0; c < nc; ++c)
                    row[c] += a * sc[c];
            }
        }
        return h;
    }

    ChannelTensor add_noise(const ChannelTensor &h, double snr_db, std::uint64_t seed)
    {
        if (!h.all_finite())
            throw Error(ErrorCode::InvalidArgument, "channel tensor has non-finite entries");
        if (std::isinf(snr_db) && snr_db > 0.0)
            return h;
        const double power = h.mean_power();
        if (!(power > 0.0))
            throw Error(ErrorCode::AllZeroChannel, "SNR is undefined for an all-zero channel");
        return add_noise_variance(h, power * std::pow(10.0, -snr_db / 10.0), seed);
    }

    ChannelTensor add_noise_variance(const ChannelTensor &h, double sigma2, std::uint64_t seed)
    {
        if (!(sigma2 >= 0.0) || !std::isfinite(sigma2))
            throw Error(ErrorCode::InvalidArgument, "noise variance must be finite and non-negative");
        const double s = std::sqrt(0.5 * sigma2);
        ChannelTensor out = h;
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (auto &v : out.data())
        {
            const double re = gauss(rng);
            const double im = gauss(rng);
            v += cplx{s * re, s * im};
        }
        return out;
    }

    std::vector<double> hamming(std::size_t n)
    {
        std::vector<double> w(n, 1.0);
        if (n < 2)
            return w;
        const double denom = static_cast<double>(n - 1);
        for (std::size_t i = 0; i < n; ++i)
            w[i] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(i) / denom);
        // Pin the exact peak for odd lengths.
        if (n % 2 == 1)
            w[n / 2] = 1.0;
        return w;
    }

    Window3D Window3D::hamming_for(std::size_t nr, std::size_t nt, std::size_t nc)
    {
        return {hamming(nr), hamming(nt), hamming(nc)};
    }

    WindowedTensor apply_window(const ChannelTensor &h)
    {
        const auto w = Window3D::hamming_for(h.nr(), h.nt(), h.nc());
        ChannelTensor out = h;
        for (std::size_t r = 0; r < h.nr(); ++r)
            for (std::size_t t = 0; t < h.nt(); ++t)
            {
                const double wrt = w.rx[r] * w.tx[t];
                for (std::size_t c = 0; c < h.nc(); ++c)
                    out(r, t, c) *= wrt * w.sc[c];
            }
        return WindowedTensor(std::move(out));
    }

    void write_tensor_binary(std::ostream &os, const ChannelTensor &h)
    {
        constexpr std::size_t kMax = 0xFFFF;
        if (h.nr() > kMax || h.nt() > kMax || h.nc() > kMax)
            throw Error(ErrorCode::IoError, "tensor dimension does not fit the 16-bit header");
        put_le<std::uint16_t>(os, static_cast<std::uint16_t>(h.nr()));
        put_le<std::uint16_t>(os, static_cast<std::uint16_t>(h.nt()));
        put_le<std::uint16_t>(os, static_cast<std::uint16_t>(h.nc()));
        put_le<std::uint16_t>(os, 0);
        for (const auto &v : h.data())
        {
            put_le<float>(os, static_cast<float>(v.real()));
            put_le<float>(os, static_cast<float>(v.imag()));
        }
        if (!os)
            throw Error(ErrorCode::IoError, "failed writing tensor");
    }

    ChannelTensor read_tensor_binary(std::istream &is)
    {
        const auto nr = get_le<std::uint16_t>(is);
        const auto nt = get_le<std::uint16_t>(is);
        const auto nc = get_le<std::uint16_t>(is);
        (void)get_le<std::uint16_t>(is);
        ChannelTensor h(nr, nt, nc);
        for (auto &v : h.data())
        {
            const float re = get_le<float>(is);
            const float im = get_le<float>(is);
            v = cplx{re, im};
        }
        return h;
    }

} // namespace isac
