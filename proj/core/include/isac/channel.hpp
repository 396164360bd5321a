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

#ifndef ISAC_CHANNEL_HPP
#define ISAC_CHANNEL_HPP

#include "isac/raytrace.hpp"
#include "isac/scene.hpp"

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace isac
{
    using cplx = std::complex<double>;

    // Channel response H with shape Nr x Nt x Nc, stored row-major in (nr, nt, nc).
    class ChannelTensor
    {
    public:
        ChannelTensor() = default;
        ChannelTensor(std::size_t nr, std::size_t nt, std::size_t nc);
        explicit ChannelTensor(const SystemConfig &cfg);

        std::size_t nr() const { return nr_; }
        std::size_t nt() const { return nt_; }
        std::size_t nc() const { return nc_; }
        std::size_t size() const { return data_.size(); }

        cplx &operator()(std::size_t r, std::size_t t, std::size_t c) { return data_[(r * nt_ + t) * nc_ + c]; }
        const cplx &operator()(std::size_t r, std::size_t t, std::size_t c) const { return data_[(r * nt_ + t) * nc_ + c]; }

        std::span<cplx> data() & { return data_; }
        std::span<const cplx> data() const & { return data_; }
        std::span<const cplx> data() const && = delete;

        double mean_power() const;
        bool all_finite() const;

    private:
        std::size_t nr_ = 0, nt_ = 0, nc_ = 0;
        std::vector<cplx> data_;
    };

    // H = sum over paths of beta * exp(-j2pi(f0 - Nc/2 df) tau) * exp(-j2pi nc df tau)
    //                     * exp(-j2pi nt d/lambda sin(aod)) * exp(+j2pi nr d/lambda sin(aoa)).
    ChannelTensor synthesize(std::span<const PathRecord> paths, const SystemConfig &cfg);

    inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

    // Adds circular complex Gaussian noise with variance mean|H|^2 * 10^(-snr/10).
    // Passing kNoNoise returns the input unchanged. Throws AllZeroChannel.
    ChannelTensor add_noise(const ChannelTensor &h, double snr_db, std::uint64_t seed);

    // Same noise process with the variance given directly.
    ChannelTensor add_noise_variance(const ChannelTensor &h, double sigma2, std::uint64_t seed);

    // 0.54 - 0.46 cos(2 pi n / (N - 1)); a single-point window is 1.
    std::vector<double> hamming(std::size_t n);

    // Separable Hamming window, w[r,t,c] = wr[r] * wt[t] * wc[c].
    struct Window3D
    {
        std::vector<double> rx, tx, sc;
        static Window3D hamming_for(std::size_t nr, std::size_t nt, std::size_t nc);
        double operator()(std::size_t r, std::size_t t, std::size_t c) const { return rx[r] * tx[t] * sc[c]; }
    };

    // A tensor that already carries the window. Kept as its own type so the
    // window cannot be applied twice by accident.
    class WindowedTensor
    {
    public:
        const ChannelTensor &tensor() const { return h_; }

    private:
        friend WindowedTensor apply_window(const ChannelTensor &h);
        explicit WindowedTensor(ChannelTensor h) : h_(std::move(h)) {}
        ChannelTensor h_;
    };

    WindowedTensor apply_window(const ChannelTensor &h);

    // Binary dump: 8-byte header of four little-endian uint16 (Nr, Nt, Nc, 0)
    // followed by Nr*Nt*Nc little-endian complex64 values in (nr, nt, nc) order.
    void write_tensor_binary(std::ostream &os, const ChannelTensor &h);
    ChannelTensor read_tensor_binary(std::istream &is);

} // namespace isac

#endif
