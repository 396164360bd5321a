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

#include "fft.hpp"

#include "isac/geometry.hpp"

#include <fftw3.h>

#include <mutex>

namespace isac::fft
{
    namespace
    {
        // The FFTW planner is not re-entrant; execution with a finished plan is.
        std::mutex &planner_mutex()
        {
            static std::mutex m;
            return m;
        }
    } // namespace

    void transform(std::span<std::complex<double>> data, std::size_t n, std::size_t count,
                   std::size_t stride, std::size_t dist, Direction dir)
    {
        if (n == 0 || count == 0)
            return;
        if ((count - 1) * dist + (n - 1) * stride >= data.size())
            throw Error(ErrorCode::InvalidArgument, "FFT layout exceeds buffer");

        auto *buf = reinterpret_cast<fftw_complex *>(data.data());
        const int len = static_cast<int>(n);
        const int sign = dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
        fftw_plan plan;
        {
            std::lock_guard lock(planner_mutex());
            plan = fftw_plan_many_dft(1, &len, static_cast<int>(count),
                                      buf, nullptr, static_cast<int>(stride), static_cast<int>(dist),
                                      buf, nullptr, static_cast<int>(stride), static_cast<int>(dist),
                                      sign, FFTW_ESTIMATE);
        }
        if (plan == nullptr)
            throw Error(ErrorCode::InvalidArgument, "FFTW could not create a plan");
        fftw_execute(plan);
        {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(plan);
        }
    }

    void transform_axis(std::span<std::complex<double>> data, std::size_t d0, std::size_t d1, std::size_t d2,
                        int axis, Direction dir)
    {
        switch (axis)
        {
        case 0:
            transform(data, d0, d1 * d2, d1 * d2, 1, dir);
            break;
        case 1:
            for (std::size_t i = 0; i < d0; ++i)
                transform(data.subspan(i * d1 * d2, d1 * d2), d1, d2, d2, 1, dir);
            break;
        case 2:
            transform(data, d2, d0 * d1, 1, d2, dir);
            break;
        default:
            throw Error(ErrorCode::InvalidArgument, "axis must be 0, 1 or 2");
        }
    }
} // namespace isac::fft
