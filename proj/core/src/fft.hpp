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

// Thin FFTW wrapper. Transforms are unnormalized in both directions.

#ifndef ISAC_SRC_FFT_HPP
#define ISAC_SRC_FFT_HPP

#include <complex>
#include <cstddef>
#include <span>

namespace isac::fft
{
    enum class Direction
    {
        Forward,  // exp(-j 2 pi k n / N)
        Backward, // exp(+j 2 pi k n / N)
    };

    // In-place transform of `count` interleaved sequences of length n.
    // Element k of sequence m lives at data[m * dist + k * stride].
    void transform(std::span<std::complex<double>> data, std::size_t n, std::size_t count,
                   std::size_t stride, std::size_t dist, Direction dir);

    // In-place transform along one axis of a row-major (d0, d1, d2) tensor.
    void transform_axis(std::span<std::complex<double>> data, std::size_t d0, std::size_t d1, std::size_t d2,
                        int axis, Direction dir);
} // namespace isac::fft

#endif
