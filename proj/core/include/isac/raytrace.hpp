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

#ifndef ISAC_RAYTRACE_HPP
#define ISAC_RAYTRACE_HPP

#include "isac/scene.hpp"

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace isac
{
    enum class PathKind
    {
        Scatter,
        Reflect,
    };

    const char *to_string(PathKind kind) noexcept;

    // A piece of a polygon edge treated as an independent Lambertian radiator.
    struct MicroFacet
    {
        Vec2 center;
        Vec2 normal;
        double length = 0.0; // dS
        std::size_t edge = 0;
    };

    // One first-order propagation path between a transmitting and a receiving BS.
    struct PathRecord
    {
        PathKind kind = PathKind::Scatter;
        double tau = 0.0;                // s
        double aoa = 0.0;                // rad, receive array frame
        double aod = 0.0;                // rad, transmit array frame
        std::complex<double> beta{0.0};  // sqrt(P_R / P_T), optional random phase
        Vec2 point;                      // facet centre or specular point
        Vec2 normal;                     // outward surface normal at `point`
        double facet_length = 0.0;       // dS, zero for reflections
        std::size_t edge = 0;
    };

    // Lambertian received power of one facet (2-D analogue of the microfacet model).
    double scatter_power(double tx_power, double wavelength, double alpha_s, double d1, double d2,
                         double cos_incidence, double cos_scatter, double facet_length);

    // Specular received power along the mirror-source path of length d1 + d2.
    double reflection_power(double tx_power, double wavelength, double alpha_r, double d1, double d2);

    std::vector<MicroFacet> subdivide_edges(const ConvexPolygon &target, double facet_len);

    // Doubly visible facets become scatter paths; empty if none faces both ends.
    std::vector<PathRecord> enumerate_scatter_paths(const Scene &scene, const BaseStation &tx,
                                                    const BaseStation &rx, double facet_len);

    // At most one specular path exists for a convex target. Throws
    // MultipleReflectionPaths if more than one edge produces a valid crossing.
    std::optional<PathRecord> find_reflection_path(const Scene &scene, const BaseStation &tx,
                                                   const BaseStation &rx);

    struct TraceOptions
    {
        double facet_len = 0.0; // 0 selects ten wavelengths
        bool include_reflection = true;
        bool random_scatter_phase = false;
        std::uint64_t phase_seed = 0;
    };

    double default_facet_length(const SystemConfig &cfg);

    // Scatter paths followed by the reflection path, if any.
    std::vector<PathRecord> trace_paths(const Scene &scene, const BaseStation &tx, const BaseStation &rx,
                                        const TraceOptions &opts = {});

    // CSV with header kind,tau,aoa,aod,abs_beta,x,y.
    void write_paths_csv(std::ostream &os, const std::vector<PathRecord> &paths);

} // namespace isac

#endif
