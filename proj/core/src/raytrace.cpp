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

#include "isac/raytrace.hpp"

#include <iomanip>
#include <ostream>
#include <random>

namespace isac
{
    namespace
    {
        // Omnidirectional ULA elements cannot tell front from back; a path
        // behind the array shows up at the mirrored angle with the same sine.
        double fold_array_angle(double a)
        {
            if (a > kPi / 2.0)
                return kPi - a;
            if (a < -kPi / 2.0)
                return -kPi - a;
            return a;
        }

        PathRecord make_path(PathKind kind, const BaseStation &tx, const BaseStation &rx, Vec2 point,
                             Vec2 normal, double power_ratio)
        {
            PathRecord p;
            p.kind = kind;
            const Vec2 to_tx = tx.position - point;
            const Vec2 to_rx = rx.position - point;
            p.tau = (norm(to_tx) + norm(to_rx)) / kSpeedOfLight;
            p.aoa = fold_array_angle(rx.array_angle(-to_rx));
            p.aod = fold_array_angle(tx.array_angle(-to_tx));
            p.beta = std::sqrt(power_ratio);
            p.point = point;
            p.normal = normal;
            return p;
        }
    } // namespace

    const char *to_string(PathKind kind) noexcept
    {
        return kind == PathKind::Scatter ? "scatter" : "reflect";
    }

    double scatter_power(double tx_power, double wavelength, double alpha_s, double d1, double d2,
                         double cos_incidence, double cos_scatter, double facet_length)
    {
        const double pi3 = kPi * kPi * kPi;
        return alpha_s * alpha_s * tx_power * wavelength * wavelength / (16.0 * pi3 * d1 * d1 * d2 * d2) *
               cos_incidence * cos_scatter * facet_length;
    }

    double reflection_power(double tx_power, double wavelength, double alpha_r, double d1, double d2)
    {
        const double four_pi = 4.0 * kPi;
        const double d = d1 + d2;
        return alpha_r * alpha_r * tx_power * wavelength * wavelength / (four_pi * four_pi * d * d);
    }

    double default_facet_length(const SystemConfig &cfg) { return 10.0 * cfg.wavelength(); }

    std::vector<MicroFacet> subdivide_edges(const ConvexPolygon &target, double facet_len)
    {
        if (!(facet_len > 0.0))
            throw Error(ErrorCode::InvalidArgument, "facet length must be positive");
        std::vector<MicroFacet> facets;
        for (std::size_t e = 0; e < target.size(); ++e)
        {
            const Edge edge = target.edge(e);
            const double len = edge.length();
            const auto count = static_cast<std::size_t>(std::ceil(len / facet_len - 1e-12));
            const double ds = len / static_cast<double>(count);
            const Vec2 dir = edge.direction();
            for (std::size_t k = 0; k < count; ++k)
                facets.push_back({edge.a + (ds * (static_cast<double>(k) + 0.5)) * dir, edge.normal, ds, e});
        }
        return facets;
    }

    std::vector<PathRecord> enumerate_scatter_paths(const Scene &scene, const BaseStation &tx,
                                                    const BaseStation &rx, double facet_len)
    {
        const double lambda = scene.system.wavelength();
        const double pt = scene.system.tx_power_w;
        std::vector<PathRecord> paths;
        for (const auto &f : subdivide_edges(scene.target, facet_len))
        {
            const Vec2 to_tx = tx.position - f.center;
            const Vec2 to_rx = rx.position - f.center;
            const double d1 = norm(to_tx);
            const double d2 = norm(to_rx);
            const double cos_i = dot(f.normal, to_tx) / d1;
            const double cos_s = dot(f.normal, to_rx) / d2;
            if (!(cos_i > 0.0 && cos_s > 0.0))
                continue;
            const double pr = scatter_power(pt, lambda, scene.material.alpha_s, d1, d2, cos_i, cos_s, f.length);
            PathRecord p = make_path(PathKind::Scatter, tx, rx, f.center, f.normal, pr / pt);
            p.facet_length = f.length;
            p.edge = f.edge;
            paths.push_back(p);
        }
        return paths;
    }

    std::optional<PathRecord> find_reflection_path(const Scene &scene, const BaseStation &tx,
                                                   const BaseStation &rx)
    {
        std::optional<PathRecord> found;
        for (std::size_t e = 0; e < scene.target.size(); ++e)
        {
            const Edge edge = scene.target.edge(e);
            if (!(dot(edge.normal, tx.position - edge.a) > 0.0 && dot(edge.normal, rx.position - edge.a) > 0.0))
                continue;
            const Vec2 image = tx.position - (2.0 * dot(tx.position - edge.a, edge.normal)) * edge.normal;
            // Where does the image->rx segment meet the edge's supporting line?
            const auto t_line = segment_line_crossing(image, rx.position, edge.a, edge.b);
            if (!t_line)
                continue;
            const Vec2 q = image + *t_line * (rx.position - image);
            const double along = dot(q - edge.a, edge.b - edge.a) / dot(edge.b - edge.a, edge.b - edge.a);
            if (along < 0.0 || along > 1.0)
                continue;
            if (found)
                throw Error(ErrorCode::MultipleReflectionPaths,
                            "edges " + std::to_string(found->edge) + " and " + std::to_string(e));
            const double d1 = distance(tx.position, q);
            const double d2 = distance(q, rx.position);
            const double pr = reflection_power(scene.system.tx_power_w, scene.system.wavelength(),
                                               scene.material.alpha_r, d1, d2);
            PathRecord p = make_path(PathKind::Reflect, tx, rx, q, edge.normal, pr / scene.system.tx_power_w);
            p.edge = e;
            found = p;
        }
        return found;
    }

    std::vector<PathRecord> trace_paths(const Scene &scene, const BaseStation &tx, const BaseStation &rx,
                                        const TraceOptions &opts)
    {
        const double facet = opts.facet_len > 0.0 ? opts.facet_len : default_facet_length(scene.system);
        auto paths = enumerate_scatter_paths(scene, tx, rx, facet);
        if (opts.random_scatter_phase)
        {
            std::mt19937_64 rng(opts.phase_seed);
            std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
            for (auto &p : paths)
                p.beta *= std::polar(1.0, phase(rng));
        }
        if (opts.include_reflection)
            if (auto r = find_reflection_path(scene, tx, rx))
                paths.push_back(*r);
        return paths;
    }

    void write_paths_csv(std::ostream &os, const std::vector<PathRecord> &paths)
    {
        os << "kind,tau,aoa,aod,abs_beta,x,y\n";
        os << std::setprecision(17);
        for (const auto &p : paths)
            os << to_string(p.kind) << ',' << p.tau << ',' << p.aoa << ',' << p.aod << ',' << std::abs(p.beta)
               << ',' << p.point.x << ',' << p.point.y << '\n';
    }

} // namespace isac
