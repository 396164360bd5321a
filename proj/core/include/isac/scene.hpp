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

#ifndef ISAC_SCENE_HPP
#define ISAC_SCENE_HPP

#include "isac/geometry.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace isac
{
    // MIMO-OFDM system parameters shared by every base station.
    struct SystemConfig
    {
        double carrier_hz = 28e9;
        double bandwidth_hz = 1e9;
        double subcarrier_spacing_hz = 1e9 / 64.0;
        std::size_t num_subcarriers = 64;
        std::size_t num_tx = 32;
        std::size_t num_rx = 32;
        double element_spacing_m = 0.0; // 0 selects half a wavelength
        double tx_power_w = 1.0;

        double wavelength() const { return kSpeedOfLight / carrier_hz; }
        double spacing() const { return element_spacing_m > 0.0 ? element_spacing_m : 0.5 * wavelength(); }
        double max_delay() const { return static_cast<double>(num_subcarriers) / bandwidth_hz; }

        // Builds a config with subcarrier spacing B / Nc and d = lambda / 2.
        static SystemConfig make(double carrier_hz, double bandwidth_hz, std::size_t num_subcarriers,
                                 std::size_t num_tx, std::size_t num_rx);

        // Throws BadSystemConfig when an invariant does not hold.
        void validate() const;
    };

    enum class BsRole
    {
        Transmitter,
        Receiver,
        Both,
    };

    // A base station with a uniform linear array. Element n sits at
    // position + n * d * tangent(). Array-frame angles are measured from the
    // boresight, positive toward tangent().
    struct BaseStation
    {
        std::string name;
        Vec2 position;
        Vec2 boresight{0.0, 1.0};
        BsRole role = BsRole::Both;

        Vec2 tangent() const { return perp_cw(boresight); }
        Vec2 direction(double array_angle) const;
        double array_angle(Vec2 world_dir) const;
        bool can_transmit() const { return role != BsRole::Receiver; }
        bool can_receive() const { return role != BsRole::Transmitter; }
    };

    struct Edge
    {
        Vec2 a;
        Vec2 b;
        Vec2 normal; // outward unit normal
        double length() const { return distance(a, b); }
        Vec2 midpoint() const { return 0.5 * (a + b); }
        Vec2 direction() const { return normalized(b - a); }
    };

    // Strictly convex polygon with counter-clockwise vertices. Clockwise input
    // is reversed on construction.
    class ConvexPolygon
    {
    public:
        ConvexPolygon() = default;
        explicit ConvexPolygon(std::vector<Vec2> vertices);

        const std::vector<Vec2> &vertices() const { return vertices_; }
        std::size_t size() const { return vertices_.size(); }
        Edge edge(std::size_t i) const;
        std::vector<Edge> edges() const;
        Vec2 centroid() const;
        double signed_area() const;
        bool contains(Vec2 p) const; // strict interior

    private:
        std::vector<Vec2> vertices_;
    };

    // Throws NonConvexTarget unless the cyclic cross products share one sign
    // and the polygon has at least three vertices.
    void check_convex(const std::vector<Vec2> &vertices);

    struct Material
    {
        double alpha_r = std::sqrt(0.5);
        double alpha_s = std::sqrt(0.5);
    };

    struct Scene
    {
        SystemConfig system;
        std::vector<BaseStation> base_stations;
        ConvexPolygon target;
        Material material;
    };

    Scene validate_scene(const SystemConfig &config, std::vector<BaseStation> stations,
                         std::vector<Vec2> target_vertices, const Material &material);

    // Scene file I/O. The format is a JSON object:
    //   { "system": {...}, "base_stations": [...], "target": [[x,y],...],
    //     "material": {"alpha_r": .., "alpha_s": ..} }
    Scene parse_scene(std::string_view json_text);
    std::string scene_to_json(const Scene &scene);
    Scene load_scene_file(const std::filesystem::path &path);

} // namespace isac

#endif
