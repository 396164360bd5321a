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

#include "isac/scene.hpp"
#include "json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace isac
{
    SystemConfig SystemConfig::make(double carrier_hz, double bandwidth_hz, std::size_t num_subcarriers,
                                    std::size_t num_tx, std::size_t num_rx)
    {
        SystemConfig cfg;
        cfg.carrier_hz = carrier_hz;
        cfg.bandwidth_hz = bandwidth_hz;
        cfg.num_subcarriers = num_subcarriers;
        cfg.subcarrier_spacing_hz = num_subcarriers > 0 ? bandwidth_hz / static_cast<double>(num_subcarriers) : 0.0;
        cfg.num_tx = num_tx;
        cfg.num_rx = num_rx;
        cfg.element_spacing_m = 0.5 * cfg.wavelength();
        return cfg;
    }

    void SystemConfig::validate() const
    {
        auto fail = [](const std::string &msg) { throw Error(ErrorCode::BadSystemConfig, msg); };
        if (!(carrier_hz > 0.0))
            fail("carrier frequency must be positive");
        if (!(bandwidth_hz > 0.0))
            fail("bandwidth must be positive");
        if (num_subcarriers < 2 || num_tx < 2 || num_rx < 2)
            fail("Nc, Nt and Nr must all be at least 2");
        if (!(spacing() > 0.0))
            fail("element spacing must be positive");
        if (!(tx_power_w > 0.0))
            fail("transmit power must be positive");
        const double product = subcarrier_spacing_hz * static_cast<double>(num_subcarriers);
        if (std::abs(product - bandwidth_hz) > 1e-9 * bandwidth_hz)
            fail("subcarrier spacing times Nc must equal the bandwidth");
    }

    Vec2 BaseStation::direction(double array_angle) const
    {
        return std::cos(array_angle) * boresight + std::sin(array_angle) * tangent();
    }

    double BaseStation::array_angle(Vec2 world_dir) const
    {
        return std::atan2(dot(world_dir, tangent()), dot(world_dir, boresight));
    }

    void check_convex(const std::vector<Vec2> &v)
    {
        const std::size_t n = v.size();
        if (n < 3)
            throw Error(ErrorCode::NonConvexTarget, "a polygon needs at least three vertices");
        int sign = 0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const Vec2 e0 = v[(i + 1) % n] - v[i];
            const Vec2 e1 = v[(i + 2) % n] - v[(i + 1) % n];
            const double c = cross(e0, e1);
            const int s = c > 0.0 ? 1 : (c < 0.0 ? -1 : 0);
            if (s == 0 || (sign != 0 && s != sign))
                throw Error(ErrorCode::NonConvexTarget, "vertex " + std::to_string((i + 1) % n) + " breaks strict convexity");
            sign = s;
        }
        // A star-shaped vertex order can keep one turning sign while winding twice.
        double turning = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            const Vec2 e0 = v[(i + 1) % n] - v[i];
            const Vec2 e1 = v[(i + 2) % n] - v[(i + 1) % n];
            turning += std::atan2(cross(e0, e1), dot(e0, e1));
        }
        if (std::abs(std::abs(turning) - 2.0 * kPi) > 1e-6)
            throw Error(ErrorCode::NonConvexTarget, "vertex list winds more than once");
    }

    ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices))
    {
        check_convex(vertices_);
        if (signed_area() < 0.0)
            std::reverse(vertices_.begin(), vertices_.end());
    }

    double ConvexPolygon::signed_area() const
    {
        double a = 0.0;
        for (std::size_t i = 0; i < vertices_.size(); ++i)
            a += cross(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
        return 0.5 * a;
    }

    Edge ConvexPolygon::edge(std::size_t i) const
    {
        const Vec2 a = vertices_[i % vertices_.size()];
        const Vec2 b = vertices_[(i + 1) % vertices_.size()];
        // CCW winding: the interior is on the left, so the outward normal is the clockwise turn.
        return {a, b, normalized(perp_cw(b - a))};
    }

    std::vector<Edge> ConvexPolygon::edges() const
    {
        std::vector<Edge> out;
        out.reserve(vertices_.size());
        for (std::size_t i = 0; i < vertices_.size(); ++i)
            out.push_back(edge(i));
        return out;
    }

    Vec2 ConvexPolygon::centroid() const
    {
        Vec2 c;
        for (const auto &v : vertices_)
            c += v;
        return c / static_cast<double>(vertices_.size());
    }

    bool ConvexPolygon::contains(Vec2 p) const
    {
        for (std::size_t i = 0; i < vertices_.size(); ++i)
        {
            const Edge e = edge(i);
            if (dot(p - e.a, e.normal) >= 0.0)
                return false;
        }
        return !vertices_.empty();
    }

    Scene validate_scene(const SystemConfig &config, std::vector<BaseStation> stations,
                         std::vector<Vec2> target_vertices, const Material &material)
    {
        config.validate();

        const double energy = material.alpha_r * material.alpha_r + material.alpha_s * material.alpha_s;
        if (std::abs(energy - 1.0) > 1e-12 || material.alpha_r < 0.0 || material.alpha_s < 0.0)
            throw Error(ErrorCode::EnergyConservationViolated,
                        "alpha_r^2 + alpha_s^2 = " + std::to_string(energy));

        ConvexPolygon target(std::move(target_vertices));

        if (stations.empty())
            throw Error(ErrorCode::BadSystemConfig, "at least one base station is required");
        for (auto &bs : stations)
        {
            const double n = norm(bs.boresight);
            if (!(n > 0.0) || std::abs(n - 1.0) > 1e-9)
                throw Error(ErrorCode::BadSystemConfig, "boresight of '" + bs.name + "' is not a unit vector");
            bs.boresight = bs.boresight / n;
            if (target.contains(bs.position))
                throw Error(ErrorCode::BSInsideTarget, "base station '" + bs.name + "' lies inside the target");
        }

        Scene scene;
        scene.system = config;
        if (scene.system.element_spacing_m <= 0.0)
            scene.system.element_spacing_m = 0.5 * scene.system.wavelength();
        scene.base_stations = std::move(stations);
        scene.target = std::move(target);
        scene.material = material;
        return scene;
    }

    namespace detail
    {
        namespace
        {
            Vec2 vec_from_json(const nlohmann::json &j)
            {
                if (j.is_array() && j.size() == 2)
                    return {j[0].get<double>(), j[1].get<double>()};
                if (j.is_object())
                    return {j.at("x").get<double>(), j.at("y").get<double>()};
                throw Error(ErrorCode::ConfigError, "expected a 2-D point, got " + j.dump());
            }

            BsRole role_from_string(const std::string &s)
            {
                if (s == "tx" || s == "transmitter")
                    return BsRole::Transmitter;
                if (s == "rx" || s == "receiver")
                    return BsRole::Receiver;
                if (s == "both")
                    return BsRole::Both;
                throw Error(ErrorCode::ConfigError, "unknown base-station role '" + s + "'");
            }

            const char *role_to_string(BsRole r)
            {
                switch (r)
                {
                case BsRole::Transmitter: return "tx";
                case BsRole::Receiver: return "rx";
                case BsRole::Both: return "both";
                }
                return "both";
            }
        } // namespace

        Scene scene_from_json(const nlohmann::json &j)
        {
            try
            {
                SystemConfig sys;
                if (j.contains("system"))
                {
                    const auto &s = j.at("system");
                    sys.carrier_hz = s.value("f0", sys.carrier_hz);
                    sys.bandwidth_hz = s.value("bandwidth", sys.bandwidth_hz);
                    sys.num_subcarriers = s.value("nc", sys.num_subcarriers);
                    sys.num_tx = s.value("nt", sys.num_tx);
                    sys.num_rx = s.value("nr", sys.num_rx);
                    sys.subcarrier_spacing_hz = s.value("delta_f", sys.bandwidth_hz / static_cast<double>(std::max<std::size_t>(sys.num_subcarriers, 1)));
                    sys.element_spacing_m = s.value("d", 0.0);
                    sys.tx_power_w = s.value("pt", sys.tx_power_w);
                }

                std::vector<BaseStation> stations;
                for (const auto &b : j.at("base_stations"))
                {
                    BaseStation bs;
                    bs.name = b.value("name", "bs" + std::to_string(stations.size()));
                    bs.position = vec_from_json(b.at("position"));
                    if (b.contains("boresight"))
                        bs.boresight = vec_from_json(b.at("boresight"));
                    else if (b.contains("facing"))
                        bs.boresight = normalized(vec_from_json(b.at("facing")) - bs.position);
                    bs.role = role_from_string(b.value("role", std::string("both")));
                    stations.push_back(std::move(bs));
                }

                std::vector<Vec2> vertices;
                for (const auto &v : j.at("target"))
                    vertices.push_back(vec_from_json(v));

                Material mat;
                if (j.contains("material"))
                {
                    const auto &m = j.at("material");
                    mat.alpha_r = m.value("alpha_r", mat.alpha_r);
                    mat.alpha_s = m.value("alpha_s", mat.alpha_s);
                }
                return validate_scene(sys, std::move(stations), std::move(vertices), mat);
            }
            catch (const nlohmann::json::exception &e)
            {
                throw Error(ErrorCode::ConfigError, e.what());
            }
        }

        nlohmann::json scene_to_json_value(const Scene &scene)
        {
            nlohmann::json j;
            const auto &s = scene.system;
            j["system"] = {{"f0", s.carrier_hz}, {"bandwidth", s.bandwidth_hz}, {"delta_f", s.subcarrier_spacing_hz},
                           {"nc", s.num_subcarriers}, {"nt", s.num_tx}, {"nr", s.num_rx},
                           {"d", s.spacing()}, {"pt", s.tx_power_w}};
            j["base_stations"] = nlohmann::json::array();
            for (const auto &bs : scene.base_stations)
                j["base_stations"].push_back({{"name", bs.name},
                                              {"position", {bs.position.x, bs.position.y}},
                                              {"boresight", {bs.boresight.x, bs.boresight.y}},
                                              {"role", role_to_string(bs.role)}});
            j["target"] = nlohmann::json::array();
            for (const auto &v : scene.target.vertices())
                j["target"].push_back({v.x, v.y});
            j["material"] = {{"alpha_r", scene.material.alpha_r}, {"alpha_s", scene.material.alpha_s}};
            return j;
        }
    } // namespace detail

    Scene parse_scene(std::string_view json_text)
    {
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse(json_text);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw Error(ErrorCode::ConfigError, e.what());
        }
        return detail::scene_from_json(j.contains("scene") ? j.at("scene") : j);
    }

    std::string scene_to_json(const Scene &scene)
    {
        return detail::scene_to_json_value(scene).dump(2);
    }

    Scene load_scene_file(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorCode::ConfigError, "cannot open scene file " + path.string());
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_scene(ss.str());
    }

} // namespace isac
