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


#include "isac/pipeline.hpp"

#include "json_io.hpp"

#include <fstream>
#include <sstream>

namespace isac
{
    namespace
    {
        using nlohmann::json;

        constexpr double kArcLength = 40.0;       // m
        constexpr double kArcSpan = 4.0 * kPi / 3.0; // three BSs, 120 degrees apart
        constexpr double kTargetSide = 5.0;       // m
        constexpr double kTargetTilt = 20.0;      // deg

        Scene build_default_scene()
        {
            const SystemConfig sys = SystemConfig::make(28e9, 1e9, 64, 32, 32);
            const double radius = kArcLength / kArcSpan;
            std::vector<BaseStation> stations;
            const char *names[] = {"bs0", "bs1", "bs2"};
            for (int k = 0; k < 3; ++k)
            {
                const double a = deg2rad(-90.0 + 120.0 * k);
                BaseStation bs;
                bs.name = names[k];
                bs.position = {radius * std::cos(a), radius * std::sin(a)};
                bs.boresight = normalized(-bs.position);
                bs.role = BsRole::Both;
                stations.push_back(bs);
            }
            const double h = 0.5 * kTargetSide;
            std::vector<Vec2> square{{-h, -h}, {h, -h}, {h, h}, {-h, h}};
            for (auto &v : square)
                v = rotate(v, deg2rad(kTargetTilt));
            return validate_scene(sys, std::move(stations), std::move(square), Material{});
        }

        template <typename T>
        void read_opt(const json &j, const char *key, T &out)
        {
            if (j.contains(key) && !j.at(key).is_null())
                out = j.at(key).get<T>();
        }

        void read_recon(const json &j, ReconstructionParams &p)
        {
            read_opt(j, "gamma_v", p.gamma_v);
            read_opt(j, "gamma_l", p.gamma_l);
            read_opt(j, "gamma_u", p.gamma_u);
            read_opt(j, "gamma_s", p.gamma_s);
            read_opt(j, "lambda_r", p.lambda_r);
            read_opt(j, "delta_rho", p.delta_rho);
            read_opt(j, "min_points", p.min_points);
            read_opt(j, "alpha_u", p.alpha_u);
            if (j.contains("eps_theta_deg"))
                p.eps_theta = deg2rad(j.at("eps_theta_deg").get<double>());
            if (j.contains("delta_theta_deg"))
                p.delta_theta = deg2rad(j.at("delta_theta_deg").get<double>());
        }

        void read_detection(const json &j, DetectionOptions &d)
        {
            if (j.contains("cfar"))
            {
                const auto &c = j.at("cfar");
                read_opt(c, "num_train", d.cfar.num_train);
                read_opt(c, "num_guard", d.cfar.num_guard);
                read_opt(c, "pfa", d.cfar.pfa);
                read_opt(c, "smallest_of", d.cfar.smallest_of);
            }
            read_opt(j, "music_grid", d.music_grid);
            if (j.contains("aoa_refine"))
                d.aoa_refine = parse_aoa_refinement(j.at("aoa_refine").get<std::string>());
            read_opt(j, "slice_window", d.slice_window);
            read_opt(j, "aoa_refine_bins", d.aoa_refine_bins);
            read_opt(j, "reflection_gamma", d.reflection_gamma);
            read_opt(j, "reflection_dominance", d.reflection_dominance);
            read_opt(j, "min_range", d.min_range);
        }

        void read_trace(const json &j, TraceOptions &t)
        {
            read_opt(j, "facet_len", t.facet_len);
            read_opt(j, "include_reflection", t.include_reflection);
            read_opt(j, "random_scatter_phase", t.random_scatter_phase);
            read_opt(j, "phase_seed", t.phase_seed);
        }
    } // namespace

    const char *to_string(Dump d) noexcept
    {
        switch (d)
        {
        case Dump::Paths: return "paths";
        case Dump::Tensor: return "tensor";
        case Dump::Periodogram: return "periodogram";
        case Dump::Points: return "points";
        case Dump::Shape: return "shape";
        }
        return "paths";
    }

    Dump parse_dump(std::string_view s)
    {
        for (Dump d : {Dump::Paths, Dump::Tensor, Dump::Periodogram, Dump::Points, Dump::Shape})
            if (s == to_string(d))
                return d;
        throw Error(ErrorCode::ConfigError, "unknown dump kind '" + std::string(s) + "'");
    }

    void ExperimentConfig::validate() const
    {
        if (trials < 1)
            throw Error(ErrorCode::ConfigError, "trials must be at least 1");
        if (snr_db.empty())
            throw Error(ErrorCode::ConfigError, "the SNR list is empty");
        if (methods.empty())
            throw Error(ErrorCode::ConfigError, "no method selected");
        if (!single_views && !dual_views)
            throw Error(ErrorCode::ConfigError, "both single-BS and dual-BS views are disabled");
        if (mask_edge && *mask_edge >= scene.target.size())
            throw Error(ErrorCode::ConfigError, "mask_edge is not an edge of the target");
        try
        {
            recon.validate();
        }
        catch (const Error &e)
        {
            throw Error(ErrorCode::ConfigError, e.what());
        }
        if (!(detection.cfar.pfa > 0.0 && detection.cfar.pfa < 1.0) || detection.cfar.num_train == 0)
            throw Error(ErrorCode::ConfigError, "CFAR needs training cells and 0 < pfa < 1");
        if (!(detection.min_range >= 0.0))
            throw Error(ErrorCode::ConfigError, "min_range must be non-negative");
        if (detection.aoa_refine != AoaRefinement::Off && detection.aoa_refine_bins == 0)
            throw Error(ErrorCode::ConfigError, "AoA refinement needs aoa_refine_bins >= 1");
        if (2 * (detection.cfar.num_train + detection.cfar.num_guard) + 1 > scene.system.num_rx)
            throw Error(ErrorCode::ConfigError, "CFAR window does not fit the AoA spectrum");
    }

    bool ExperimentConfig::dumps_enabled(Dump d) const
    {
        for (auto x : dumps)
            if (x == d)
                return true;
        return false;
    }

    std::string default_scene_json()
    {
        return scene_to_json(build_default_scene());
    }

    ExperimentConfig default_experiment()
    {
        ExperimentConfig cfg;
        cfg.scene = build_default_scene();
        // A 32-bin AoA spectrum cannot hold the 41-cell default window, and an
        // extended target fills a plateau wider than any cell-averaging guard.
        cfg.detection.cfar = {3, 6, 0.1, true};
        cfg.detection.aoa_refine = AoaRefinement::Gated;
        cfg.detection.slice_window = true;
        // Corner clusters in views without a specular path can pass the
        // peak-to-median test at high SNR.
        cfg.detection.reflection_dominance = 0.5;
        // Far corners of the target lie beyond c Nc / (2B) = 9.6 m from a BS,
        // and nothing comes within 2 m of one.
        cfg.detection.min_range = 2.0;
        // An edge seen from the desk topology yields 7 to 15 points.
        cfg.recon.min_points = 7;
        return cfg;
    }

    void apply_paper_scale(ExperimentConfig &cfg)
    {
        const SystemConfig &old = cfg.scene.system;
        const SystemConfig sys = SystemConfig::make(old.carrier_hz, old.bandwidth_hz, 256, 128, 128);
        cfg.scene = validate_scene(sys, cfg.scene.base_stations, cfg.scene.target.vertices(), cfg.scene.material);
        cfg.detection.cfar = CfarConfig{};
    }

    ExperimentConfig parse_experiment(std::string_view json_text, const std::filesystem::path &base_dir)
    {
        json j;
        try
        {
            j = json::parse(json_text);
        }
        catch (const json::exception &e)
        {
            throw Error(ErrorCode::ConfigError, e.what());
        }
        try
        {
            ExperimentConfig cfg = default_experiment();
            if (j.contains("scene_file"))
            {
                auto path = std::filesystem::path(j.at("scene_file").get<std::string>());
                if (path.is_relative())
                    path = base_dir / path;
                cfg.scene = load_scene_file(path);
            }
            else if (j.contains("scene"))
            {
                cfg.scene = detail::scene_from_json(j.at("scene"));
            }
            bool paper = false;
            if (j.contains("experiment"))
            {
                const auto &e = j.at("experiment");
                read_opt(e, "snr_db", cfg.snr_db);
                read_opt(e, "trials", cfg.trials);
                read_opt(e, "seed", cfg.seed);
                read_opt(e, "threads", cfg.threads);
                read_opt(e, "single_views", cfg.single_views);
                read_opt(e, "dual_views", cfg.dual_views);
                read_opt(e, "per_view_snr", cfg.per_view_snr);
                read_opt(e, "paper_scale", paper);
                if (e.contains("methods"))
                {
                    cfg.methods.clear();
                    for (const auto &m : e.at("methods"))
                        cfg.methods.push_back(parse_method(m.get<std::string>()));
                }
                if (e.contains("mask_edge") && !e.at("mask_edge").is_null())
                    cfg.mask_edge = e.at("mask_edge").get<std::size_t>();
                if (e.contains("out_dir"))
                    cfg.out_dir = e.at("out_dir").get<std::string>();
                if (e.contains("dumps"))
                    for (const auto &d : e.at("dumps"))
                        cfg.dumps.push_back(parse_dump(d.get<std::string>()));
            }
            if (paper)
                apply_paper_scale(cfg);
            if (j.contains("reconstruction"))
                read_recon(j.at("reconstruction"), cfg.recon);
            if (j.contains("detection"))
                read_detection(j.at("detection"), cfg.detection);
            if (j.contains("trace"))
                read_trace(j.at("trace"), cfg.trace);
            cfg.validate();
            return cfg;
        }
        catch (const json::exception &e)
        {
            throw Error(ErrorCode::ConfigError, e.what());
        }
    }

    ExperimentConfig load_experiment_file(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw Error(ErrorCode::ConfigError, "cannot open config file " + path.string());
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_experiment(ss.str(), path.parent_path());
    }

    std::string experiment_to_json(const ExperimentConfig &cfg)
    {
        json j;
        j["scene"] = detail::scene_to_json_value(cfg.scene);
        json methods = json::array();
        for (auto m : cfg.methods)
            methods.push_back(to_string(m));
        json dumps = json::array();
        for (auto d : cfg.dumps)
            dumps.push_back(to_string(d));
        j["experiment"] = {{"snr_db", cfg.snr_db},
                           {"trials", cfg.trials},
                           {"methods", methods},
                           {"seed", cfg.seed},
                           {"threads", cfg.threads},
                           {"single_views", cfg.single_views},
                           {"dual_views", cfg.dual_views},
                           {"per_view_snr", cfg.per_view_snr},
                           {"mask_edge", cfg.mask_edge ? json(*cfg.mask_edge) : json(nullptr)},
                           {"out_dir", cfg.out_dir.string()},
                           {"dumps", dumps}};
        const auto &r = cfg.recon;
        j["reconstruction"] = {{"gamma_v", r.gamma_v},
                               {"gamma_l", r.gamma_l},
                               {"gamma_u", r.gamma_u},
                               {"eps_theta_deg", rad2deg(r.eps_theta)},
                               {"gamma_s", r.gamma_s},
                               {"lambda_r", r.lambda_r},
                               {"delta_rho", r.delta_rho},
                               {"delta_theta_deg", rad2deg(r.delta_theta)},
                               {"min_points", r.min_points},
                               {"alpha_u", r.alpha_u}};
        const auto &d = cfg.detection;
        j["detection"] = {{"cfar", {{"num_train", d.cfar.num_train}, {"num_guard", d.cfar.num_guard}, {"pfa", d.cfar.pfa}, {"smallest_of", d.cfar.smallest_of}}},
                          {"music_grid", d.music_grid},
                          {"aoa_refine", to_string(d.aoa_refine)},
                          {"slice_window", d.slice_window},
                          {"aoa_refine_bins", d.aoa_refine_bins},
                          {"reflection_gamma", d.reflection_gamma},
                          {"reflection_dominance", d.reflection_dominance},
                          {"min_range", d.min_range}};
        j["trace"] = {{"facet_len", cfg.trace.facet_len},
                      {"include_reflection", cfg.trace.include_reflection},
                      {"random_scatter_phase", cfg.trace.random_scatter_phase},
                      {"phase_seed", cfg.trace.phase_seed}};
        return j.dump(2);
    }

} // namespace isac
