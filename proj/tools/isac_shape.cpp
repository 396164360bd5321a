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


// Command-line driver: SNR sweeps, single reconstructions from a point cloud,
// and a dump of the default configuration.

#include "isac/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace
{
    constexpr int kExitConfig = 2;
    constexpr int kExitRuntime = 3;

    int reconstruct_points(const std::string &points_path, const std::string &out_path,
                           const isac::ReconstructionParams &params)
    {
        std::ifstream in(points_path);
        if (!in)
            throw isac::Error(isac::ErrorCode::ConfigError, "cannot open " + points_path);
        const auto points = isac::read_points_csv(in);
        std::vector<isac::Vec2> scatter;
        std::vector<isac::DetectedPoint> reflections;
        for (const auto &p : points)
        {
            if (p.kind == isac::PathKind::Scatter)
                scatter.push_back(p.position);
            else
                reflections.push_back(p);
        }
        isac::ShapeEstimate shape = isac::ht_pca_tsr(scatter, params);
        std::vector<isac::Vec2> extra;
        for (const auto &r : reflections)
        {
            isac::refine_with_reflection(shape, scatter, r, params);
            extra.push_back(r.position);
        }
        std::optional<std::vector<isac::Vec2>> polygon;
        if (auto interior = isac::interior_reference(shape, scatter, extra))
            polygon = isac::close_polygon(shape, *interior);

        if (out_path.empty() || out_path == "-")
        {
            isac::write_shape_csv(std::cout, shape, polygon);
        }
        else
        {
            std::ofstream os(out_path);
            if (!os)
                throw isac::Error(isac::ErrorCode::IoError, "cannot write " + out_path);
            isac::write_shape_csv(os, shape, polygon);
        }
        return 0;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Target shape sensing from simulated mmWave MIMO-OFDM channels"};
    app.require_subcommand(0, 1);

    std::string config_path;
    std::vector<double> snr;
    std::size_t trials = 0;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> methods;
    bool paper_scale = false;
    std::vector<std::string> dumps;
    std::string out_dir;
    std::size_t threads = 0;
    std::optional<std::size_t> mask_edge;
    bool no_resume = false;
    bool quiet = false;

    app.add_option("--config", config_path, "Experiment JSON file")->check(CLI::ExistingFile);
    app.add_option("--snr", snr, "SNR list in dB")->delimiter(',');
    app.add_option("--trials", trials, "Trials per SNR")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Base seed");
    app.add_option("--method", methods, "per-spd, per-music-spd or refined (repeatable)")
        ->delimiter(',')
        ->check(CLI::IsMember({"per-spd", "per-music-spd", "refined"}));
    app.add_flag("--paper-scale", paper_scale, "Use Nc = 256, Nt = Nr = 128");
    app.add_option("--dump", dumps, "paths, tensor, periodogram, points or shape (repeatable)")
        ->delimiter(',')
        ->check(CLI::IsMember({"paths", "tensor", "periodogram", "points", "shape"}));
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--threads", threads, "Worker threads, 0 for all cores");
    app.add_option("--mask-edge", mask_edge, "Suppress scatter from this target edge");
    app.add_flag("--no-resume", no_resume, "Ignore an existing checkpoint");
    app.add_flag("-q,--quiet", quiet, "No progress output");

    auto *print = app.add_subcommand("print-config", "Print the effective configuration as JSON");

    auto *recon = app.add_subcommand("reconstruct", "Reconstruct a shape from a points CSV");
    std::string points_path, shape_out;
    recon->add_option("points", points_path, "Points CSV (kind,x,y,nx,ny)")->required()->check(CLI::ExistingFile);
    recon->add_option("-o,--output", shape_out, "Shape CSV, stdout when omitted");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    isac::ExperimentConfig cfg;
    try
    {
        cfg = config_path.empty() ? isac::default_experiment() : isac::load_experiment_file(config_path);
        if (paper_scale)
            isac::apply_paper_scale(cfg);
        if (!snr.empty())
            cfg.snr_db = snr;
        if (trials > 0)
            cfg.trials = trials;
        if (seed)
            cfg.seed = *seed;
        if (!methods.empty())
        {
            cfg.methods.clear();
            for (const auto &m : methods)
                cfg.methods.push_back(isac::parse_method(m));
        }
        for (const auto &d : dumps)
            cfg.dumps.push_back(isac::parse_dump(d));
        if (!out_dir.empty())
            cfg.out_dir = out_dir;
        if (threads > 0)
            cfg.threads = threads;
        if (mask_edge)
            cfg.mask_edge = mask_edge;
        cfg.validate();
    }
    catch (const isac::Error &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try
    {
        if (*print)
        {
            std::cout << isac::experiment_to_json(cfg) << '\n';
            return 0;
        }
        if (*recon)
            return reconstruct_points(points_path, shape_out, cfg.recon);

        isac::SweepOptions opts;
        opts.resume = !no_resume;
        if (!quiet)
            opts.progress = [](std::size_t done, std::size_t total) {
                std::cerr << "\rtrials " << done << '/' << total << std::flush;
                if (done == total)
                    std::cerr << '\n';
            };
        const auto sweep = isac::run_sweep(cfg, opts);
        isac::write_results_csv(std::cout, sweep.rows);
        return 0;
    }
    catch (const isac::Error &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == isac::ErrorCode::ConfigError ? kExitConfig : kExitRuntime;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
