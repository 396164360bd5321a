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

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace isac
{
    namespace
    {
        std::uint64_t splitmix(std::uint64_t x)
        {
            x += 0x9E3779B97F4A7C15ULL;
            x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
            x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
            return x ^ (x >> 31);
        }

        std::string snr_tag(double snr)
        {
            std::ostringstream os;
            os << "snr" << snr;
            return os.str();
        }

        // A point from the dual-ray intersection must lie in front of both arrays.
        bool in_front(const DetectedPoint &p, const BaseStation &tx, const BaseStation &rx)
        {
            return dot(p.position - tx.position, tx.boresight) > 0.0 && dot(p.position - rx.position, rx.boresight) > 0.0;
        }

        struct ViewDetections
        {
            std::vector<DetectedPoint> periodogram;
            std::vector<DetectedPoint> music;
            std::vector<std::pair<double, DetectedPoint>> reflections; // (power, point)
        };

        std::vector<DetectedPoint> localize_all(const std::vector<PathEstimate> &est, const View &v, const Scene &scene,
                                                const DetectionOptions &opts)
        {
            const auto &tx = scene.base_stations[v.tx];
            const auto &rx = scene.base_stations[v.rx];
            std::vector<DetectedPoint> out;
            for (const auto &e : est)
            {
                try
                {
                    DetectedPoint p = v.monostatic() ? localize_single(
                                                           e.aoa, unwrap_delay(e.tau.value_or(0.0), opts.min_range, scene.system), rx)
                                                     : localize_dual(e.aoa, e.aod.value_or(0.0), tx, rx);
                    if (!v.monostatic() && !in_front(p, tx, rx))
                        continue;
                    p.source.method = e.method;
                    out.push_back(p);
                }
                catch (const Error &err)
                {
                    if (err.code() != ErrorCode::NearParallelRays && err.code() != ErrorCode::NonPositiveDelay)
                        throw;
                }
            }
            return out;
        }

        void write_file(const std::filesystem::path &path, const std::function<void(std::ostream &)> &body,
                        bool binary = false)
        {
            std::filesystem::create_directories(path.parent_path());
            std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
            if (!os)
                throw Error(ErrorCode::IoError, "cannot write " + path.string());
            body(os);
        }

        std::string view_tag(const View &v, const Scene &scene)
        {
            return scene.base_stations[v.tx].name + "-" + scene.base_stations[v.rx].name;
        }
    } // namespace

    std::uint64_t view_seed(std::uint64_t seed, double snr_db, std::size_t trial, std::size_t view)
    {
        std::uint64_t h = splitmix(seed);
        h = splitmix(h ^ std::bit_cast<std::uint64_t>(snr_db));
        h = splitmix(h ^ static_cast<std::uint64_t>(trial));
        return splitmix(h ^ static_cast<std::uint64_t>(view));
    }

    Pipeline::Pipeline(ExperimentConfig cfg) : cfg_(std::move(cfg))
    {
        cfg_.validate();
        const Scene &scene = cfg_.scene;
        const std::size_t n = scene.base_stations.size();
        for (std::size_t tx = 0; tx < n; ++tx)
            for (std::size_t rx = 0; rx < n; ++rx)
            {
                const auto &btx = scene.base_stations[tx];
                const auto &brx = scene.base_stations[rx];
                if (!btx.can_transmit() || !brx.can_receive())
                    continue;
                if ((tx == rx && !cfg_.single_views) || (tx != rx && !cfg_.dual_views))
                    continue;
                View v;
                v.tx = tx;
                v.rx = rx;
                v.paths = trace_paths(scene, btx, brx, cfg_.trace);
                if (cfg_.mask_edge)
                    std::erase_if(v.paths, [&](const PathRecord &p) {
                        return p.kind == PathKind::Scatter && p.edge == *cfg_.mask_edge;
                    });
                // No path means no echo at all, and the SNR of the view is undefined.
                if (v.paths.empty())
                    continue;
                v.clean = synthesize(v.paths, scene.system);
                views_.push_back(std::move(v));
            }
        if (views_.empty())
            throw Error(ErrorCode::ConfigError, "no transmitter/receiver view is available");
        for (const auto &v : views_)
            reference_power_ += v.clean.mean_power();
        reference_power_ /= static_cast<double>(views_.size());
    }

    double Pipeline::noise_variance(std::size_t view, double snr_db) const
    {
        if (std::isinf(snr_db) && snr_db > 0.0)
            return 0.0;
        const double p = cfg_.per_view_snr ? views_.at(view).clean.mean_power() : reference_power_;
        return p * std::pow(10.0, -snr_db / 10.0);
    }

    std::vector<MethodOutcome> Pipeline::run_trial(double snr_db, std::size_t trial) const
    {
        const auto t0 = std::chrono::steady_clock::now();
        const Scene &scene = cfg_.scene;
        const auto &methods = cfg_.methods;
        const bool want_per = std::find(methods.begin(), methods.end(), Method::PerSpd) != methods.end();
        const bool want_music = std::find_if(methods.begin(), methods.end(),
                                             [](Method m) { return m != Method::PerSpd; }) != methods.end();
        const bool want_refl = std::find(methods.begin(), methods.end(), Method::Refined) != methods.end();

        std::vector<MethodOutcome> out(methods.size());
        for (std::size_t m = 0; m < methods.size(); ++m)
        {
            out[m].result.snr_db = snr_db;
            out[m].result.method = methods[m];
            out[m].result.trial = trial;
        }

        const std::filesystem::path dump_dir = cfg_.out_dir / "dumps";
        const std::string trial_tag = snr_tag(snr_db) + "_t" + std::to_string(trial);

        try
        {
            std::vector<ViewDetections> det(views_.size());
            for (std::size_t vi = 0; vi < views_.size(); ++vi)
            {
                const View &v = views_[vi];
                const ChannelTensor h =
                    add_noise_variance(v.clean, noise_variance(vi, snr_db), view_seed(cfg_.seed, snr_db, trial, vi));
                const SensingMode mode = v.monostatic() ? SensingMode::SingleBS : SensingMode::DualBS;
                const std::string tag = trial_tag + "_" + view_tag(v, scene);

                if (cfg_.dumps_enabled(Dump::Paths) && trial == 0)
                    write_file(dump_dir / ("paths_" + view_tag(v, scene) + ".csv"),
                               [&](std::ostream &os) { write_paths_csv(os, v.paths); });
                if (cfg_.dumps_enabled(Dump::Tensor))
                    write_file(dump_dir / (tag + "_tensor.bin"), [&](std::ostream &os) { write_tensor_binary(os, h); }, true);
                if (cfg_.dumps_enabled(Dump::Periodogram))
                {
                    const WindowedTensor w = apply_window(h);
                    write_file(dump_dir / (tag + "_aoa.csv"),
                               [&](std::ostream &os) { write_periodogram_csv(os, aoa_periodogram(w.tensor())); });
                    const Periodogram s2 = v.monostatic() ? aoa_delay_periodogram(w.tensor()) : aoa_aod_periodogram(w.tensor());
                    write_file(dump_dir / (tag + (v.monostatic() ? "_aoa_delay.csv" : "_aoa_aod.csv")),
                               [&](std::ostream &os) { write_periodogram_csv(os, s2); });
                }

                if (want_per)
                    det[vi].periodogram = localize_all(
                        detect_scatter_points(h, mode, EstimationMethod::Periodogram, scene.system, cfg_.detection), v, scene,
                        cfg_.detection);
                if (want_music)
                    det[vi].music = localize_all(
                        detect_scatter_points(h, mode, EstimationMethod::Music, scene.system, cfg_.detection), v, scene,
                        cfg_.detection);
                if (want_refl)
                {
                    if (auto r = detect_reflection(h, scene.system, cfg_.detection))
                    {
                        if (v.monostatic() && r->tau)
                            r->tau = unwrap_delay(*r->tau, cfg_.detection.min_range, scene.system);
                        const auto &tx = scene.base_stations[v.tx];
                        const auto &rx = scene.base_stations[v.rx];
                        try
                        {
                            DetectedPoint p = reflection_surface(*r, tx, rx, scene.system);
                            if (!p.inconsistent && (v.monostatic() || in_front(p, tx, rx)))
                                det[vi].reflections.emplace_back(r->power, p);
                        }
                        catch (const Error &err)
                        {
                            if (err.code() != ErrorCode::NearParallelRays && err.code() != ErrorCode::NonPositiveDelay)
                                throw;
                        }
                    }
                }
            }

            for (std::size_t m = 0; m < methods.size(); ++m)
            {
                MethodOutcome &mo = out[m];
                for (const auto &d : det)
                {
                    const auto &src = methods[m] == Method::PerSpd ? d.periodogram : d.music;
                    mo.points.insert(mo.points.end(), src.begin(), src.end());
                }
                std::vector<Vec2> pos;
                pos.reserve(mo.points.size());
                for (const auto &p : mo.points)
                    pos.push_back(p.position);

                mo.unrefined = ht_pca_tsr(pos, cfg_.recon);
                mo.shape = mo.unrefined;
                std::vector<Vec2> extra;
                if (methods[m] == Method::Refined)
                {
                    std::vector<std::pair<double, DetectedPoint>> refl;
                    for (const auto &d : det)
                        refl.insert(refl.end(), d.reflections.begin(), d.reflections.end());
                    std::stable_sort(refl.begin(), refl.end(),
                                     [](const auto &a, const auto &b) { return a.first > b.first; });
                    for (const auto &[power, p] : refl)
                    {
                        if (reflection_conflicts(mo.shape, pos, p, cfg_.recon))
                            continue;
                        mo.refinements.push_back(refine_with_reflection(mo.shape, pos, p, cfg_.recon));
                        mo.reflections.push_back(p);
                        extra.push_back(p.position);
                    }
                }

                TrialResult &r = mo.result;
                r.num_points = pos.size();
                r.num_reflections = mo.reflections.size();
                r.edge_count = mo.shape.edge_count();
                const double nan = std::numeric_limits<double>::quiet_NaN();
                r.mse = pos.empty() ? nan : point_mse(pos, scene.target);
                r.direction_error = nan;
                if (!mo.shape.lines.empty())
                {
                    try
                    {
                        r.direction_error = direction_error(mo.shape, scene.target, 3.0 * cfg_.recon.delta_rho).mean_deg;
                    }
                    catch (const Error &e)
                    {
                        if (e.code() != ErrorCode::NoMatches)
                            throw;
                    }
                }
                if (const auto interior = interior_reference(mo.shape, pos, extra))
                {
                    mo.polygon = close_polygon(mo.shape, *interior);
                    r.closed = mo.polygon.has_value() && mo.shape.edge_count() == scene.target.size();
                }

                if (cfg_.dumps_enabled(Dump::Points))
                    write_file(dump_dir / (trial_tag + "_" + to_string(methods[m]) + "_points.csv"), [&](std::ostream &os) {
                        std::vector<DetectedPoint> all = mo.points;
                        all.insert(all.end(), mo.reflections.begin(), mo.reflections.end());
                        write_points_csv(os, all);
                    });
                if (cfg_.dumps_enabled(Dump::Shape))
                    write_file(dump_dir / (trial_tag + "_" + to_string(methods[m]) + "_shape.csv"),
                               [&](std::ostream &os) { write_shape_csv(os, mo.shape, mo.polygon); });
            }
        }
        catch (const std::exception &e)
        {
            for (auto &mo : out)
            {
                mo.result.failed = true;
                mo.result.failure = e.what();
                mo.result.closed = false;
                mo.result.mse = std::numeric_limits<double>::quiet_NaN();
                mo.result.direction_error = std::numeric_limits<double>::quiet_NaN();
            }
        }

        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (auto &mo : out)
            mo.result.runtime_s = elapsed;
        return out;
    }

    namespace
    {
        constexpr const char *kCheckpointName = "checkpoint.csv";

        std::string fingerprint(const ExperimentConfig &cfg)
        {
            ExperimentConfig c = cfg;
            c.out_dir.clear();
            c.dumps.clear();
            c.threads = 0;
            std::ostringstream os;
            os << std::hex << std::hash<std::string>{}(experiment_to_json(c));
            return os.str();
        }

        std::string checkpoint_line(const TrialResult &t)
        {
            std::ostringstream os;
            std::string failure = t.failure;
            std::replace(failure.begin(), failure.end(), ',', ';');
            std::replace(failure.begin(), failure.end(), '\n', ' ');
            os << std::hexfloat << t.snr_db << ',' << to_string(t.method) << ',' << std::dec << t.trial << ','
               << std::hexfloat << t.mse << ',' << t.direction_error << ',' << std::dec << (t.closed ? 1 : 0) << ','
               << t.edge_count << ',' << t.num_points << ',' << t.num_reflections << ',' << (t.failed ? 1 : 0) << ','
               << std::hexfloat << t.runtime_s << ',' << failure;
            return os.str();
        }

        std::optional<TrialResult> parse_checkpoint_line(const std::string &line)
        {
            std::vector<std::string> f;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ','))
                f.push_back(cell);
            if (f.size() < 11)
                return std::nullopt;
            try
            {
                TrialResult t;
                t.snr_db = std::strtod(f[0].c_str(), nullptr);
                t.method = parse_method(f[1]);
                t.trial = std::stoul(f[2]);
                t.mse = std::strtod(f[3].c_str(), nullptr);
                t.direction_error = std::strtod(f[4].c_str(), nullptr);
                t.closed = f[5] == "1";
                t.edge_count = std::stoul(f[6]);
                t.num_points = std::stoul(f[7]);
                t.num_reflections = std::stoul(f[8]);
                t.failed = f[9] == "1";
                t.runtime_s = std::strtod(f[10].c_str(), nullptr);
                t.failure = f.size() > 11 ? f[11] : std::string();
                return t;
            }
            catch (const std::exception &)
            {
                return std::nullopt;
            }
        }
    } // namespace

    SweepResult run_sweep(const ExperimentConfig &cfg, const SweepOptions &opts)
    {
        const Pipeline pipeline(cfg);
        const std::size_t n_snr = cfg.snr_db.size();
        const std::size_t n_methods = cfg.methods.size();
        const std::size_t jobs = n_snr * cfg.trials;

        // results[(snr * trials + trial) * methods + m]
        std::vector<std::optional<TrialResult>> results(jobs * n_methods);
        auto slot = [&](double snr, Method method, std::size_t trial) -> std::optional<std::size_t> {
            const auto si = std::find(cfg.snr_db.begin(), cfg.snr_db.end(), snr);
            const auto mi = std::find(cfg.methods.begin(), cfg.methods.end(), method);
            if (si == cfg.snr_db.end() || mi == cfg.methods.end() || trial >= cfg.trials)
                return std::nullopt;
            const auto s = static_cast<std::size_t>(si - cfg.snr_db.begin());
            const auto m = static_cast<std::size_t>(mi - cfg.methods.begin());
            return (s * cfg.trials + trial) * n_methods + m;
        };

        const std::filesystem::path ckpt = cfg.out_dir / kCheckpointName;
        const std::string fp = fingerprint(cfg);
        if (opts.write_files)
        {
            std::filesystem::create_directories(cfg.out_dir);
            bool reuse = false;
            if (opts.resume && std::filesystem::exists(ckpt))
            {
                std::ifstream in(ckpt);
                std::string line;
                if (std::getline(in, line) && line == "# config " + fp)
                {
                    reuse = true;
                    while (std::getline(in, line))
                        if (auto t = parse_checkpoint_line(line))
                            if (auto s = slot(t->snr_db, t->method, t->trial))
                                results[*s] = *t;
                }
            }
            if (!reuse)
            {
                std::ofstream os(ckpt, std::ios::trunc);
                if (!os)
                    throw Error(ErrorCode::IoError, "cannot write " + ckpt.string());
                os << "# config " << fp << '\n';
            }
        }

        std::vector<std::size_t> todo;
        for (std::size_t j = 0; j < jobs; ++j)
        {
            bool done = true;
            for (std::size_t m = 0; m < n_methods; ++m)
                done = done && results[j * n_methods + m].has_value();
            if (!done)
                todo.push_back(j);
        }

        std::ofstream ckpt_out;
        if (opts.write_files)
            ckpt_out.open(ckpt, std::ios::app);
        std::mutex mu;
        std::atomic<std::size_t> next{0};
        std::size_t finished = jobs - todo.size();

        auto worker = [&] {
            for (;;)
            {
                const std::size_t k = next.fetch_add(1);
                if (k >= todo.size())
                    return;
                const std::size_t j = todo[k];
                const double snr = cfg.snr_db[j / cfg.trials];
                const std::size_t trial = j % cfg.trials;
                auto outcomes = pipeline.run_trial(snr, trial);
                std::lock_guard lock(mu);
                for (std::size_t m = 0; m < n_methods; ++m)
                {
                    results[j * n_methods + m] = outcomes[m].result;
                    if (ckpt_out.is_open())
                        ckpt_out << checkpoint_line(outcomes[m].result) << '\n';
                }
                if (ckpt_out.is_open())
                    ckpt_out.flush();
                ++finished;
                if (opts.progress)
                    opts.progress(finished, jobs);
            }
        };

        std::size_t threads = cfg.threads > 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
        threads = std::min(threads, std::max<std::size_t>(todo.size(), 1));
        {
            std::vector<std::jthread> pool;
            for (std::size_t i = 1; i < threads; ++i)
                pool.emplace_back(worker);
            worker();
        }

        SweepResult sweep;
        // (snr, method, trial) order regardless of completion order.
        for (std::size_t s = 0; s < n_snr; ++s)
            for (std::size_t m = 0; m < n_methods; ++m)
                for (std::size_t t = 0; t < cfg.trials; ++t)
                    sweep.trials.push_back(*results[(s * cfg.trials + t) * n_methods + m]);
        sweep.rows = aggregate(sweep.trials);

        if (opts.write_files)
        {
            write_file(cfg.out_dir / "results.csv", [&](std::ostream &os) { write_results_csv(os, sweep.rows); });
            write_file(cfg.out_dir / "trials.csv", [&](std::ostream &os) { write_trials_csv(os, sweep.trials); });
        }
        return sweep;
    }

} // namespace isac
