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


#ifndef ISAC_PIPELINE_HPP
#define ISAC_PIPELINE_HPP

#include "isac/channel.hpp"
#include "isac/estimate.hpp"
#include "isac/localize.hpp"
#include "isac/metrics.hpp"
#include "isac/raytrace.hpp"
#include "isac/reconstruct.hpp"
#include "isac/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace isac
{
    enum class Dump
    {
        Paths,
        Tensor,
        Periodogram,
        Points,
        Shape,
    };

    const char *to_string(Dump d) noexcept;
    Dump parse_dump(std::string_view s); // throws ConfigError

    struct ExperimentConfig
    {
        Scene scene;
        std::vector<double> snr_db{5.0, 10.0, 15.0, 20.0, 25.0};
        std::size_t trials = 50;
        std::vector<Method> methods{Method::PerSpd, Method::PerMusicSpd};
        std::uint64_t seed = 1;
        ReconstructionParams recon;
        DetectionOptions detection;
        TraceOptions trace;
        bool single_views = true; // every BS hearing its own echo
        bool dual_views = true;   // every ordered pair of distinct BSs
        // Noise variance from each view's own mean power. Off, every view gets
        // the same variance, set by the mean power over all views.
        bool per_view_snr = false;
        // Drop scatter paths from this target edge before synthesis.
        std::optional<std::size_t> mask_edge;
        std::filesystem::path out_dir = "results";
        std::vector<Dump> dumps;
        std::size_t threads = 0; // 0 picks the hardware concurrency

        // Throws ConfigError on an unusable experiment.
        void validate() const;
        bool dumps_enabled(Dump d) const;
    };

    // The desk-scale default: a 5 m square target and three BSs spread over a
    // 40 m arc around it, Nt = Nr = 32, Nc = 64.
    std::string default_scene_json();
    ExperimentConfig default_experiment();

    // Full-size arrays: Nc = 256, Nt = Nr = 128, with the CFAR window widened
    // to match.
    void apply_paper_scale(ExperimentConfig &cfg);

    // JSON experiment file; relative scene_file paths resolve against base_dir.
    ExperimentConfig parse_experiment(std::string_view json_text, const std::filesystem::path &base_dir = {});
    ExperimentConfig load_experiment_file(const std::filesystem::path &path);
    std::string experiment_to_json(const ExperimentConfig &cfg);

    // One propagation view: transmitter, receiver and the noiseless channel.
    struct View
    {
        std::size_t tx = 0;
        std::size_t rx = 0;
        std::vector<PathRecord> paths;
        ChannelTensor clean;
        bool monostatic() const { return tx == rx; }
    };

    struct MethodOutcome
    {
        TrialResult result;
        std::vector<DetectedPoint> points;      // scatter points
        std::vector<DetectedPoint> reflections; // used for refinement
        ShapeEstimate unrefined;
        ShapeEstimate shape;
        std::vector<RefineOutcome> refinements;
        std::optional<std::vector<Vec2>> polygon;
    };

    // Seed of the noise draw for one view of one trial.
    std::uint64_t view_seed(std::uint64_t seed, double snr_db, std::size_t trial, std::size_t view);

    class Pipeline
    {
    public:
        explicit Pipeline(ExperimentConfig cfg);

        const ExperimentConfig &config() const { return cfg_; }
        const std::vector<View> &views() const { return views_; }

        // Every configured method on one noise realisation. Module errors are
        // caught and reported on the TrialResult.
        std::vector<MethodOutcome> run_trial(double snr_db, std::size_t trial) const;

        // Noise variance of one view at the given SNR.
        double noise_variance(std::size_t view, double snr_db) const;

    private:
        ExperimentConfig cfg_;
        std::vector<View> views_;
        double reference_power_ = 0.0;
    };

    struct SweepOptions
    {
        bool write_files = true;
        bool resume = true; // reuse trials found in the checkpoint file
        std::function<void(std::size_t done, std::size_t total)> progress;
    };

    struct SweepResult
    {
        std::vector<TrialResult> trials; // ordered by (snr, method, trial)
        std::vector<AggregateRow> rows;
    };

    // Full factorial sweep. Writes results.csv, trials.csv and a checkpoint
    // under cfg.out_dir when write_files is set.
    SweepResult run_sweep(const ExperimentConfig &cfg, const SweepOptions &opts = {});

} // namespace isac

#endif
