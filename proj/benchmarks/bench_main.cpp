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

#include <benchmark/benchmark.h>

#include <random>

namespace
{
    using namespace isac;

    const ExperimentConfig &desk()
    {
        static const ExperimentConfig cfg = default_experiment();
        return cfg;
    }

    ChannelTensor monostatic_channel(double snr_db)
    {
        const Scene &scene = desk().scene;
        const auto paths = trace_paths(scene, scene.base_stations[0], scene.base_stations[0]);
        return add_noise(synthesize(paths, scene.system), snr_db, 7);
    }

    void BM_TracePaths(benchmark::State &state)
    {
        const Scene &scene = desk().scene;
        for (auto _ : state)
            benchmark::DoNotOptimize(trace_paths(scene, scene.base_stations[0], scene.base_stations[1]));
    }
    BENCHMARK(BM_TracePaths)->Unit(benchmark::kMillisecond);

    void BM_Synthesize(benchmark::State &state)
    {
        const Scene &scene = desk().scene;
        const auto paths = trace_paths(scene, scene.base_stations[0], scene.base_stations[0]);
        for (auto _ : state)
            benchmark::DoNotOptimize(synthesize(paths, scene.system));
        state.counters["paths"] = static_cast<double>(paths.size());
    }
    BENCHMARK(BM_Synthesize)->Unit(benchmark::kMillisecond);

    void BM_Periodogram3d(benchmark::State &state)
    {
        const ChannelTensor h = monostatic_channel(20.0);
        for (auto _ : state)
            benchmark::DoNotOptimize(periodogram_3d(h));
    }
    BENCHMARK(BM_Periodogram3d)->Unit(benchmark::kMillisecond);

    void BM_MusicRankOne(benchmark::State &state)
    {
        const auto m = static_cast<std::size_t>(state.range(0));
        const Eigen::VectorXcd a = steering(m, 0.7);
        const CMatrix r = a * a.adjoint() + 0.01 * CMatrix::Identity(a.size(), a.size());
        for (auto _ : state)
            benchmark::DoNotOptimize(music_1d(r, 1));
    }
    BENCHMARK(BM_MusicRankOne)->Arg(32)->Arg(64)->Unit(benchmark::kMicrosecond);

    void BM_DetectScatter(benchmark::State &state)
    {
        const ChannelTensor h = monostatic_channel(20.0);
        const auto method = state.range(0) == 0 ? EstimationMethod::Periodogram : EstimationMethod::Music;
        for (auto _ : state)
            benchmark::DoNotOptimize(
                detect_scatter_points(h, SensingMode::SingleBS, method, desk().scene.system, desk().detection));
        state.SetLabel(to_string(method));
    }
    BENCHMARK(BM_DetectScatter)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

    void BM_HtPcaTsr(benchmark::State &state)
    {
        std::mt19937_64 rng(1);
        std::normal_distribution<double> g(0.0, 0.05);
        const ConvexPolygon square({{0, 0}, {5, 0}, {5, 5}, {0, 5}});
        std::vector<Vec2> pts;
        for (const auto &e : square.edges())
            for (int i = 0; i < 25; ++i)
                pts.push_back(e.a + ((i + 0.5) / 25.0) * (e.b - e.a) + Vec2{g(rng), g(rng)});
        const ReconstructionParams params;
        for (auto _ : state)
            benchmark::DoNotOptimize(ht_pca_tsr(pts, params));
    }
    BENCHMARK(BM_HtPcaTsr)->Unit(benchmark::kMicrosecond);

    void BM_Trial(benchmark::State &state)
    {
        ExperimentConfig cfg = desk();
        cfg.methods = {Method::Refined};
        const Pipeline pipeline(cfg);
        std::size_t t = 0;
        for (auto _ : state)
            benchmark::DoNotOptimize(pipeline.run_trial(20.0, t++));
    }
    BENCHMARK(BM_Trial)->Unit(benchmark::kMillisecond);
} // namespace

BENCHMARK_MAIN();
