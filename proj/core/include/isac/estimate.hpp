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

#ifndef ISAC_ESTIMATE_HPP
#define ISAC_ESTIMATE_HPP

#include "isac/channel.hpp"
#include "isac/raytrace.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace isac
{
    // Non-negative spectrum over 1, 2 or 3 bin axes, row-major.
    class Periodogram
    {
    public:
        Periodogram() = default;
        explicit Periodogram(std::vector<std::size_t> shape);

        const std::vector<std::size_t> &shape() const { return shape_; }
        std::size_t rank() const { return shape_.size(); }
        std::size_t size() const { return values_.size(); }

        double &at(std::size_t i) { return values_[i]; }
        double at(std::size_t i) const { return values_[i]; }
        double at(std::size_t i, std::size_t j) const { return values_[i * shape_[1] + j]; }
        double at(std::size_t i, std::size_t j, std::size_t k) const { return values_[(i * shape_[1] + j) * shape_[2] + k]; }

        std::span<double> values() & { return values_; }
        std::span<const double> values() const & { return values_; }
        // A span of a temporary would dangle.
        std::span<const double> values() const && = delete;

    private:
        std::vector<std::size_t> shape_;
        std::vector<double> values_;
    };

    // S = |F|^2 with F the rx-forward, tx-inverse, subcarrier-inverse DFT of H,
    // angle axes offset by half their length so bin N/2 is broadside.
    Periodogram periodogram_3d(const ChannelTensor &h);

    // rx-axis transform only (the AoA spectrum before squaring), shape Nr x Nt x Nc.
    ChannelTensor rx_transform(const ChannelTensor &h);

    // (1 / (Nt Nc)) sum_{nt,nc} |F_r(H)|^2, length Nr.
    Periodogram aoa_periodogram(const ChannelTensor &h);
    // (1 / Nc) sum_{nc} |F_t^-1 F_r(H)|^2, shape Nr x Nt.
    Periodogram aoa_aod_periodogram(const ChannelTensor &h);
    // (1 / Nt) sum_{nt} |F_c^-1 F_r(H)|^2, shape Nr x Nc.
    Periodogram aoa_delay_periodogram(const ChannelTensor &h);

    struct PathParameters
    {
        double aoa = 0.0;
        double aod = 0.0;
        double tau = 0.0;
    };

    double aoa_from_bin(double i_phi, const SystemConfig &cfg);
    double aod_from_bin(double i_varphi, const SystemConfig &cfg);
    double delay_from_bin(double i_tau, const SystemConfig &cfg);

    // Bin indices to physical parameters. Throws IndexOutOfVisibleRange when an
    // angle bin maps outside [-1, 1] in sine space (element spacing above lambda/2).
    PathParameters index_to_params(double i_phi, double i_varphi, double i_tau, const SystemConfig &cfg);

    struct CfarConfig
    {
        std::size_t num_train = 16; // per side
        std::size_t num_guard = 4;  // per side
        double pfa = 1e-3;
        // Compare against the quieter of the two training windows instead of
        // their joint mean; keeps wide plateaus from masking themselves.
        bool smallest_of = false;
    };

    // Threshold multiplier for square-law cells. Cell averaging uses the closed
    // form 2Nt (Pfa^(-1/2Nt) - 1); smallest-of solves its false-alarm
    // expression for the same Pfa.
    double cfar_alpha(const CfarConfig &cfg);

    // False-alarm probability of smallest-of CFAR with n cells per side and
    // multiplier alpha on the side mean, for exponential noise.
    double soca_pfa(double alpha, std::size_t n);

    using DetectionMap = std::vector<std::uint8_t>;

    // Cell-averaging (or smallest-of) CFAR on a circular 1-D spectrum. Throws WindowTooLarge if
    // 2 (train + guard) + 1 cells do not fit.
    DetectionMap cfar_1d(std::span<const double> spectrum, const CfarConfig &cfg);

    // argmax over the second axis for each detected row (lowest index on ties).
    std::vector<std::pair<std::size_t, std::size_t>> rowwise_peak(const Periodogram &s2d, const DetectionMap &det);

    using CMatrix = Eigen::MatrixXcd;

    struct MusicResult
    {
        std::vector<double> omegas; // descending pseudo-spectrum
        bool rank_deficient = false;
    };

    struct MusicOptions
    {
        std::size_t grid = 4096;
        double tolerance = 1e-6; // golden-section bracket width, rad
        // Optional search window in omega; the full circle when unset.
        std::optional<std::pair<double, double>> window;
    };

    // Steering vector [1, e^{jw}, ..., e^{j(M-1)w}].
    Eigen::VectorXcd steering(std::size_t m, double omega);

    // 1 / (a^H Un Un^H a).
    double music_pseudospectrum(const CMatrix &noise_subspace, double omega);

    // Noise subspace: eigenvectors of the M - k smallest eigenvalues.
    CMatrix noise_subspace(const CMatrix &r, std::size_t k, bool *rank_deficient = nullptr);

    MusicResult music_1d(const CMatrix &r, std::size_t k, const MusicOptions &opts = {});

    // Peak search given the noise basis directly: the k deepest minima of
    // ||Un^H a(w)||^2. Un may be any M-row matrix, e.g. a beamspace noise
    // subspace mapped back to element space.
    MusicResult music_search(const CMatrix &noise_basis, std::size_t k, const MusicOptions &opts = {});

    // Omega <-> parameter maps for the three steering directions.
    double omega_to_aoa(double omega, const SystemConfig &cfg);
    double omega_to_aod(double omega, const SystemConfig &cfg);
    double omega_to_delay(double omega, const SystemConfig &cfg); // in [0, Nc / B)
    double aoa_to_omega(double aoa, const SystemConfig &cfg);

    struct SliceCovariances
    {
        CMatrix tx; // (1/Nt) H_phi H_phi^H, Nt x Nt
        CMatrix sc; // (1/Nc) H_phi^T H_phi^*, Nc x Nc
    };

    // H_phi = F_r(H) at bin i_phi.
    SliceCovariances aoa_slice_covariances(const ChannelTensor &h, std::size_t i_phi);
    SliceCovariances slice_covariances(const ChannelTensor &rx_transformed, std::size_t i_phi);

    struct FullCovariances
    {
        CMatrix rx, tx, sc;
    };

    // Sample covariances along each axis, averaged over the other two.
    FullCovariances full_covariances(const ChannelTensor &h);

    enum class SensingMode
    {
        SingleBS,
        DualBS,
    };

    enum class EstimationMethod
    {
        Periodogram,
        Music,
    };

    const char *to_string(EstimationMethod m) noexcept;

    struct PathEstimate
    {
        PathKind kind = PathKind::Scatter;
        double aoa = 0.0;
        std::optional<double> aod;
        std::optional<double> tau;
        EstimationMethod method = EstimationMethod::Periodogram;
        bool rank_deficient = false;
        std::size_t aoa_bin = 0;
        double power = 0.0; // AoA spectrum value at the detection
    };

    enum class AoaRefinement
    {
        Off,       // bin centre
        Beamspace, // rx covariance of all Nt Nc snapshots, projected on nearby beams
        Gated,     // same, using only snapshots at the estimated delay or AoD bin
    };

    const char *to_string(AoaRefinement r) noexcept;
    AoaRefinement parse_aoa_refinement(std::string_view s); // throws ConfigError

    struct DetectionOptions
    {
        CfarConfig cfar;
        std::size_t music_grid = 4096;
        // MUSIC refinement of the AoA inside +-aoa_refine_bins around the CFAR hit.
        AoaRefinement aoa_refine = AoaRefinement::Beamspace;
        std::size_t aoa_refine_bins = 2;
        // Hamming taper on the rx axis before the slice covariances of the
        // AoD / delay MUSIC step; limits leakage from strong neighbouring bins.
        bool slice_window = false;
        // Reflection presence: max(S3) > gamma * median(S3).
        double reflection_gamma = 1e3;
        // Share of R_r power in its dominant eigenvalue needed to call a single
        // specular path; zero disables the check.
        double reflection_dominance = 0.0;
        // Start of the monostatic range window, m. Echoes are placed in
        // [min_range, min_range + c Nc / (2B)) when localised.
        double min_range = 0.0;
    };

    // Scatter-point detection: CFAR on the AoA spectrum of the windowed tensor,
    // then AoD (dual-BS) or delay (single-BS) per detected AoA bin.
    std::vector<PathEstimate> detect_scatter_points(const ChannelTensor &h, SensingMode mode,
                                                    EstimationMethod method, const SystemConfig &cfg,
                                                    const DetectionOptions &opts = {});

    // Specular path from the full-domain covariances, if the strongest
    // periodogram cell stands out from the median.
    std::optional<PathEstimate> detect_reflection(const ChannelTensor &h, const SystemConfig &cfg,
                                                  const DetectionOptions &opts = {});

    // CSV dump of a 1-D or 2-D periodogram: i,[j,]value.
    void write_periodogram_csv(std::ostream &os, const Periodogram &s);

} // namespace isac

#endif
