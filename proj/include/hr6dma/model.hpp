// SPDX-License-Identifier: Apache-2.0
//
// hr6dma: max-min beam coverage with hierarchically rotatable arrays
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

#ifndef HR6DMA_MODEL_HPP
#define HR6DMA_MODEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace hr6dma
{
    using cdouble = std::complex<double>;

    // Physical description of the rotatable ULA. Angles in radians, spacing in wavelengths.
    struct ArrayConfig
    {
        int n_antennas = 10;
        double spacing_wl = 0.5;
        double psi_max = std::numbers::pi / 3.0; // array-wise rotation limit
        double phi_max = std::numbers::pi / 3.0; // per-antenna rotation limit
        double directivity_p = 1.0;              // cosine-power exponent p
        double g_max = 4.0;                      // boresight gain, linear

        // Throws ConfigError naming the first offending field.
        void validate() const;

        // Boresight gain of the cos^{2p} pattern under 3D power conservation, 2(2p + 1).
        // Not used by default: the coverage experiments use g_max = 4 with p = 1.
        static double power_conserving_gmax(double directivity_p);

        double max_beamforming_gain() const { return n_antennas * g_max; }

        bool operator==(const ArrayConfig &) const = default;
    };

    // Hierarchical configuration: one array rotation plus N per-antenna rotations.
    struct RotationState
    {
        double psi = 0.0;
        Eigen::VectorXd phi;

        static RotationState aligned(int n_antennas, double psi = 0.0)
        {
            return {psi, Eigen::VectorXd::Zero(n_antennas)};
        }
    };

    // Throws ConstraintError if |psi| > psi_max or any |phi_n| > phi_max, ConfigError on size mismatch.
    void check_rotation(const RotationState &state, const ArrayConfig &cfg);

    // Phase-only analog beamformer with |w_n| = 1/sqrt(N).
    class Beamformer
    {
    public:
        // Throws ConfigError unless every entry has modulus 1/sqrt(N) to 1e-12 relative.
        explicit Beamformer(Eigen::VectorXcd weights);

        static Beamformer from_phases(const Eigen::Ref<const Eigen::VectorXd> &phases);

        // Keeps only the phase of each entry; zero entries map to phase 0.
        static Beamformer project(const Eigen::Ref<const Eigen::VectorXcd> &v);

        static Beamformer uniform(int n_antennas);

        const Eigen::VectorXcd &weights() const { return w_; }
        int size() const { return static_cast<int>(w_.size()); }
        Eigen::VectorXd phases() const;
        Beamformer conjugate() const;

    private:
        struct unchecked_t
        {
        };
        Beamformer(Eigen::VectorXcd weights, unchecked_t) : w_(std::move(weights)) {}
        Eigen::VectorXcd w_;
    };

    struct Interval
    {
        double alpha = 0.0;
        double beta = 0.0;

        double width() const { return beta - alpha; }
        double center() const { return 0.5 * (alpha + beta); }
        bool is_point() const { return alpha == beta; }
        bool operator==(const Interval &) const = default;
    };

    // Union of disjoint angular intervals within [-pi/2, pi/2], sorted.
    // A point interval (alpha == beta) models a single served direction.
    class CoverageRegion
    {
    public:
        // Throws ConfigError naming "region.intervals[m]" for the first bad interval.
        explicit CoverageRegion(std::vector<Interval> intervals);

        static CoverageRegion single(double alpha, double beta) { return CoverageRegion({{alpha, beta}}); }
        static CoverageRegion direction(double theta) { return CoverageRegion({{theta, theta}}); }
        static CoverageRegion symmetric(double width) { return single(-0.5 * width, 0.5 * width); }

        const std::vector<Interval> &intervals() const { return intervals_; }
        std::size_t size() const { return intervals_.size(); }

        // Mean of the interval centers.
        double center() const;

        // Fewest samples sample_region accepts: 2 per interval, 1 per point interval.
        int min_samples() const;

        bool operator==(const CoverageRegion &) const = default;

    private:
        std::vector<Interval> intervals_;
    };

    struct AngularGrid
    {
        std::vector<double> samples;          // ascending
        std::vector<int> per_interval_counts; // sums to samples.size()

        std::size_t size() const { return samples.size(); }
        bool empty() const { return samples.empty(); }

        // Grid from explicit directions, treated as a single interval.
        static AngularGrid from_samples(std::vector<double> samples);

        bool operator==(const AngularGrid &) const = default;
    };

    struct LinkBudget
    {
        double tx_power = 1.0;
        double ref_gain = 1.0; // |h|^2 at 1 m
        double distance_m = 1.0;
        double pathloss_exp = 2.5;
        double wavelength_m = 0.01;

        void validate() const;
        bool operator==(const LinkBudget &) const = default;
    };

    struct WorstCase
    {
        double gain = 0.0;
        std::size_t index = 0;
    };

    // G(x) = g_max cos^{2p}(x) for |x| <= pi/2, zero otherwise.
    double element_gain(double phi_rel, const ArrayConfig &cfg);

    // sqrt(G(x)), the amplitude pattern.
    double element_amplitude(double phi_rel, const ArrayConfig &cfg);

    // d sqrt(G(theta_e - phi)) / d phi evaluated at phi_rel = theta_e - phi.
    double element_amplitude_rotation_derivative(double phi_rel, const ArrayConfig &cfg);

    // Antenna coordinates in wavelengths, centered at the origin.
    std::vector<Eigen::Vector2d> antenna_positions(double psi, const ArrayConfig &cfg);

    // v_n = exp(-j 2 pi d (n-1) sin(theta - psi)), n = 1..N.
    Eigen::VectorXcd steering_vector(double theta, double psi, const ArrayConfig &cfg);

    // a_n = sqrt(G(theta_e - phi_n)) v_n.
    Eigen::VectorXcd array_response(double theta, const RotationState &state, const ArrayConfig &cfg);

    // N x Q matrix whose q-th column is array_response(samples[q]).
    Eigen::MatrixXcd response_matrix(std::span<const double> samples, const RotationState &state,
                                     const ArrayConfig &cfg);

    // |a^H w|^2.
    double beamforming_gain(double theta, const RotationState &state, const Beamformer &w, const ArrayConfig &cfg);

    // |a_q^H w|^2 for every column of a response matrix.
    Eigen::VectorXd sampled_gains(const Eigen::MatrixXcd &responses, const Eigen::VectorXcd &w);

    // P_t * ref_gain * r^{-2 gamma} * |a^H w|^2. Throws DomainError for r <= 0.
    double received_power(double theta, const RotationState &state, const Beamformer &w, const ArrayConfig &cfg,
                          const LinkBudget &link);

    // Per-interval uniform sampling; counts proportional to width (largest remainder) over a
    // floor of 2 per interval. Throws ConfigError if total_q < region.min_samples().
    AngularGrid sample_region(const CoverageRegion &region, int total_q);

    // Minimum gain over the grid and the first index attaining it. Throws DomainError on an empty grid.
    WorstCase worst_case_gain(const AngularGrid &grid, const RotationState &state, const Beamformer &w,
                              const ArrayConfig &cfg);

    WorstCase worst_case_of(const Eigen::Ref<const Eigen::VectorXd> &gains);
}

#endif
