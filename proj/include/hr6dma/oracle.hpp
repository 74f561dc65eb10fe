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

#ifndef HR6DMA_ORACLE_HPP
#define HR6DMA_ORACLE_HPP

#include "hr6dma/model.hpp"

#include <cstdint>

namespace hr6dma::oracle
{
    struct BruteForceSpec
    {
        int n_antennas = 2; // at most 3
        int phase_grid_points = 64;
        int phi_grid_points = 64;
        int psi_grid_points = 64;
        AngularGrid grid;
        int threads = 1;

        // Configurations visited: phase^(N-1) * phi^N * psi.
        double configuration_count() const;
        // Throws ConfigError on bad sizes or when the count exceeds max_configurations.
        void validate() const;
    };

    inline constexpr double max_configurations = 1e8;

    struct LatticeSpacing
    {
        double phase = 0.0;
        double phi = 0.0;
        double psi = 0.0;
    };

    struct BruteForceResult
    {
        double worst_gain = 0.0;
        RotationState state;
        Beamformer w;
        LatticeSpacing spacing;
        std::uint64_t evaluated = 0;
    };

    // Grid of `points` values spanning [-limit, limit] with both ends; {0} for one point or limit = 0.
    std::vector<double> symmetric_lattice(double limit, int points);

    // Exhaustive max-min over w phases (first antenna at phase 0), per-antenna and array rotations.
    // Ties keep the earliest configuration in psi, phi, phase order. cfg.n_antennas is overridden.
    BruteForceResult brute_force_maxmin(const BruteForceSpec &spec, const ArrayConfig &cfg);

    struct GradientCheck
    {
        double max_rel_error = 0.0; // |fd - analytic|_inf / max(|analytic|_inf, 1e-3)
        double max_abs_error = 0.0;
        int trials = 0;
    };

    // Random feasible (theta, psi, phi, w) with every incidence at least 0.01 rad inside the support edge;
    // compares sca_gradient against central differences with step 1e-6.
    GradientCheck fd_gradient_check(std::uint64_t seed, int trials, const ArrayConfig &cfg = {});

    // Central-difference gradient of |a^H(theta) w|^2 with respect to phi, using direct_gain_oracle.
    Eigen::VectorXd fd_gradient(double theta, const RotationState &state, const Beamformer &w,
                                const ArrayConfig &cfg, double step = 1e-6);

    // Scalar-loop |sum_n conj(v_n) sqrt(G_n) w_n|^2.
    double direct_gain_oracle(double theta, const RotationState &state, const Beamformer &w, const ArrayConfig &cfg);
}

#endif
