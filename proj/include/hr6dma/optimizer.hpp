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

#ifndef HR6DMA_OPTIMIZER_HPP
#define HR6DMA_OPTIMIZER_HPP

#include "hr6dma/convex.hpp"
#include "hr6dma/model.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace hr6dma
{
    // Where the first log-det linearization point of the penalty loop comes from.
    enum class PenaltyAnchor
    {
        Relaxation, // solve the plain relaxation first, then reweight around it
        Incumbent,  // W0 = w w^H of the current beamformer
    };

    std::string_view to_string(PenaltyAnchor anchor);

    // Rank-one promoting penalty, linearized at the previous iterate.
    enum class PenaltyForm
    {
        SpectralGap, // Tr(W) - lambda_max(W), gradient I - u u^H
        LogDet,      // ln det(W + zeta I), gradient (W + zeta I)^-1
    };

    std::string_view to_string(PenaltyForm form);

    struct AlgoSettings
    {
        double ao_tol = 1e-5;  // relative improvement that ends the alternating loop
        double sca_tol = 1e-4; // relative improvement that ends the rotation SCA loop
        double sdr_tol = 1e-4; // relative duality gap of the penalized SDP solves
        double penalty_init = 1e-3; // relative to the relaxed optimum of each beamformer step
        double penalty_growth = 1.2;
        double rank_delta = 1e-4;
        double logdet_eps = 1e-6;
        int outer_grid_l = 100;
        int max_ao_iters = 30;
        int max_sca_iters = 50;
        int max_penalty_iters = 50;
        int max_backtracks = 20;
        PenaltyAnchor anchor = PenaltyAnchor::Relaxation;
        PenaltyForm penalty = PenaltyForm::SpectralGap;
        bool phase_refine = true; // local max-min ascent on the phases of the recovered beamformer
        int threads = 1; // outer-loop workers, 0 = hardware concurrency

        void validate() const;
        bool operator==(const AlgoSettings &) const = default;
    };

    enum class SdrTermination
    {
        RankReached,
        RankCapHit,
        ZeroGain,
    };

    enum class InnerTermination
    {
        Converged,
        IterCap,
    };

    std::string_view to_string(SdrTermination t);
    std::string_view to_string(InnerTermination t);

    struct ScaStep
    {
        Eigen::VectorXd phi;
        double tau = 0.0;    // true sampled worst-case gain at phi
        double lp_tau = 0.0; // optimum of the linearized program
        double step = 0.0;   // accepted fraction of the LP move (0 if rejected)
    };

    struct SdrStep
    {
        Beamformer w;
        double tau = 0.0; // true worst-case gain of the recovered w
        double relaxed_tau = 0.0;
        double rank_metric = 0.0;
        int penalty_iters = 0; // SDP solves in this step
        SdrTermination termination = SdrTermination::RankReached;
        convex::SolveStatus sdp_status = convex::SolveStatus::Optimal;
    };

    struct IterationCounts
    {
        int ao = 0;
        int sca = 0;
        int sdr = 0; // SDP solves

        IterationCounts &operator+=(const IterationCounts &o)
        {
            ao += o.ao;
            sca += o.sca;
            sdr += o.sdr;
            return *this;
        }
    };

    // Outcomes of every beamformer step taken during a solve.
    struct SdrStats
    {
        int steps = 0;
        int rank_reached = 0;
        int rank_cap_hits = 0;
        int solver_warnings = 0; // SDP solves that ended without Optimal
        double min_converged_rank_metric = 1.0;
        double max_modulus_error = 0.0; // max | |w_n| sqrt(N) - 1 | over recovered w

        void record(const SdrStep &step);
        SdrStats &operator+=(const SdrStats &o);
    };

    struct InnerSolution
    {
        Eigen::VectorXd phi;
        Beamformer w;
        double worst_gain = 0.0;
        std::vector<double> trace; // non-decreasing
        IterationCounts iters;
        InnerTermination termination = InnerTermination::Converged;
        SdrStats sdr;
    };

    struct PsiPoint
    {
        double psi = 0.0;
        double worst_gain = 0.0;
    };

    struct SolveReport
    {
        double psi_star = 0.0;
        InnerSolution inner;
        std::vector<PsiPoint> per_psi_curve;
        double wall_time_s = 0.0;
        AlgoSettings settings;
        IterationCounts total_iters; // across every psi
        SdrStats sdr;                // across every psi
        bool warm_started = false;   // adopted a restricted scheme's solution

        RotationState state() const { return {psi_star, inner.phi}; }
    };

    // Starting point for the alternating loop.
    struct InnerStart
    {
        Eigen::VectorXd phi;
        Beamformer w;
    };

    // Boresights toward the mean interval center, clamped to the rotation box.
    Eigen::VectorXd init_phi(const CoverageRegion &region, double psi, const ArrayConfig &cfg);

    // Steering vector toward the region center in the rotated frame, scaled to unit-modulus entries.
    Beamformer init_w(const CoverageRegion &region, double psi, const ArrayConfig &cfg);

    // Gradient of |a^H(theta_q) w|^2 with respect to the per-antenna rotations.
    Eigen::VectorXd sca_gradient(double theta_q, double psi, const Eigen::VectorXd &phi, const Beamformer &w,
                                 const ArrayConfig &cfg);

    // All sampled gains and their rotation gradients (N x Q) at phi.
    void sampled_gains_and_gradients(const AngularGrid &grid, double psi, const Eigen::VectorXd &phi,
                                     const Beamformer &w, const ArrayConfig &cfg, Eigen::VectorXd &gains,
                                     Eigen::MatrixXd &gradients);

    // One linearized max-min step on phi followed by backtracking on the true objective.
    ScaStep sca_phi_step(const AngularGrid &grid, double psi, const Eigen::VectorXd &phi, const Beamformer &w,
                         const ArrayConfig &cfg, const AlgoSettings &settings);

    // Penalized relaxation for the beamformer at fixed rotations, then phase recovery.
    SdrStep sdr_w_step(const AngularGrid &grid, double psi, const Eigen::VectorXd &phi, const ArrayConfig &cfg,
                       const AlgoSettings &settings, const std::optional<Beamformer> &incumbent = std::nullopt);

    struct PhaseRefinement
    {
        Beamformer w;
        double tau = 0.0; // sampled worst-case gain of w
        int iterations = 0;
    };

    // Trust-region linearized max-min ascent over the phases of w (first phase held fixed).
    // Never returns a worse beamformer than the input.
    PhaseRefinement refine_phases(const Eigen::MatrixXcd &responses, const Beamformer &w, const AlgoSettings &settings);

    // Alternating rotation / beamformer optimization at fixed array rotation.
    InnerSolution solve_inner(const CoverageRegion &region, const AngularGrid &grid, double psi,
                              const ArrayConfig &cfg, const AlgoSettings &settings,
                              const std::optional<InnerStart> &start = std::nullopt);

    // psi_l = -psi_max + l * 2 psi_max / (L - 1); a single 0 for L = 1 or psi_max = 0.
    std::vector<double> psi_grid(double psi_max, int points);

    // Exhaustive search over the psi grid, each point solved by solve_inner.
    SolveReport solve_outer(const CoverageRegion &region, const AngularGrid &grid, const ArrayConfig &cfg,
                            const AlgoSettings &settings);

    // Evaluates fn(k) for k in [0, count) on up to `threads` workers; results land by index.
    template <typename Result, typename Fn>
    std::vector<Result> parallel_map(std::size_t count, int threads, Fn &&fn);

    int resolve_threads(int requested);

    // Picks the best point (smallest psi on ties) and folds iteration/SDR totals into a report.
    SolveReport assemble_report(const std::vector<double> &psis, std::vector<InnerSolution> solutions,
                                const AlgoSettings &settings);
}

#include "hr6dma/detail/parallel.hpp"

#endif
