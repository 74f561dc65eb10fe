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

#include "hr6dma/optimizer.hpp"
#include "hr6dma/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

namespace hr6dma
{
    namespace
    {
        // True when `next` improves on `prev` by more than tol relative to |prev|.
        bool still_improving(double prev, double next, double tol)
        {
            return next - prev > tol * std::abs(prev);
        }

        Eigen::VectorXd clamp_box(Eigen::VectorXd phi, double limit)
        {
            return phi.cwiseMax(-limit).cwiseMin(limit);
        }

        double sampled_worst(const AngularGrid &grid, double psi, const Eigen::VectorXd &phi, const Beamformer &w,
                             const ArrayConfig &cfg)
        {
            const RotationState s{psi, phi};
            return worst_case_of(sampled_gains(response_matrix(grid.samples, s, cfg), w.weights())).gain;
        }

        Eigen::MatrixXcd logdet_gradient(const Eigen::MatrixXcd &W, double eps)
        {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (W + W.adjoint()));
            const Eigen::VectorXd inv = (es.eigenvalues().array().max(0.0) + eps).inverse();
            Eigen::MatrixXcd phi = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
            return 0.5 * (phi + phi.adjoint());
        }
    }

    std::string_view to_string(PenaltyAnchor anchor)
    {
        return anchor == PenaltyAnchor::Relaxation ? "relaxation" : "incumbent";
    }

    std::string_view to_string(PenaltyForm form)
    {
        return form == PenaltyForm::SpectralGap ? "spectral_gap" : "log_det";
    }

    std::string_view to_string(SdrTermination t)
    {
        switch (t)
        {
        case SdrTermination::RankReached:
            return "RankReached";
        case SdrTermination::RankCapHit:
            return "RankCapHit";
        case SdrTermination::ZeroGain:
            return "ZeroGain";
        }
        return "Unknown";
    }

    std::string_view to_string(InnerTermination t)
    {
        return t == InnerTermination::Converged ? "Converged" : "IterCap";
    }

    void AlgoSettings::validate() const
    {
        auto positive = [](double v, const char *field) {
            if (!(v > 0.0))
                throw ConfigError(std::string("algo.") + field + ": must be > 0");
        };
        positive(ao_tol, "ao_tol");
        positive(sca_tol, "sca_tol");
        positive(sdr_tol, "sdr_tol");
        positive(penalty_init, "penalty_init");
        positive(logdet_eps, "logdet_eps");
        positive(rank_delta, "rank_delta");
        if (!(penalty_growth > 1.0))
            throw ConfigError("algo.penalty_growth: must be > 1");
        if (!(rank_delta < 1.0))
            throw ConfigError("algo.rank_delta: must be < 1");
        if (outer_grid_l < 1)
            throw ConfigError("algo.outer_grid_l: must be >= 1");
        if (max_ao_iters < 1 || max_sca_iters < 1 || max_penalty_iters < 1 || max_backtracks < 0)
            throw ConfigError("algo: iteration caps must be >= 1");
        if (threads < 0)
            throw ConfigError("algo.threads: must be >= 0");
    }

    void SdrStats::record(const SdrStep &step)
    {
        ++steps;
        if (step.termination == SdrTermination::RankReached)
        {
            ++rank_reached;
            min_converged_rank_metric = std::min(min_converged_rank_metric, step.rank_metric);
        }
        else if (step.termination == SdrTermination::RankCapHit)
            ++rank_cap_hits;
        if (step.sdp_status != convex::SolveStatus::Optimal)
            ++solver_warnings;
        const double target = 1.0 / std::sqrt(static_cast<double>(step.w.size()));
        for (Eigen::Index n = 0; n < step.w.weights().size(); ++n)
            max_modulus_error = std::max(max_modulus_error, std::abs(std::abs(step.w.weights()(n)) / target - 1.0));
    }

    SdrStats &SdrStats::operator+=(const SdrStats &o)
    {
        steps += o.steps;
        rank_reached += o.rank_reached;
        rank_cap_hits += o.rank_cap_hits;
        solver_warnings += o.solver_warnings;
        min_converged_rank_metric = std::min(min_converged_rank_metric, o.min_converged_rank_metric);
        max_modulus_error = std::max(max_modulus_error, o.max_modulus_error);
        return *this;
    }

    // *=== Initialization ===*

    Eigen::VectorXd init_phi(const CoverageRegion &region, double psi, const ArrayConfig &cfg)
    {
        const double boresight = std::clamp(region.center() - psi, -cfg.phi_max, cfg.phi_max);
        return Eigen::VectorXd::Constant(cfg.n_antennas, boresight);
    }

    Beamformer init_w(const CoverageRegion &region, double psi, const ArrayConfig &cfg)
    {
        const double step = 2.0 * std::numbers::pi * cfg.spacing_wl * std::sin(region.center() - psi);
        Eigen::VectorXd phases(cfg.n_antennas);
        for (int n = 0; n < cfg.n_antennas; ++n)
            phases(n) = -step * n;
        return Beamformer::from_phases(phases);
    }

    // *=== Rotation update ===*

    void sampled_gains_and_gradients(const AngularGrid &grid, double psi, const Eigen::VectorXd &phi,
                                     const Beamformer &w, const ArrayConfig &cfg, Eigen::VectorXd &gains,
                                     Eigen::MatrixXd &gradients)
    {
        const int N = cfg.n_antennas;
        const auto Q = static_cast<Eigen::Index>(grid.size());
        const Eigen::VectorXcd &wv = w.weights();
        gains.resize(Q);
        gradients.resize(N, Q);
        Eigen::VectorXcd v(N);
        Eigen::VectorXd amp(N), der(N);
        for (Eigen::Index q = 0; q < Q; ++q)
        {
            const double theta_e = grid.samples[static_cast<std::size_t>(q)] - psi;
            const double phase_step = 2.0 * std::numbers::pi * cfg.spacing_wl * std::sin(theta_e);
            cdouble s = 0.0;
            for (int n = 0; n < N; ++n)
            {
                v(n) = std::polar(1.0, -phase_step * n);
                const double inc = theta_e - phi(n);
                amp(n) = element_amplitude(inc, cfg);
                der(n) = element_amplitude_rotation_derivative(inc, cfg);
                s += std::conj(amp(n) * v(n)) * wv(n);
            }
            gains(q) = std::norm(s);
            for (int n = 0; n < N; ++n)
                gradients(n, q) = 2.0 * (std::conj(s) * std::conj(v(n)) * der(n) * wv(n)).real();
        }
    }

    Eigen::VectorXd sca_gradient(double theta_q, double psi, const Eigen::VectorXd &phi, const Beamformer &w,
                                 const ArrayConfig &cfg)
    {
        Eigen::VectorXd gains;
        Eigen::MatrixXd grads;
        sampled_gains_and_gradients(AngularGrid::from_samples({theta_q}), psi, phi, w, cfg, gains, grads);
        return grads.col(0);
    }

    ScaStep sca_phi_step(const AngularGrid &grid, double psi, const Eigen::VectorXd &phi, const Beamformer &w,
                         const ArrayConfig &cfg, const AlgoSettings &settings)
    {
        const int N = cfg.n_antennas;
        Eigen::VectorXd gains;
        Eigen::MatrixXd grads;
        sampled_gains_and_gradients(grid, psi, phi, w, cfg, gains, grads);
        const double current = worst_case_of(gains).gain;

        // Variables [phi_1..phi_N, tau]; maximize tau under the linearized gain rows.
        convex::LpProblem lp(N + 1);
        lp.objective(N) = 1.0;
        lp.lower.head(N).setConstant(-cfg.phi_max);
        lp.upper.head(N).setConstant(cfg.phi_max);
        const auto Q = gains.size();
        lp.rows.resize(Q, N + 1);
        lp.rhs.resize(Q);
        for (Eigen::Index q = 0; q < Q; ++q)
        {
            lp.rows.row(q).head(N) = -grads.col(q).transpose();
            lp.rows(q, N) = 1.0;
            lp.rhs(q) = gains(q) - grads.col(q).dot(phi);
        }
        const auto sol = solve_lp(lp, {1e-9, 1e-9, 50 * static_cast<int>(Q + 2 * N + 10)});
        if (sol.status == convex::SolveStatus::Infeasible || sol.status == convex::SolveStatus::Unbounded)
            throw InternalError("sca_phi_step: linearized program reported " + std::string(convex::to_string(sol.status)));

        ScaStep out{phi, current, current, 0.0};
        if (sol.status != convex::SolveStatus::Optimal)
            return out;
        out.lp_tau = sol.x(N);

        const Eigen::VectorXd direction = clamp_box(sol.x.head(N), cfg.phi_max) - phi;
        double t = 1.0;
        for (int k = 0; k <= settings.max_backtracks; ++k, t *= 0.5)
        {
            Eigen::VectorXd trial = clamp_box(phi + t * direction, cfg.phi_max);
            const double value = sampled_worst(grid, psi, trial, w, cfg);
            if (value > current)
            {
                out.phi = std::move(trial);
                out.tau = value;
                out.step = t;
                return out;
            }
        }
        return out;
    }

    // *=== Beamformer update ===*

    SdrStep sdr_w_step(const AngularGrid &grid, double psi, const Eigen::VectorXd &phi, const ArrayConfig &cfg,
                       const AlgoSettings &settings, const std::optional<Beamformer> &incumbent)
    {
        const int N = cfg.n_antennas;
        const RotationState state{psi, phi};
        const Eigen::MatrixXcd A = response_matrix(grid.samples, state, cfg);

        SdrStep out{incumbent.value_or(Beamformer::uniform(N)), 0.0, 0.0, 1.0, 0,
                    SdrTermination::ZeroGain, convex::SolveStatus::Optimal};
        const Eigen::VectorXd col_norms = A.colwise().squaredNorm().transpose();
        if (col_norms.size() == 0 || col_norms.minCoeff() == 0.0)
        {
            // Some sampled direction sees no element gain: every beamformer scores zero.
            out.tau = sampled_gains(A, out.w.weights()).minCoeff();
            return out;
        }

        convex::SdpProblem sdp;
        sdp.dim = N;
        sdp.gain_vectors = A;
        sdp.diag_value = 1.0 / N;
        const convex::SolverTolerances tol{1e-7, settings.sdr_tol, 200};

        auto note = [&](const convex::SdpSolution &sol) {
            ++out.penalty_iters;
            if (sol.status != convex::SolveStatus::Optimal)
                out.sdp_status = sol.status;
        };

        auto rank_ok = [&](const Eigen::MatrixXcd &M) { return convex::rank_one_ratio(M) >= 1.0 - settings.rank_delta; };

        const auto relaxation = convex::solve_sdp(sdp, tol);
        note(relaxation);
        sdp.seed_rows = relaxation.active_rows;
        Eigen::MatrixXcd W = relaxation.W;
        double relaxed = relaxation.tau;
        bool done = rank_ok(W);
        if (!done && settings.anchor == PenaltyAnchor::Incumbent && incumbent)
            W = incumbent->weights() * incumbent->weights().adjoint();

        double eta = settings.penalty_init * std::max(relaxation.tau, std::numeric_limits<double>::min());
        for (int j = 0; !done && j < settings.max_penalty_iters; ++j)
        {
            if (settings.penalty == PenaltyForm::SpectralGap)
            {
                // Tr(W) is fixed by the diagonal, so only the -lambda_max part steers the solve.
                const Eigen::VectorXcd u = convex::principal_eigpair(W).vector;
                sdp.objective = eta * (u * u.adjoint());
            }
            else
                sdp.objective = -eta * logdet_gradient(W, settings.logdet_eps);
            const auto sol = convex::solve_sdp(sdp, tol);
            note(sol);
            sdp.seed_rows = sol.active_rows;
            W = sol.W;
            relaxed = sol.tau;
            eta *= settings.penalty_growth;
            done = rank_ok(W);
        }

        out.rank_metric = convex::rank_one_ratio(W);
        out.termination = out.rank_metric >= 1.0 - settings.rank_delta ? SdrTermination::RankReached
                                                                      : SdrTermination::RankCapHit;
        out.relaxed_tau = relaxed;
        out.w = Beamformer::project(convex::principal_eigpair(W).vector);
        out.tau = sampled_gains(A, out.w.weights()).minCoeff();
        if (settings.phase_refine)
        {
            if (incumbent)
            {
                const double inc_tau = sampled_gains(A, incumbent->weights()).minCoeff();
                if (inc_tau > out.tau)
                {
                    out.w = *incumbent;
                    out.tau = inc_tau;
                }
            }
            PhaseRefinement refined = refine_phases(A, out.w, settings);
            out.w = std::move(refined.w);
            out.tau = refined.tau;
        }
        return out;
    }

    PhaseRefinement refine_phases(const Eigen::MatrixXcd &A, const Beamformer &w0, const AlgoSettings &settings)
    {
        const auto N = A.rows();
        const auto Q = A.cols();
        PhaseRefinement out{w0, sampled_gains(A, w0.weights()).minCoeff(), 0};
        if (N < 2 || Q == 0)
            return out;

        double radius = 0.5;
        Eigen::VectorXd chi = out.w.phases();
        for (int it = 0; it < settings.max_sca_iters && radius > 1e-6; ++it)
        {
            ++out.iterations;
            const Eigen::VectorXcd &w = out.w.weights();
            const Eigen::VectorXcd s = A.adjoint() * w;

            // d|s_q|^2 / d chi_n = -2 Im(conj(s_q) conj(A_nq) w_n)
            convex::LpProblem lp(static_cast<int>(N) + 1);
            lp.objective(N) = 1.0;
            lp.lower.head(N).setConstant(-radius);
            lp.upper.head(N).setConstant(radius);
            lp.lower(0) = lp.upper(0) = 0.0;
            lp.rows.resize(Q, N + 1);
            lp.rhs.resize(Q);
            for (Eigen::Index q = 0; q < Q; ++q)
            {
                for (Eigen::Index n = 0; n < N; ++n)
                    lp.rows(q, n) = 2.0 * (std::conj(s(q)) * std::conj(A(n, q)) * w(n)).imag();
                lp.rows(q, N) = 1.0;
                lp.rhs(q) = std::norm(s(q));
            }
            const auto sol = solve_lp(lp, {1e-9, 1e-9, 50 * static_cast<int>(Q + 2 * N + 10)});
            if (sol.status != convex::SolveStatus::Optimal)
                break;

            const Eigen::VectorXd delta = sol.x.head(N);
            bool accepted = false;
            double t = 1.0;
            for (int k = 0; k <= settings.max_backtracks; ++k, t *= 0.5)
            {
                Beamformer trial = Beamformer::from_phases(chi + t * delta);
                const double value = sampled_gains(A, trial.weights()).minCoeff();
                if (value > out.tau)
                {
                    const double prev = out.tau;
                    chi += t * delta;
                    out.w = std::move(trial);
                    out.tau = value;
                    accepted = true;
                    if (!still_improving(prev, value, settings.sca_tol))
                        return out;
                    break;
                }
            }
            if (!accepted)
                radius *= 0.25;
            else if (t < 1.0)
                radius *= 0.5;
        }
        return out;
    }

    // *=== Alternating optimization ===*

    InnerSolution solve_inner(const CoverageRegion &region, const AngularGrid &grid, double psi,
                              const ArrayConfig &cfg, const AlgoSettings &settings,
                              const std::optional<InnerStart> &start)
    {
        if (grid.empty())
            throw DomainError("solve_inner: empty grid");
        InnerSolution sol{start ? start->phi : init_phi(region, psi, cfg),
                          start ? start->w : init_w(region, psi, cfg),
                          0.0,
                          {},
                          {},
                          InnerTermination::IterCap,
                          {}};
        check_rotation({psi, sol.phi}, cfg);
        double worst = sampled_worst(grid, psi, sol.phi, sol.w, cfg);
        sol.trace.push_back(worst);

        for (int ao = 0; ao < settings.max_ao_iters; ++ao)
        {
            ++sol.iters.ao;
            const double before = worst;

            for (int i = 0; i < settings.max_sca_iters; ++i)
            {
                ++sol.iters.sca;
                ScaStep step = sca_phi_step(grid, psi, sol.phi, sol.w, cfg, settings);
                const double prev = worst;
                sol.phi = std::move(step.phi);
                worst = step.tau;
                if (!still_improving(prev, worst, settings.sca_tol))
                    break;
            }
            sol.trace.push_back(worst);

            SdrStep sdr = sdr_w_step(grid, psi, sol.phi, cfg, settings, sol.w);
            sol.iters.sdr += sdr.penalty_iters;
            sol.sdr.record(sdr);
            if (sdr.tau >= worst)
            {
                sol.w = sdr.w;
                worst = sdr.tau;
            }
            sol.trace.push_back(worst);

            if (!still_improving(before, worst, settings.ao_tol))
            {
                sol.termination = InnerTermination::Converged;
                break;
            }
        }
        sol.worst_gain = worst_case_gain(grid, {psi, sol.phi}, sol.w, cfg).gain;
        return sol;
    }

    // *=== Array rotation search ===*

    std::vector<double> psi_grid(double psi_max, int points)
    {
        if (points < 1)
            throw ConfigError("algo.outer_grid_l: must be >= 1");
        if (points == 1 || psi_max == 0.0)
            return {0.0};
        std::vector<double> grid(static_cast<std::size_t>(points));
        const double step = 2.0 * psi_max / (points - 1);
        for (int l = 0; l < points; ++l)
            grid[static_cast<std::size_t>(l)] = -psi_max + l * step;
        grid.back() = psi_max;
        return grid;
    }

    int resolve_threads(int requested)
    {
        if (requested > 0)
            return requested;
        return std::max(1u, std::thread::hardware_concurrency());
    }

    SolveReport assemble_report(const std::vector<double> &psis, std::vector<InnerSolution> solutions,
                                const AlgoSettings &settings)
    {
        std::size_t best = 0;
        for (std::size_t k = 1; k < solutions.size(); ++k)
            if (solutions[k].worst_gain > solutions[best].worst_gain)
                best = k;
        SolveReport report{psis[best], solutions[best], {}, 0.0, settings, {}, {}, false};
        for (std::size_t k = 0; k < solutions.size(); ++k)
        {
            report.per_psi_curve.push_back({psis[k], solutions[k].worst_gain});
            report.total_iters += solutions[k].iters;
            report.sdr += solutions[k].sdr;
        }
        return report;
    }

    SolveReport solve_outer(const CoverageRegion &region, const AngularGrid &grid, const ArrayConfig &cfg,
                            const AlgoSettings &settings)
    {
        const auto t0 = std::chrono::steady_clock::now();
        const std::vector<double> psis = psi_grid(cfg.psi_max, settings.outer_grid_l);
        auto solutions = parallel_map<InnerSolution>(psis.size(), settings.threads, [&](std::size_t k) {
            return solve_inner(region, grid, psis[k], cfg, settings);
        });
        SolveReport report = assemble_report(psis, std::move(solutions), settings);
        report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return report;
    }
}
