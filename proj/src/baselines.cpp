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

#include "hr6dma/baselines.hpp"
#include "hr6dma/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

namespace hr6dma
{
    namespace
    {
        using Clock = std::chrono::steady_clock;

        double seconds_since(Clock::time_point t0)
        {
            return std::chrono::duration<double>(Clock::now() - t0).count();
        }

        template <typename Fn>
        SolveReport over_psi(const std::vector<double> &psis, const AlgoSettings &settings, Fn &&fn)
        {
            const auto t0 = Clock::now();
            auto sols = parallel_map<InnerSolution>(psis.size(), settings.threads,
                                                    [&](std::size_t k) { return fn(psis[k]); });
            SolveReport report = assemble_report(psis, std::move(sols), settings);
            report.wall_time_s = seconds_since(t0);
            return report;
        }

        // Moves the optimum of `target` to `candidate` at psi if it is strictly better.
        bool absorb(SolveReport &target, double psi, InnerSolution candidate)
        {
            target.total_iters += candidate.iters;
            target.sdr += candidate.sdr;
            if (!(candidate.worst_gain > target.inner.worst_gain))
                return false;
            auto it = std::find_if(target.per_psi_curve.begin(), target.per_psi_curve.end(),
                                   [&](const PsiPoint &p) { return p.psi >= psi; });
            if (it != target.per_psi_curve.end() && it->psi == psi)
                it->worst_gain = std::max(it->worst_gain, candidate.worst_gain);
            else
                target.per_psi_curve.insert(it, {psi, candidate.worst_gain});
            target.psi_star = psi;
            target.inner = std::move(candidate);
            target.warm_started = true;
            return true;
        }

        // Re-runs the alternating loop of `target`'s scheme from `source`'s solution when source is ahead.
        void dominate(SolveReport &target, const SolveReport &source, const CoverageRegion &region,
                      const AngularGrid &grid, const ArrayConfig &cfg, const AlgoSettings &settings)
        {
            if (!(target.inner.worst_gain < source.inner.worst_gain))
                return;
            const auto t0 = Clock::now();
            InnerSolution refined = solve_inner(region, grid, source.psi_star, cfg, settings,
                                                InnerStart{source.inner.phi, source.inner.w});
            absorb(target, source.psi_star, std::move(refined));
            target.wall_time_s += seconds_since(t0);
        }

        InnerSolution ars_inner(const CoverageRegion &region, const AngularGrid &grid, double psi,
                                const ArrayConfig &cfg, const AlgoSettings &settings)
        {
            const int N = cfg.n_antennas;
            const auto Q = static_cast<Eigen::Index>(grid.size());
            const std::vector<double> lattice = ars_lattice(cfg.phi_max);
            const auto K = static_cast<Eigen::Index>(lattice.size());

            // Element amplitude of lattice point k toward sample q; the same for every antenna.
            Eigen::MatrixXd amp(K, Q);
            Eigen::MatrixXcd conj_v(N, Q);
            for (Eigen::Index q = 0; q < Q; ++q)
            {
                const double theta_e = grid.samples[static_cast<std::size_t>(q)] - psi;
                for (Eigen::Index k = 0; k < K; ++k)
                    amp(k, q) = element_amplitude(theta_e - lattice[static_cast<std::size_t>(k)], cfg);
                const double step = 2.0 * std::numbers::pi * cfg.spacing_wl * std::sin(theta_e);
                for (int n = 0; n < N; ++n)
                    conj_v(n, q) = std::polar(1.0, step * n);
            }

            std::vector<Eigen::Index> idx(static_cast<std::size_t>(N));
            const double start = init_phi(region, psi, cfg)(0);
            const auto nearest = std::min_element(lattice.begin(), lattice.end(), [&](double a, double b) {
                return std::abs(a - start) < std::abs(b - start);
            });
            std::fill(idx.begin(), idx.end(), nearest - lattice.begin());

            auto phi_of = [&] {
                Eigen::VectorXd phi(N);
                for (int n = 0; n < N; ++n)
                    phi(n) = lattice[static_cast<std::size_t>(idx[static_cast<std::size_t>(n)])];
                return phi;
            };

            InnerSolution sol{phi_of(), init_w(region, psi, cfg), 0.0, {}, {}, InnerTermination::IterCap, {}};
            double worst = worst_case_gain(grid, {psi, sol.phi}, sol.w, cfg).gain;
            sol.trace.push_back(worst);

            Eigen::VectorXcd s(Q), base(Q), contrib(Q);
            for (int sweep = 0; sweep < settings.max_ao_iters; ++sweep)
            {
                ++sol.iters.ao;
                const double before = worst;
                const Eigen::VectorXcd &w = sol.w.weights();
                for (Eigen::Index q = 0; q < Q; ++q)
                {
                    s(q) = 0.0;
                    for (int n = 0; n < N; ++n)
                        s(q) += amp(idx[static_cast<std::size_t>(n)], q) * conj_v(n, q) * w(n);
                }
                for (int n = 0; n < N; ++n)
                {
                    const Eigen::Index cur = idx[static_cast<std::size_t>(n)];
                    for (Eigen::Index q = 0; q < Q; ++q)
                    {
                        contrib(q) = conj_v(n, q) * w(n);
                        base(q) = s(q) - amp(cur, q) * contrib(q);
                    }
                    Eigen::Index best = cur;
                    double best_val = -1.0;
                    for (Eigen::Index k = 0; k < K; ++k)
                    {
                        double val = std::numeric_limits<double>::infinity();
                        for (Eigen::Index q = 0; q < Q && val > best_val; ++q)
                            val = std::min(val, std::norm(base(q) + amp(k, q) * contrib(q)));
                        if (val > best_val)
                        {
                            best_val = val;
                            best = k;
                        }
                    }
                    idx[static_cast<std::size_t>(n)] = best;
                    for (Eigen::Index q = 0; q < Q; ++q)
                        s(q) = base(q) + amp(best, q) * contrib(q);
                }
                sol.phi = phi_of();
                worst = std::max(worst, worst_case_gain(grid, {psi, sol.phi}, sol.w, cfg).gain);
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
                if (!(worst - before > settings.ao_tol * std::abs(before)))
                {
                    sol.termination = InnerTermination::Converged;
                    break;
                }
            }
            sol.worst_gain = worst_case_gain(grid, {psi, sol.phi}, sol.w, cfg).gain;
            return sol;
        }
    }

    std::string_view to_string(SchemeId id)
    {
        switch (id)
        {
        case SchemeId::HR6DMA:
            return "HR6DMA";
        case SchemeId::AntennaRA:
            return "AntennaRA";
        case SchemeId::ArrayRA:
            return "ArrayRA";
        case SchemeId::NRA:
            return "NRA";
        case SchemeId::ARS:
            return "ARS";
        case SchemeId::CSAR:
            return "CSAR";
        }
        return "Unknown";
    }

    std::optional<SchemeId> scheme_from_string(std::string_view name)
    {
        for (SchemeId id : all_schemes)
            if (to_string(id) == name)
                return id;
        return std::nullopt;
    }

    std::vector<double> ars_lattice(double phi_max)
    {
        const double deg = std::numbers::pi / 180.0;
        const int steps = std::max(0, static_cast<int>(std::ceil(2.0 * phi_max / deg - 1e-9)));
        if (steps == 0)
            return {0.0};
        std::vector<double> out(static_cast<std::size_t>(steps) + 1);
        for (int k = 0; k <= steps; ++k)
            out[static_cast<std::size_t>(k)] = -phi_max + 2.0 * phi_max * k / steps;
        out.back() = phi_max;
        return out;
    }

    InnerSolution solve_fixed_rotation(const CoverageRegion &region, const AngularGrid &grid, double psi,
                                       const Eigen::VectorXd &phi, const ArrayConfig &cfg,
                                       const AlgoSettings &settings)
    {
        check_rotation({psi, phi}, cfg);
        InnerSolution sol{phi, init_w(region, psi, cfg), 0.0, {}, {}, InnerTermination::Converged, {}};
        double worst = worst_case_gain(grid, {psi, phi}, sol.w, cfg).gain;
        sol.trace.push_back(worst);
        SdrStep sdr = sdr_w_step(grid, psi, phi, cfg, settings, sol.w);
        sol.iters.ao = 1;
        sol.iters.sdr = sdr.penalty_iters;
        sol.sdr.record(sdr);
        if (sdr.tau >= worst)
        {
            sol.w = sdr.w;
            worst = sdr.tau;
        }
        sol.trace.push_back(worst);
        sol.worst_gain = worst_case_gain(grid, {psi, phi}, sol.w, cfg).gain;
        return sol;
    }

    SolveReport solve_nra(const CoverageRegion &region, const AngularGrid &grid, const ArrayConfig &cfg,
                          const AlgoSettings &settings)
    {
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(cfg.n_antennas);
        return over_psi({0.0}, settings,
                        [&](double psi) { return solve_fixed_rotation(region, grid, psi, zero, cfg, settings); });
    }

    SolveReport solve_array_ra(const CoverageRegion &region, const AngularGrid &grid, const ArrayConfig &cfg,
                               const AlgoSettings &settings)
    {
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(cfg.n_antennas);
        return over_psi(psi_grid(cfg.psi_max, settings.outer_grid_l), settings,
                        [&](double psi) { return solve_fixed_rotation(region, grid, psi, zero, cfg, settings); });
    }

    SolveReport solve_antenna_ra(const CoverageRegion &region, const AngularGrid &grid, const ArrayConfig &cfg,
                                 const AlgoSettings &settings)
    {
        return over_psi({0.0}, settings,
                        [&](double psi) { return solve_inner(region, grid, psi, cfg, settings); });
    }

    SolveReport solve_ars(const CoverageRegion &region, const AngularGrid &grid, const ArrayConfig &cfg,
                          const AlgoSettings &settings)
    {
        return over_psi(psi_grid(cfg.psi_max, settings.outer_grid_l), settings,
                        [&](double psi) { return ars_inner(region, grid, psi, cfg, settings); });
    }

    SolveReport solve_csar(const CoverageRegion &region, const AngularGrid &grid, const ArrayConfig &cfg,
                           const AlgoSettings &settings)
    {
        return over_psi(psi_grid(cfg.psi_max, settings.outer_grid_l), settings, [&](double psi) {
            return solve_fixed_rotation(region, grid, psi, init_phi(region, psi, cfg), cfg, settings);
        });
    }

    SolveReport solve_hr6dma(const CoverageRegion &region, const AngularGrid &grid, const ArrayConfig &cfg,
                             const AlgoSettings &settings)
    {
        return solve_outer(region, grid, cfg, settings);
    }

    SolveReport solve_scheme(SchemeId id, const CoverageRegion &region, const AngularGrid &grid,
                             const ArrayConfig &cfg, const AlgoSettings &settings)
    {
        switch (id)
        {
        case SchemeId::HR6DMA:
            return solve_hr6dma(region, grid, cfg, settings);
        case SchemeId::AntennaRA:
            return solve_antenna_ra(region, grid, cfg, settings);
        case SchemeId::ArrayRA:
            return solve_array_ra(region, grid, cfg, settings);
        case SchemeId::NRA:
            return solve_nra(region, grid, cfg, settings);
        case SchemeId::ARS:
            return solve_ars(region, grid, cfg, settings);
        case SchemeId::CSAR:
            return solve_csar(region, grid, cfg, settings);
        }
        throw InternalError("solve_scheme: unknown scheme");
    }

    std::vector<SchemeResult> compare_all(const CoverageRegion &region, const AngularGrid &grid,
                                          const ArrayConfig &cfg, const AlgoSettings &settings,
                                          const std::vector<SchemeId> &schemes)
    {
        auto wanted = [&](SchemeId id) { return std::find(schemes.begin(), schemes.end(), id) != schemes.end(); };
        std::optional<SolveReport> nra, array, antenna, ars, csar, hr;

        if (wanted(SchemeId::NRA))
            nra = solve_nra(region, grid, cfg, settings);
        if (wanted(SchemeId::ArrayRA))
        {
            array = solve_array_ra(region, grid, cfg, settings);
            if (nra && array->inner.worst_gain < nra->inner.worst_gain)
                absorb(*array, nra->psi_star, nra->inner);
        }
        if (wanted(SchemeId::AntennaRA))
        {
            antenna = solve_antenna_ra(region, grid, cfg, settings);
            if (nra)
                dominate(*antenna, *nra, region, grid, cfg, settings);
        }
        if (wanted(SchemeId::ARS))
            ars = solve_ars(region, grid, cfg, settings);
        if (wanted(SchemeId::CSAR))
            csar = solve_csar(region, grid, cfg, settings);
        if (wanted(SchemeId::HR6DMA))
        {
            hr = solve_hr6dma(region, grid, cfg, settings);
            for (const auto *restricted : {&antenna, &array, &ars, &csar, &nra})
                if (*restricted)
                    dominate(*hr, **restricted, region, grid, cfg, settings);
        }

        std::vector<SchemeResult> out;
        auto emit = [&](SchemeId id, std::optional<SolveReport> &r) {
            if (r)
                out.push_back({id, std::move(*r)});
        };
        emit(SchemeId::HR6DMA, hr);
        emit(SchemeId::AntennaRA, antenna);
        emit(SchemeId::ArrayRA, array);
        emit(SchemeId::NRA, nra);
        emit(SchemeId::ARS, ars);
        emit(SchemeId::CSAR, csar);
        return out;
    }
}
