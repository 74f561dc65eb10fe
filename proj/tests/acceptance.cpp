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

// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.

#include "hr6dma/baselines.hpp"
#include "hr6dma/convex.hpp"
#include "hr6dma/oracle.hpp"
#include "hr6dma/optimizer.hpp"

#include "kernel_oracles.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace hr6dma;

namespace
{
    constexpr double pi = std::numbers::pi;

    namespace tol
    {
        constexpr double fd_rel = 1e-5;
        constexpr double fd_seconds = 10.0;
        constexpr double matched_fraction = 0.99;
        constexpr double matched_seconds = 120.0;
        constexpr double oracle_rel = 0.10;
        constexpr double oracle_seconds = 300.0;
        constexpr double dominance_slack = 1e-6;
        constexpr double dominance_seconds = 1800.0;
        constexpr double headline_gain = 0.60;
        constexpr double offaxis_margin = 0.10;
        constexpr double trend_step = 0.02;
        constexpr double rank_floor = 1.0 - 1e-4;
        constexpr double modulus = 1e-12;
        constexpr double trace_slack = 1e-12;
        constexpr double gain_bound_slack = 1e-9;
        constexpr double lp_abs = 1e-8;
        constexpr double sdp_rel = 0.02;
        constexpr double eig_rel = 1e-8;
        constexpr double kernel_seconds = 120.0;
    }

    constexpr int desk_q = 181;
    constexpr int desk_l = 21;

    using Clock = std::chrono::steady_clock;

    double seconds_since(Clock::time_point t0)
    {
        return std::chrono::duration<double>(Clock::now() - t0).count();
    }

    struct Scenario
    {
        std::string name;
        CoverageRegion region;
        std::optional<double> width_deg;
    };

    struct ScenarioRun
    {
        Scenario scenario;
        std::vector<SchemeResult> results;
        double seconds = 0.0;

        double gain(SchemeId id) const
        {
            for (const SchemeResult &r : results)
                if (r.id == id)
                    return r.report.inner.worst_gain;
            return std::nan("");
        }
    };

    std::vector<Scenario> desk_scenarios()
    {
        std::vector<Scenario> out{{"region [-0.1, 0.1]", CoverageRegion::single(-0.1, 0.1), {}},
                                  {"region [-0.3, 0.3]", CoverageRegion::single(-0.3, 0.3), {}},
                                  {"region [-0.8, -0.6]", CoverageRegion::single(-0.8, -0.6), {}}};
        for (double deg : {10.0, 20.0, 40.0, 60.0, 80.0, 100.0})
            out.push_back({"width " + std::to_string(static_cast<int>(deg)) + " deg",
                           CoverageRegion::symmetric(deg * pi / 180.0), deg});
        return out;
    }

    AlgoSettings desk_settings()
    {
        AlgoSettings s;
        s.outer_grid_l = desk_l;
        s.threads = 0;
        return s;
    }

    // Rank and modulus bookkeeping across every beamformer step the suite runs.
    struct RankLedger
    {
        SdrStats total;
        void add(const SdrStats &s) { total += s; }
    };

    class Suite
    {
    public:
        explicit Suite(std::set<int> only) : only_(std::move(only)) {}

        bool wants(int c) const { return only_.empty() || only_.count(c) > 0; }

        void report(int c, bool pass, const std::string &detail)
        {
            std::printf("criterion %2d: %s  %s\n", c, pass ? "PASS" : "FAIL", detail.c_str());
            std::fflush(stdout);
            failures_ += pass ? 0 : 1;
        }

        int failures() const { return failures_; }

        const std::vector<ScenarioRun> &scenario_runs()
        {
            if (!runs_)
            {
                runs_.emplace();
                const ArrayConfig cfg;
                const AlgoSettings settings = desk_settings();
                for (const Scenario &s : desk_scenarios())
                {
                    const AngularGrid grid = sample_region(s.region, desk_q);
                    const auto t0 = Clock::now();
                    ScenarioRun run{s, compare_all(s.region, grid, cfg, settings), 0.0};
                    run.seconds = seconds_since(t0);
                    std::printf("  %-20s %7.1f s ", s.name.c_str(), run.seconds);
                    for (const SchemeResult &r : run.results)
                    {
                        std::printf(" %s=%.4f", std::string(to_string(r.id)).c_str(), r.report.inner.worst_gain);
                        ranks.add(r.report.sdr);
                    }
                    std::printf("\n");
                    std::fflush(stdout);
                    runs_->push_back(std::move(run));
                }
            }
            return *runs_;
        }

        const ScenarioRun &scenario(const std::string &name)
        {
            for (const ScenarioRun &r : scenario_runs())
                if (r.scenario.name == name)
                    return r;
            throw std::logic_error("unknown scenario " + name);
        }

        RankLedger ranks;

    private:
        std::set<int> only_;
        std::optional<std::vector<ScenarioRun>> runs_;
        int failures_ = 0;
    };

    std::string fmt(const char *f, auto... args)
    {
        char buf[512];
        std::snprintf(buf, sizeof buf, f, args...);
        return buf;
    }

    void gradient_suite(Suite &suite)
    {
        const auto t0 = Clock::now();
        const oracle::GradientCheck check = oracle::fd_gradient_check(20240601, 100);
        const double secs = seconds_since(t0);
        const bool pass = check.trials == 100 && check.max_rel_error <= tol::fd_rel && secs < tol::fd_seconds;
        suite.report(1, pass,
                     fmt("gradient vs central differences: max rel err %.3e over %d trials (<= %.0e), %.2f s (< %.0f s)",
                         check.max_rel_error, check.trials, tol::fd_rel, secs, tol::fd_seconds));
    }

    void monotone_and_bounded(Suite &suite)
    {
        const ArrayConfig cfg;
        const double bound = cfg.n_antennas * cfg.g_max;
        int reports = 0, bad_trace = 0, bad_bound = 0;
        double worst_drop = 0.0, highest = 0.0;
        for (const ScenarioRun &run : suite.scenario_runs())
            for (const SchemeResult &r : run.results)
            {
                ++reports;
                const auto &trace = r.report.inner.trace;
                bool ok = true;
                for (std::size_t i = 1; i < trace.size(); ++i)
                {
                    worst_drop = std::max(worst_drop, trace[i - 1] - trace[i]);
                    ok = ok && trace[i] >= trace[i - 1] - tol::trace_slack;
                }
                bad_trace += ok ? 0 : 1;
                double top = r.report.inner.worst_gain;
                for (double v : trace)
                    top = std::max(top, v);
                for (const PsiPoint &p : r.report.per_psi_curve)
                    top = std::max(top, p.worst_gain);
                highest = std::max(highest, top);
                bad_bound += top <= bound + tol::gain_bound_slack ? 0 : 1;
            }
        suite.report(2, bad_trace == 0 && bad_bound == 0,
                     fmt("%d reports: %d non-monotone traces (largest drop %.2e), %d above N*g_max = %.0f (highest %.4f)",
                         reports, bad_trace, worst_drop, bad_bound, bound, highest));
    }

    void matched_filter(Suite &suite)
    {
        const ArrayConfig cfg;
        AlgoSettings settings = desk_settings();
        const auto region = CoverageRegion::direction(0.2);
        const auto t0 = Clock::now();
        const SolveReport r = solve_hr6dma(region, sample_region(region, 1), cfg, settings);
        const double secs = seconds_since(t0);
        suite.ranks.add(r.sdr);
        const double target = tol::matched_fraction * cfg.n_antennas * cfg.g_max;
        suite.report(3, r.inner.worst_gain >= target && secs < tol::matched_seconds,
                     fmt("single direction 0.2 rad: worst gain %.6f (>= %.2f), %.2f s (< %.0f s)", r.inner.worst_gain,
                         target, secs, tol::matched_seconds));
    }

    void oracle_equivalence(Suite &suite)
    {
        ArrayConfig cfg;
        cfg.n_antennas = 2;
        const auto region = CoverageRegion::single(-0.3, 0.3);
        const AngularGrid grid = sample_region(region, 7);
        const auto t0 = Clock::now();
        oracle::BruteForceSpec spec;
        spec.n_antennas = 2;
        spec.phase_grid_points = spec.phi_grid_points = spec.psi_grid_points = 64;
        spec.grid = grid;
        spec.threads = resolve_threads(0);
        const auto brute = oracle::brute_force_maxmin(spec, cfg);
        const SolveReport hr = solve_hr6dma(region, grid, cfg, desk_settings());
        const double secs = seconds_since(t0);
        suite.ranks.add(hr.sdr);
        const double rel = std::abs(hr.inner.worst_gain - brute.worst_gain) / brute.worst_gain;
        suite.report(4, rel <= tol::oracle_rel && secs < tol::oracle_seconds,
                     fmt("N=2, Q=7: HR6DMA %.6f vs brute force %.6f (rel gap %.2f%%, <= %.0f%%; lattice phase %.4f, "
                         "phi %.4f, psi %.4f rad), %.1f s (< %.0f s)",
                         hr.inner.worst_gain, brute.worst_gain, 100.0 * rel, 100.0 * tol::oracle_rel,
                         brute.spacing.phase, brute.spacing.phi, brute.spacing.psi, secs, tol::oracle_seconds));
    }

    void dominance(Suite &suite)
    {
        double total = 0.0, worst_margin = std::numeric_limits<double>::infinity();
        std::string worst_where;
        int violations = 0;
        for (const ScenarioRun &run : suite.scenario_runs())
        {
            total += run.seconds;
            const double hr = run.gain(SchemeId::HR6DMA);
            for (SchemeId id : all_schemes)
            {
                if (id == SchemeId::HR6DMA)
                    continue;
                const double margin = hr - run.gain(id);
                if (margin < worst_margin)
                {
                    worst_margin = margin;
                    worst_where = run.scenario.name + " vs " + std::string(to_string(id));
                }
                violations += margin >= -tol::dominance_slack ? 0 : 1;
            }
        }
        suite.report(5, violations == 0 && total < tol::dominance_seconds,
                     fmt("%d violations over 9 scenarios x 5 schemes; tightest HR6DMA margin %.3e (%s); %.1f s (< %.0f s)",
                         violations, worst_margin, worst_where.c_str(), total, tol::dominance_seconds));
    }

    void headline(Suite &suite)
    {
        const ScenarioRun &run = suite.scenario("region [-0.1, 0.1]");
        const double hr = run.gain(SchemeId::HR6DMA), nra = run.gain(SchemeId::NRA);
        const double gain = hr / nra - 1.0;
        suite.report(6, gain >= tol::headline_gain,
                     fmt("region [-0.1, 0.1]: HR6DMA %.4f vs NRA %.4f, improvement %.1f%% (>= %.0f%%)", hr, nra,
                         100.0 * gain, 100.0 * tol::headline_gain));
    }

    void off_axis(Suite &suite)
    {
        const ScenarioRun &run = suite.scenario("region [-0.8, -0.6]");
        const double floor = std::max(run.gain(SchemeId::ArrayRA), run.gain(SchemeId::NRA));
        const double hr = run.gain(SchemeId::HR6DMA), ant = run.gain(SchemeId::AntennaRA);
        const double need = (1.0 + tol::offaxis_margin) * floor;
        suite.report(7, hr >= need && ant >= need,
                     fmt("region [-0.8, -0.6]: HR6DMA %.4f (+%.1f%%), AntennaRA %.4f (+%.1f%%) over max(ArrayRA %.4f, "
                         "NRA %.4f); need +%.0f%%",
                         hr, 100.0 * (hr / floor - 1.0), ant, 100.0 * (ant / floor - 1.0), run.gain(SchemeId::ArrayRA),
                         run.gain(SchemeId::NRA), 100.0 * tol::offaxis_margin));
    }

    void width_trend(Suite &suite)
    {
        std::vector<const ScenarioRun *> widths;
        for (const ScenarioRun &run : suite.scenario_runs())
            if (run.scenario.width_deg)
                widths.push_back(&run);
        int rises = 0, not_top = 0;
        double largest_rise = 0.0;
        std::string rise_where = "none";
        for (SchemeId id : all_schemes)
            for (std::size_t k = 1; k < widths.size(); ++k)
            {
                const double prev = widths[k - 1]->gain(id), next = widths[k]->gain(id);
                const double rise = next / prev - 1.0;
                if (rise > largest_rise)
                {
                    largest_rise = rise;
                    rise_where = std::string(to_string(id)) + " at " + widths[k]->scenario.name;
                }
                rises += next <= prev * (1.0 + tol::trend_step) ? 0 : 1;
            }
        for (const ScenarioRun *run : widths)
            for (SchemeId id : all_schemes)
                not_top += run->gain(SchemeId::HR6DMA) >= run->gain(id) - tol::dominance_slack ? 0 : 1;
        suite.report(8, rises == 0 && not_top == 0,
                     fmt("widths 10..100 deg: %d steps rise more than %.0f%% (largest %+.2f%%, %s); HR6DMA below another "
                         "scheme at %d widths",
                         rises, 100.0 * tol::trend_step, 100.0 * largest_rise, rise_where.c_str(), not_top));
    }

    void rank_one(Suite &suite)
    {
        suite.scenario_runs();
        const SdrStats &s = suite.ranks.total;
        const bool pass = s.rank_reached > 0 && s.min_converged_rank_metric >= tol::rank_floor &&
                          s.max_modulus_error <= tol::modulus;
        suite.report(9, pass,
                     fmt("%d beamformer steps, %d converged: min rank metric %.6f (>= %.4f), max | |w_n| sqrt(N) - 1 | "
                         "%.1e (<= %.0e); %d stopped at the penalty cap",
                         s.steps, s.rank_reached, s.min_converged_rank_metric, tol::rank_floor, s.max_modulus_error,
                         tol::modulus, s.rank_cap_hits));
    }

    void kernels(Suite &suite)
    {
        const auto t0 = Clock::now();
        std::mt19937_64 rng(99);

        int lp_compared = 0, lp_bad = 0;
        double lp_err = 0.0;
        for (int trial = 0; trial < 100; ++trial)
        {
            const convex::LpProblem p = testing::random_lp(rng);
            bool feasible = false;
            const double ref = testing::vertex_enumeration(p, feasible);
            const auto sol = convex::solve_lp(p);
            if (!feasible)
            {
                lp_bad += sol.status == convex::SolveStatus::Infeasible ? 0 : 1;
                continue;
            }
            ++lp_compared;
            const double err = sol.status == convex::SolveStatus::Optimal ? std::abs(sol.objective - ref)
                                                                           : std::numeric_limits<double>::infinity();
            lp_err = std::max(lp_err, err);
            lp_bad += err <= tol::lp_abs ? 0 : 1;
        }

        int sdp_bad = 0;
        double sdp_err = 0.0;
        for (int trial = 0; trial < 20; ++trial)
        {
            convex::SdpProblem p;
            p.dim = 2;
            p.diag_value = 0.5;
            p.gain_vectors.resize(2, 2);
            p.gain_vectors.col(0) = testing::random_complex(rng, 2);
            p.gain_vectors.col(1) = testing::random_complex(rng, 2);
            const auto sol = convex::solve_sdp(p);
            const double brute = testing::phase_grid_two(p.gain_vectors);
            const double err = sol.status == convex::SolveStatus::Optimal ? std::abs(sol.tau - brute) / brute
                                                                           : std::numeric_limits<double>::infinity();
            sdp_err = std::max(sdp_err, err);
            sdp_bad += err <= tol::sdp_rel ? 0 : 1;
        }

        int eig_bad = 0;
        double eig_err = 0.0;
        for (int trial = 0; trial < 100; ++trial)
        {
            const int n = 2 + trial % 11;
            Eigen::MatrixXcd B(n, n);
            for (int k = 0; k < n; ++k)
                B.col(k) = testing::random_complex(rng, n);
            const Eigen::MatrixXcd W = B * B.adjoint();
            const convex::EigenPair ep = convex::principal_eigpair(W);
            const double err = (W * ep.vector - ep.value * ep.vector).norm() / W.norm();
            eig_err = std::max(eig_err, err);
            eig_bad += err <= tol::eig_rel ? 0 : 1;
        }

        const double secs = seconds_since(t0);
        suite.report(10, lp_bad == 0 && sdp_bad == 0 && eig_bad == 0 && secs < tol::kernel_seconds,
                     fmt("LP vs vertex enumeration: %d compared, max err %.1e (<= %.0e); SDP vs N=2 phase grid: 20 "
                         "instances, max rel err %.2e (<= %.0e); eigenpair residual max %.1e ||W||_F (<= %.0e); "
                         "%.2f s (< %.0f s)",
                         lp_compared, lp_err, tol::lp_abs, sdp_err, tol::sdp_rel, eig_err, tol::eig_rel, secs,
                         tol::kernel_seconds));
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"hr6dma acceptance suite"};
    std::vector<int> only;
    app.add_option("criteria", only, "Criteria to run (default: all)")->check(CLI::Range(1, 10));
    CLI11_PARSE(app, argc, argv);

    Suite suite({only.begin(), only.end()});
    const std::vector<std::pair<int, std::function<void(Suite &)>>> order{
        {1, gradient_suite}, {10, kernels},  {3, matched_filter}, {4, oracle_equivalence}, {5, dominance},
        {2, monotone_and_bounded}, {6, headline}, {7, off_axis}, {8, width_trend}, {9, rank_one}};
    for (const auto &[c, fn] : order)
        if (suite.wants(c))
            fn(suite);
    std::printf("%s: %d failing criteria\n", suite.failures() == 0 ? "PASS" : "FAIL", suite.failures());
    return suite.failures() == 0 ? 0 : 1;
}
