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

#include "hr6dma/oracle.hpp"
#include "hr6dma/errors.hpp"
#include "hr6dma/optimizer.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace hr6dma::oracle
{
    double BruteForceSpec::configuration_count() const
    {
        return std::pow(static_cast<double>(phase_grid_points), n_antennas - 1) *
               std::pow(static_cast<double>(phi_grid_points), n_antennas) * static_cast<double>(psi_grid_points);
    }

    void BruteForceSpec::validate() const
    {
        if (n_antennas < 1 || n_antennas > 3)
            throw ConfigError("oracle.n_antennas: must be in [1, 3]");
        if (phase_grid_points < 1 || phi_grid_points < 1 || psi_grid_points < 1)
            throw ConfigError("oracle: grid sizes must be >= 1");
        if (grid.empty())
            throw ConfigError("oracle.grid: no samples");
        if (configuration_count() > max_configurations)
        {
            char msg[128];
            std::snprintf(msg, sizeof msg, "oracle: %.0f configurations exceed the limit of %.0f",
                          configuration_count(), max_configurations);
            throw ConfigError(msg);
        }
    }

    std::vector<double> symmetric_lattice(double limit, int points)
    {
        if (points <= 1 || limit == 0.0)
            return {0.0};
        std::vector<double> out(static_cast<std::size_t>(points));
        for (int k = 0; k < points; ++k)
            out[static_cast<std::size_t>(k)] = -limit + 2.0 * limit * k / (points - 1);
        out.back() = limit;
        return out;
    }

    namespace
    {
        double lattice_step(const std::vector<double> &v)
        {
            return v.size() > 1 ? v[1] - v[0] : 0.0;
        }

        struct PsiBest
        {
            double worst = -1.0;
            std::vector<int> phi_idx;
            std::vector<int> phase_idx;
            std::uint64_t evaluated = 0;
        };
    }

    BruteForceResult brute_force_maxmin(const BruteForceSpec &spec, const ArrayConfig &cfg_in)
    {
        spec.validate();
        ArrayConfig cfg = cfg_in;
        cfg.n_antennas = spec.n_antennas;
        cfg.validate();

        const int N = spec.n_antennas;
        const auto Q = spec.grid.size();
        const std::vector<double> phis = symmetric_lattice(cfg.phi_max, spec.phi_grid_points);
        const std::vector<double> psis = symmetric_lattice(cfg.psi_max, spec.psi_grid_points);
        const int P = spec.phase_grid_points;
        const int F = static_cast<int>(phis.size());

        std::vector<std::complex<double>> phase_table(static_cast<std::size_t>(P));
        for (int k = 0; k < P; ++k)
            phase_table[static_cast<std::size_t>(k)] = std::polar(1.0 / std::sqrt(static_cast<double>(N)),
                                                                  2.0 * std::numbers::pi * k / P);

        auto per_psi = [&](std::size_t l) {
            const double psi = psis[l];
            // term[q][n][f] = conj(v_n(theta_q)) * sqrt(G(theta_e - phi_f)).
            std::vector<std::complex<double>> term(Q * static_cast<std::size_t>(N * F));
            for (std::size_t q = 0; q < Q; ++q)
            {
                const double theta_e = spec.grid.samples[q] - psi;
                const double step = 2.0 * std::numbers::pi * cfg.spacing_wl * std::sin(theta_e);
                for (int n = 0; n < N; ++n)
                    for (int f = 0; f < F; ++f)
                        term[(q * N + n) * F + f] =
                            std::polar(element_amplitude(theta_e - phis[static_cast<std::size_t>(f)], cfg), step * n);
            }

            PsiBest best;
            std::vector<int> fi(static_cast<std::size_t>(N), 0), pi(static_cast<std::size_t>(N), 0);
            const std::uint64_t phi_combos = static_cast<std::uint64_t>(std::pow(F, N));
            const std::uint64_t phase_combos = static_cast<std::uint64_t>(std::pow(P, N - 1));
            for (std::uint64_t a = 0; a < phi_combos; ++a)
            {
                std::uint64_t rest = a;
                for (int n = N - 1; n >= 0; --n)
                {
                    fi[static_cast<std::size_t>(n)] = static_cast<int>(rest % F);
                    rest /= F;
                }
                for (std::uint64_t b = 0; b < phase_combos; ++b)
                {
                    rest = b;
                    pi[0] = 0;
                    for (int n = N - 1; n >= 1; --n)
                    {
                        pi[static_cast<std::size_t>(n)] = static_cast<int>(rest % P);
                        rest /= P;
                    }
                    double worst = std::numeric_limits<double>::infinity();
                    for (std::size_t q = 0; q < Q && worst > best.worst; ++q)
                    {
                        std::complex<double> s = 0.0;
                        for (int n = 0; n < N; ++n)
                            s += term[(q * N + n) * F + fi[static_cast<std::size_t>(n)]] *
                                 phase_table[static_cast<std::size_t>(pi[static_cast<std::size_t>(n)])];
                        worst = std::min(worst, std::norm(s));
                    }
                    ++best.evaluated;
                    if (worst > best.worst)
                    {
                        best.worst = worst;
                        best.phi_idx = fi;
                        best.phase_idx = pi;
                    }
                }
            }
            return best;
        };

        const auto results = parallel_map<PsiBest>(psis.size(), spec.threads, per_psi);
        std::size_t arg = 0;
        std::uint64_t evaluated = 0;
        for (std::size_t l = 0; l < results.size(); ++l)
        {
            evaluated += results[l].evaluated;
            if (results[l].worst > results[arg].worst)
                arg = l;
        }

        const PsiBest &b = results[arg];
        Eigen::VectorXd phi(N), chi(N);
        for (int n = 0; n < N; ++n)
        {
            phi(n) = phis[static_cast<std::size_t>(b.phi_idx[static_cast<std::size_t>(n)])];
            chi(n) = 2.0 * std::numbers::pi * b.phase_idx[static_cast<std::size_t>(n)] / P;
        }
        return {b.worst,
                {psis[arg], phi},
                Beamformer::from_phases(chi),
                {2.0 * std::numbers::pi / P, lattice_step(phis), lattice_step(psis)},
                evaluated};
    }

    double direct_gain_oracle(double theta, const RotationState &state, const Beamformer &w, const ArrayConfig &cfg)
    {
        const double half_pi = std::numbers::pi / 2.0;
        double re = 0.0, im = 0.0;
        for (int n = 0; n < cfg.n_antennas; ++n)
        {
            const double x = theta - state.psi - state.phi(n);
            double g = 0.0;
            if (x >= -half_pi && x <= half_pi)
                g = cfg.g_max * std::pow(std::cos(x), 2.0 * cfg.directivity_p);
            const double amp = std::sqrt(g);
            // conj(v_n) = exp(+j 2 pi d n sin(theta - psi))
            const double arg = 2.0 * std::numbers::pi * cfg.spacing_wl * n * std::sin(theta - state.psi);
            const double wr = w.weights()(n).real(), wi = w.weights()(n).imag();
            const double cr = amp * std::cos(arg), ci = amp * std::sin(arg);
            re += cr * wr - ci * wi;
            im += cr * wi + ci * wr;
        }
        return re * re + im * im;
    }

    Eigen::VectorXd fd_gradient(double theta, const RotationState &state, const Beamformer &w,
                                const ArrayConfig &cfg, double step)
    {
        Eigen::VectorXd out(cfg.n_antennas);
        for (int n = 0; n < cfg.n_antennas; ++n)
        {
            RotationState up = state, down = state;
            up.phi(n) += step;
            down.phi(n) -= step;
            out(n) = (direct_gain_oracle(theta, up, w, cfg) - direct_gain_oracle(theta, down, w, cfg)) / (2.0 * step);
        }
        return out;
    }

    GradientCheck fd_gradient_check(std::uint64_t seed, int trials, const ArrayConfig &cfg)
    {
        cfg.validate();
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        const double margin = 0.01;
        const double half_pi = std::numbers::pi / 2.0;

        GradientCheck out;
        for (int t = 0; t < trials; ++t)
        {
            RotationState state{cfg.psi_max * unit(rng), Eigen::VectorXd(cfg.n_antennas)};
            for (int n = 0; n < cfg.n_antennas; ++n)
                state.phi(n) = cfg.phi_max * unit(rng);
            const double lo = state.phi.maxCoeff() + state.psi - half_pi + margin;
            const double hi = state.phi.minCoeff() + state.psi + half_pi - margin;
            std::uniform_real_distribution<double> pick(lo, hi);
            const double theta = pick(rng);

            Eigen::VectorXd chi(cfg.n_antennas);
            for (int n = 0; n < cfg.n_antennas; ++n)
                chi(n) = std::numbers::pi * unit(rng);
            const Beamformer w = Beamformer::from_phases(chi);

            const Eigen::VectorXd analytic = sca_gradient(theta, state.psi, state.phi, w, cfg);
            const Eigen::VectorXd numeric = fd_gradient(theta, state, w, cfg);
            const double abs_err = (analytic - numeric).cwiseAbs().maxCoeff();
            out.max_abs_error = std::max(out.max_abs_error, abs_err);
            out.max_rel_error = std::max(out.max_rel_error, abs_err / std::max(analytic.cwiseAbs().maxCoeff(), 1e-3));
            ++out.trials;
        }
        return out;
    }
}
