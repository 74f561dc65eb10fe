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

#include "hr6dma/model.hpp"
#include "hr6dma/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace hr6dma
{
    namespace
    {
        constexpr double half_pi = 0.5 * std::numbers::pi;

        void require(bool ok, const std::string &field, const std::string &what)
        {
            if (!ok)
                throw ConfigError(field + ": " + what);
        }
    }

    void ArrayConfig::validate() const
    {
        require(n_antennas >= 1, "array.n_antennas", "must be >= 1");
        require(std::isfinite(spacing_wl) && spacing_wl > 0.0, "array.spacing_wl", "must be > 0");
        require(psi_max >= 0.0 && psi_max <= half_pi, "array.psi_max", "must lie in [0, pi/2]");
        require(phi_max >= 0.0 && phi_max <= half_pi, "array.phi_max", "must lie in [0, pi/2]");
        require(directivity_p >= 0.5, "array.directivity_p", "must be >= 0.5");
        require(std::isfinite(g_max) && g_max > 0.0, "array.g_max", "must be > 0");
    }

    double ArrayConfig::power_conserving_gmax(double directivity_p)
    {
        return 2.0 * (2.0 * directivity_p + 1.0);
    }

    void check_rotation(const RotationState &state, const ArrayConfig &cfg)
    {
        if (state.phi.size() != cfg.n_antennas)
            throw ConfigError("rotation.phi: expected " + std::to_string(cfg.n_antennas) + " entries, got " +
                              std::to_string(state.phi.size()));
        if (!(std::abs(state.psi) <= cfg.psi_max))
            throw ConstraintError("array rotation " + std::to_string(state.psi) + " exceeds psi_max " +
                                  std::to_string(cfg.psi_max));
        for (Eigen::Index n = 0; n < state.phi.size(); ++n)
            if (!(std::abs(state.phi(n)) <= cfg.phi_max))
                throw ConstraintError("antenna " + std::to_string(n) + " rotation " + std::to_string(state.phi(n)) +
                                      " exceeds phi_max " + std::to_string(cfg.phi_max));
    }

    // *=== Beamformer ===*

    Beamformer::Beamformer(Eigen::VectorXcd weights) : w_(std::move(weights))
    {
        if (w_.size() == 0)
            throw ConfigError("beamformer: empty weight vector");
        const double target = 1.0 / std::sqrt(static_cast<double>(w_.size()));
        for (Eigen::Index n = 0; n < w_.size(); ++n)
            if (std::abs(std::abs(w_(n)) - target) > 1e-12 * target)
                throw ConfigError("beamformer: entry " + std::to_string(n) + " violates |w_n| = 1/sqrt(N)");
    }

    Beamformer Beamformer::from_phases(const Eigen::Ref<const Eigen::VectorXd> &phases)
    {
        const double mag = 1.0 / std::sqrt(static_cast<double>(phases.size()));
        Eigen::VectorXcd w(phases.size());
        for (Eigen::Index n = 0; n < phases.size(); ++n)
            w(n) = std::polar(mag, phases(n));
        return Beamformer(std::move(w), unchecked_t{});
    }

    Beamformer Beamformer::project(const Eigen::Ref<const Eigen::VectorXcd> &v)
    {
        Eigen::VectorXd phases(v.size());
        for (Eigen::Index n = 0; n < v.size(); ++n)
            phases(n) = std::arg(v(n));
        return from_phases(phases);
    }

    Beamformer Beamformer::uniform(int n_antennas)
    {
        return from_phases(Eigen::VectorXd::Zero(n_antennas));
    }

    Eigen::VectorXd Beamformer::phases() const
    {
        return w_.unaryExpr([](const cdouble &z) { return std::arg(z); }).real();
    }

    Beamformer Beamformer::conjugate() const
    {
        return Beamformer(w_.conjugate(), unchecked_t{});
    }

    // *=== CoverageRegion ===*

    CoverageRegion::CoverageRegion(std::vector<Interval> intervals) : intervals_(std::move(intervals))
    {
        if (intervals_.empty())
            throw ConfigError("region.intervals: at least one interval is required");
        for (std::size_t m = 0; m < intervals_.size(); ++m)
        {
            const auto &iv = intervals_[m];
            const std::string field = "region.intervals[" + std::to_string(m) + "]";
            require(std::isfinite(iv.alpha) && std::isfinite(iv.beta), field, "endpoints must be finite");
            require(iv.alpha >= -half_pi && iv.beta <= half_pi, field, "endpoints must lie in [-pi/2, pi/2]");
            require(iv.alpha <= iv.beta, field, "requires alpha <= beta");
            if (m > 0)
                require(intervals_[m - 1].beta < iv.alpha, field, "must start after the previous interval ends");
        }
    }

    double CoverageRegion::center() const
    {
        double acc = 0.0;
        for (const auto &iv : intervals_)
            acc += iv.center();
        return acc / static_cast<double>(intervals_.size());
    }

    int CoverageRegion::min_samples() const
    {
        int total = 0;
        for (const auto &iv : intervals_)
            total += iv.is_point() ? 1 : 2;
        return total;
    }

    AngularGrid AngularGrid::from_samples(std::vector<double> samples)
    {
        std::sort(samples.begin(), samples.end());
        AngularGrid grid;
        grid.per_interval_counts = {static_cast<int>(samples.size())};
        grid.samples = std::move(samples);
        return grid;
    }

    void LinkBudget::validate() const
    {
        require(tx_power > 0.0, "link.tx_power", "must be > 0");
        require(ref_gain > 0.0, "link.ref_gain", "must be > 0");
        require(distance_m > 0.0, "link.distance_m", "must be > 0");
        require(pathloss_exp > 0.0, "link.pathloss_exp", "must be > 0");
        require(wavelength_m > 0.0, "link.wavelength_m", "must be > 0");
    }

    // *=== Element pattern ===*

    double element_gain(double phi_rel, const ArrayConfig &cfg)
    {
        if (!(std::abs(phi_rel) <= half_pi))
            return 0.0;
        const double c = std::max(std::cos(phi_rel), 0.0);
        return cfg.g_max * std::pow(c, 2.0 * cfg.directivity_p);
    }

    double element_amplitude(double phi_rel, const ArrayConfig &cfg)
    {
        if (!(std::abs(phi_rel) <= half_pi))
            return 0.0;
        const double c = std::max(std::cos(phi_rel), 0.0);
        return std::sqrt(cfg.g_max) * std::pow(c, cfg.directivity_p);
    }

    double element_amplitude_rotation_derivative(double phi_rel, const ArrayConfig &cfg)
    {
        if (!(std::abs(phi_rel) < half_pi))
            return 0.0;
        const double c = std::cos(phi_rel);
        const double p = cfg.directivity_p;
        // d/dphi of sqrt(g) cos^p(theta_e - phi); the sign flips against d/dx.
        return std::sqrt(cfg.g_max) * p * std::pow(c, p - 1.0) * std::sin(phi_rel);
    }

    // *=== Geometry and responses ===*

    std::vector<Eigen::Vector2d> antenna_positions(double psi, const ArrayConfig &cfg)
    {
        if (!(std::abs(psi) <= cfg.psi_max))
            throw ConstraintError("array rotation " + std::to_string(psi) + " exceeds psi_max " +
                                  std::to_string(cfg.psi_max));
        const int n_ant = cfg.n_antennas;
        const Eigen::Vector2d axis(std::cos(psi), std::sin(psi));
        std::vector<Eigen::Vector2d> pos;
        pos.reserve(n_ant);
        for (int n = 1; n <= n_ant; ++n)
            pos.emplace_back(0.5 * (2.0 * n - n_ant - 1.0) * cfg.spacing_wl * axis);
        return pos;
    }

    Eigen::VectorXcd steering_vector(double theta, double psi, const ArrayConfig &cfg)
    {
        const double phase_step = 2.0 * std::numbers::pi * cfg.spacing_wl * std::sin(theta - psi);
        Eigen::VectorXcd v(cfg.n_antennas);
        for (int n = 0; n < cfg.n_antennas; ++n)
            v(n) = std::polar(1.0, -phase_step * n);
        return v;
    }

    Eigen::VectorXcd array_response(double theta, const RotationState &state, const ArrayConfig &cfg)
    {
        const double theta_e = theta - state.psi;
        Eigen::VectorXcd a = steering_vector(theta, state.psi, cfg);
        for (int n = 0; n < cfg.n_antennas; ++n)
            a(n) *= element_amplitude(theta_e - state.phi(n), cfg);
        return a;
    }

    Eigen::MatrixXcd response_matrix(std::span<const double> samples, const RotationState &state,
                                     const ArrayConfig &cfg)
    {
        Eigen::MatrixXcd A(cfg.n_antennas, static_cast<Eigen::Index>(samples.size()));
        for (std::size_t q = 0; q < samples.size(); ++q)
            A.col(static_cast<Eigen::Index>(q)) = array_response(samples[q], state, cfg);
        return A;
    }

    double beamforming_gain(double theta, const RotationState &state, const Beamformer &w, const ArrayConfig &cfg)
    {
        return std::norm(array_response(theta, state, cfg).dot(w.weights()));
    }

    Eigen::VectorXd sampled_gains(const Eigen::MatrixXcd &responses, const Eigen::VectorXcd &w)
    {
        return (responses.adjoint() * w).cwiseAbs2();
    }

    double received_power(double theta, const RotationState &state, const Beamformer &w, const ArrayConfig &cfg,
                          const LinkBudget &link)
    {
        if (!(link.distance_m > 0.0))
            throw DomainError("received_power: distance must be positive");
        link.validate();
        const double path_gain = link.ref_gain * std::pow(1.0 / link.distance_m, 2.0 * link.pathloss_exp);
        return link.tx_power * path_gain * beamforming_gain(theta, state, w, cfg);
    }

    // *=== Region sampling ===*

    AngularGrid sample_region(const CoverageRegion &region, int total_q)
    {
        const auto &ivs = region.intervals();
        const int floor_total = region.min_samples();
        if (total_q < floor_total)
            throw ConfigError("total_q: " + std::to_string(total_q) + " samples cannot cover " +
                              std::to_string(ivs.size()) + " intervals (need at least " +
                              std::to_string(floor_total) + ")");

        const std::size_t M = ivs.size();
        std::vector<int> counts(M);
        double total_width = 0.0;
        for (std::size_t m = 0; m < M; ++m)
        {
            counts[m] = ivs[m].is_point() ? 1 : 2;
            total_width += ivs[m].width();
        }

        // Largest-remainder split of the samples above the floor; point intervals take none.
        const int spare = total_q - floor_total;
        if (spare > 0 && total_width > 0.0)
        {
            std::vector<double> remainder(M, 0.0);
            int handed_out = 0;
            for (std::size_t m = 0; m < M; ++m)
            {
                const double ideal = spare * ivs[m].width() / total_width;
                const int whole = static_cast<int>(std::floor(ideal));
                counts[m] += whole;
                handed_out += whole;
                remainder[m] = ideal - whole;
            }
            std::vector<std::size_t> order(M);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
            for (std::size_t k = 0; handed_out < spare; ++k, ++handed_out)
                ++counts[order[k % M]];
        }

        AngularGrid grid;
        grid.per_interval_counts = counts;
        grid.samples.reserve(static_cast<std::size_t>(total_q));
        for (std::size_t m = 0; m < M; ++m)
        {
            const auto &iv = ivs[m];
            const int qm = counts[m];
            if (qm == 1)
            {
                grid.samples.push_back(iv.alpha);
                continue;
            }
            for (int q = 0; q < qm; ++q)
            {
                if (q == qm - 1)
                    grid.samples.push_back(iv.beta);
                else
                    grid.samples.push_back(iv.alpha + static_cast<double>(q) / (qm - 1) * (iv.beta - iv.alpha));
            }
        }
        return grid;
    }

    WorstCase worst_case_of(const Eigen::Ref<const Eigen::VectorXd> &gains)
    {
        if (gains.size() == 0)
            throw DomainError("worst_case_gain: empty grid");
        WorstCase wc{gains(0), 0};
        for (Eigen::Index q = 1; q < gains.size(); ++q)
            if (gains(q) < wc.gain)
                wc = {gains(q), static_cast<std::size_t>(q)};
        return wc;
    }

    WorstCase worst_case_gain(const AngularGrid &grid, const RotationState &state, const Beamformer &w,
                              const ArrayConfig &cfg)
    {
        if (grid.empty())
            throw DomainError("worst_case_gain: empty grid");
        return worst_case_of(sampled_gains(response_matrix(grid.samples, state, cfg), w.weights()));
    }
}
