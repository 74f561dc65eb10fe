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

#include <doctest.h>

#include "hr6dma/errors.hpp"
#include "hr6dma/model.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace hr6dma;
using doctest::Approx;

namespace
{
    constexpr double pi = std::numbers::pi;

    ArrayConfig with_n(int n)
    {
        ArrayConfig cfg;
        cfg.n_antennas = n;
        return cfg;
    }

    // Scalar loop over |sum_n conj(a_n) w_n|^2 written straight from the model definition.
    double loop_gain(double theta, double psi, const std::vector<double> &phi, const std::vector<cdouble> &w,
                     const ArrayConfig &cfg)
    {
        const double te = theta - psi;
        cdouble acc = 0.0;
        for (std::size_t n = 0; n < w.size(); ++n)
        {
            const double inc = te - phi[n];
            const double g = std::abs(inc) <= pi / 2 ? cfg.g_max * std::pow(std::cos(inc), 2 * cfg.directivity_p) : 0.0;
            const double ph = 2 * pi * cfg.spacing_wl * static_cast<double>(n) * std::sin(te);
            acc += std::conj(std::sqrt(g) * cdouble(std::cos(ph), -std::sin(ph))) * w[n];
        }
        return std::norm(acc);
    }
}

TEST_CASE("element_gain follows the cosine-power pattern")
{
    ArrayConfig cfg;
    CHECK(element_gain(0.0, cfg) == 4.0);
    CHECK(element_gain(pi / 3, cfg) == Approx(1.0).epsilon(1e-14));
    CHECK(element_gain(1.6, cfg) == 0.0);
    CHECK(element_gain(-1.6, cfg) == 0.0);
    CHECK(element_gain(pi / 2, cfg) == Approx(0.0).epsilon(1e-30));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int k = 0; k < 1000; ++k)
    {
        const double x = u(rng);
        const double g = element_gain(x, cfg);
        CHECK(g >= 0.0);
        CHECK(g <= cfg.g_max);
        CHECK(g == element_gain(-x, cfg));
    }
}

TEST_CASE("default element pattern is power-normalized over the circle")
{
    ArrayConfig cfg; // g_max = 4, p = 1
    const int steps = 200000;
    const double h = 2 * pi / steps;
    double acc = 0.0;
    for (int k = 0; k <= steps; ++k)
    {
        const double x = -pi + k * h;
        const double wgt = (k == 0 || k == steps) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        acc += wgt * element_gain(x, cfg);
    }
    CHECK(acc * h / 3.0 / (2 * pi) == Approx(1.0).epsilon(1e-6));
    CHECK(ArrayConfig::power_conserving_gmax(1.0) == 6.0);
}

TEST_CASE("antenna_positions are centred and rotate with the array")
{
    auto two = with_n(2);
    auto p = antenna_positions(0.0, two);
    CHECK(p[0].x() == Approx(-0.25));
    CHECK(p[0].y() == 0.0);
    CHECK(p[1].x() == Approx(0.25));

    auto wide = two;
    wide.psi_max = pi / 2;
    p = antenna_positions(pi / 2, wide);
    CHECK(p[0].x() == Approx(0.0).epsilon(1e-15));
    CHECK(p[0].y() == Approx(-0.25));
    CHECK(p[1].y() == Approx(0.25));

    p = antenna_positions(0.0, with_n(3));
    CHECK(p[0].x() == Approx(-0.5));
    CHECK(p[1].x() == Approx(0.0));
    CHECK(p[2].x() == Approx(0.5));

    CHECK_THROWS_AS(antenna_positions(1.1, ArrayConfig{}), ConstraintError);
}

TEST_CASE("steering_vector phases")
{
    auto v = steering_vector(0.0, 0.0, with_n(4));
    for (int n = 0; n < 4; ++n)
        CHECK(std::abs(v(n) - cdouble(1.0, 0.0)) < 1e-15);

    v = steering_vector(pi / 6, 0.0, with_n(3));
    CHECK(std::abs(v(0) - cdouble(1, 0)) < 1e-12);
    CHECK(std::abs(v(1) - cdouble(0, -1)) < 1e-12);
    CHECK(std::abs(v(2) - cdouble(-1, 0)) < 1e-12);

    v = steering_vector(pi / 3, pi / 3, with_n(5));
    for (int n = 0; n < 5; ++n)
        CHECK(std::abs(v(n) - cdouble(1, 0)) < 1e-15);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-pi, pi);
    for (int k = 0; k < 200; ++k)
    {
        v = steering_vector(u(rng), u(rng), with_n(16));
        CHECK((v.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("array_response scales steering by element amplitude")
{
    auto cfg = with_n(2);
    auto a = array_response(0.0, RotationState::aligned(2), cfg);
    CHECK(std::abs(a(0) - 2.0) < 1e-15);
    CHECK(std::abs(a(1) - 2.0) < 1e-15);

    RotationState tilted{0.0, Eigen::VectorXd::Constant(2, pi / 3)};
    a = array_response(0.0, tilted, cfg);
    CHECK(std::abs(a(0) - 1.0) < 1e-12);
    CHECK(std::abs(a(1) - 1.0) < 1e-12);

    a = array_response(pi / 6, RotationState::aligned(2, pi / 6), cfg);
    CHECK(std::abs(a(0) - 2.0) < 1e-15);
    CHECK(std::abs(a(1) - 2.0) < 1e-15);
}

TEST_CASE("beamforming_gain examples and direct summation")
{
    ArrayConfig cfg; // N = 10
    const auto w = Beamformer::uniform(10);
    CHECK(beamforming_gain(0.0, RotationState::aligned(10), w, cfg) == Approx(40.0).epsilon(1e-13));

    auto two = with_n(2);
    Eigen::VectorXcd anti(2);
    anti << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    CHECK(beamforming_gain(0.0, RotationState::aligned(2), Beamformer(anti), two) == Approx(0.0).epsilon(1e-30));

    const std::vector<double> phi(10, 0.0);
    const std::vector<cdouble> wv(w.weights().data(), w.weights().data() + 10);
    const double direct = loop_gain(0.05, 0.0, phi, wv, cfg);
    CHECK(std::abs(beamforming_gain(0.05, RotationState::aligned(10), w, cfg) - direct) < 1e-12);
}

TEST_CASE("beamforming_gain properties on random inputs")
{
    ArrayConfig cfg;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ang(-pi / 2, pi / 2);
    std::uniform_real_distribution<double> rot(-cfg.phi_max, cfg.phi_max);
    std::uniform_real_distribution<double> phase(-pi, pi);
    for (int trial = 0; trial < 500; ++trial)
    {
        RotationState s{0.5 * rot(rng), Eigen::VectorXd(10)};
        Eigen::VectorXd ph(10);
        for (int n = 0; n < 10; ++n)
        {
            s.phi(n) = rot(rng);
            ph(n) = phase(rng);
        }
        const auto w = Beamformer::from_phases(ph);
        const double theta = ang(rng);
        const double g = beamforming_gain(theta, s, w, cfg);
        CHECK(g <= cfg.max_beamforming_gain() * (1 + 1e-12));

        const double delta = ang(rng);
        RotationState shifted = s;
        shifted.psi += delta;
        CHECK(std::abs(beamforming_gain(theta + delta, shifted, w, cfg) - g) < 1e-10);

        RotationState mirrored{-s.psi, -s.phi};
        CHECK(std::abs(beamforming_gain(-theta, mirrored, w.conjugate(), cfg) - g) < 1e-10);
    }
}

TEST_CASE("received_power applies the path-loss power law")
{
    ArrayConfig cfg;
    const auto w = Beamformer::uniform(10);
    const auto s = RotationState::aligned(10);
    LinkBudget link{1.0, 1.0, 1.0, 2.5, 0.01};
    CHECK(received_power(0.0, s, w, cfg, link) == Approx(40.0));
    link.distance_m = 10.0;
    CHECK(received_power(0.0, s, w, cfg, link) == Approx(4e-4).epsilon(1e-12));
    link.distance_m = 0.0;
    CHECK_THROWS_AS(received_power(0.0, s, w, cfg, link), DomainError);

    Eigen::VectorXcd anti(2);
    anti << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    link.distance_m = 3.0;
    CHECK(received_power(0.0, RotationState::aligned(2), Beamformer(anti), with_n(2), link) == Approx(0.0));
}

TEST_CASE("sample_region allocation and endpoints")
{
    auto g = sample_region(CoverageRegion::single(-0.1, 0.1), 5);
    REQUIRE(g.size() == 5);
    const double expect[] = {-0.1, -0.05, 0.0, 0.05, 0.1};
    for (int q = 0; q < 5; ++q)
        CHECK(g.samples[q] == Approx(expect[q]).epsilon(1e-15));
    CHECK(g.samples.front() == -0.1);
    CHECK(g.samples.back() == 0.1);

    CoverageRegion two({{-0.5, -0.3}, {0.3, 0.5}});
    g = sample_region(two, 4);
    CHECK(g.samples == std::vector<double>{-0.5, -0.3, 0.3, 0.5});
    CHECK(g.per_interval_counts == std::vector<int>{2, 2});

    CoverageRegion gap({{0.0, 0.2}, {0.4, 0.6}});
    g = sample_region(gap, 10);
    CHECK(g.per_interval_counts == std::vector<int>{5, 5});
    CHECK(g.samples[0] == 0.0);
    CHECK(g.samples[4] == 0.2);
    CHECK(g.samples[5] == 0.4);
    CHECK(g.samples[9] == 0.6);

    CoverageRegion uneven({{-0.9, -0.8}, {0.0, 0.5}});
    g = sample_region(uneven, 14);
    CHECK(g.per_interval_counts == std::vector<int>{4, 10});
    CHECK(g.samples.size() == 14);

    CHECK_THROWS_AS(sample_region(two, 3), ConfigError);
    CHECK(sample_region(uneven, 37) == sample_region(uneven, 37));

    g = sample_region(CoverageRegion::direction(0.2), 1);
    CHECK(g.samples == std::vector<double>{0.2});
}

TEST_CASE("CoverageRegion validation names the interval")
{
    try
    {
        CoverageRegion bad({{0.2, 0.1}});
        FAIL("expected ConfigError");
    }
    catch (const ConfigError &e)
    {
        CHECK(std::string(e.what()).find("region.intervals[0]") != std::string::npos);
    }
    CHECK_THROWS_AS(CoverageRegion({{-0.5, 0.1}, {0.0, 0.2}}), ConfigError);
    CHECK_THROWS_AS(CoverageRegion({{-2.0, 0.1}}), ConfigError);
    CHECK_THROWS_AS(CoverageRegion(std::vector<Interval>{}), ConfigError);
    CHECK(CoverageRegion({{-0.5, -0.3}, {0.1, 0.3}}).center() == Approx(-0.1));
}

TEST_CASE("worst_case_gain picks the first minimum")
{
    ArrayConfig cfg;
    const auto w = Beamformer::uniform(10);
    const auto s = RotationState::aligned(10);
    auto single = AngularGrid::from_samples({0.3});
    auto wc = worst_case_gain(single, s, w, cfg);
    CHECK(wc.index == 0);
    CHECK(wc.gain == Approx(beamforming_gain(0.3, s, w, cfg)));

    auto three = AngularGrid::from_samples({-0.1, 0.0, 0.1});
    wc = worst_case_gain(three, s, w, cfg);
    const double edge = beamforming_gain(-0.1, s, w, cfg);
    CHECK(edge == beamforming_gain(0.1, s, w, cfg));
    CHECK(edge < beamforming_gain(0.0, s, w, cfg));
    CHECK(wc.index == 0);
    CHECK(wc.gain == Approx(edge).epsilon(1e-14));

    // Every element faces away from the region.
    ArrayConfig narrow = cfg;
    narrow.directivity_p = 4.0;
    RotationState away{0.0, Eigen::VectorXd::Constant(10, cfg.phi_max)};
    auto behind = AngularGrid::from_samples({-1.5, -1.4});
    wc = worst_case_gain(behind, away, w, narrow);
    CHECK(wc.gain == 0.0);
    CHECK(wc.index == 0);

    CHECK_THROWS_AS(worst_case_gain(AngularGrid{}, s, w, cfg), DomainError);
}

TEST_CASE("Beamformer enforces constant modulus")
{
    Eigen::VectorXcd bad = Eigen::VectorXcd::Constant(4, 0.5);
    bad(2) = 0.6;
    CHECK_THROWS_AS(Beamformer{bad}, ConfigError);
    auto w = Beamformer::project(Eigen::VectorXcd::Constant(4, cdouble(0.0, 0.0)));
    CHECK((w.weights().cwiseAbs().array() - 0.5).abs().maxCoeff() < 1e-15);
}

TEST_CASE("ArrayConfig validation")
{
    ArrayConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.directivity_p = 0.4;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.phi_max = 2.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    RotationState s{0.0, Eigen::VectorXd::Constant(10, 1.2)};
    CHECK_THROWS_AS(check_rotation(s, ArrayConfig{}), ConstraintError);
}
