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

#ifndef HR6DMA_TESTS_KERNEL_ORACLES_HPP
#define HR6DMA_TESTS_KERNEL_ORACLES_HPP

#include "hr6dma/convex.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace hr6dma::testing
{
    // Best objective over all vertices (intersections of n active rows) of a bounded LP.
    inline double vertex_enumeration(const convex::LpProblem &prob, bool &feasible)
    {
        const Eigen::Index n = prob.n_vars();
        std::vector<Eigen::VectorXd> rows;
        std::vector<double> rhs;
        for (Eigen::Index i = 0; i < prob.rows.rows(); ++i)
        {
            rows.push_back(prob.rows.row(i).transpose());
            rhs.push_back(prob.rhs(i));
        }
        for (Eigen::Index j = 0; j < n; ++j)
        {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
            e(j) = 1.0;
            rows.push_back(e);
            rhs.push_back(prob.upper(j));
            rows.push_back(-e);
            rhs.push_back(-prob.lower(j));
        }
        const int m = static_cast<int>(rows.size());
        double best = -std::numeric_limits<double>::infinity();
        feasible = false;
        std::vector<int> pick(static_cast<std::size_t>(n));
        // Iterate over all n-subsets in lexicographic order.
        for (int i = 0; i < n; ++i)
            pick[i] = i;
        while (true)
        {
            Eigen::MatrixXd A(n, n);
            Eigen::VectorXd b(n);
            for (int i = 0; i < n; ++i)
            {
                A.row(i) = rows[pick[i]].transpose();
                b(i) = rhs[pick[i]];
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
            if (lu.rank() == n)
            {
                const Eigen::VectorXd x = lu.solve(b);
                bool ok = true;
                for (int r = 0; r < m && ok; ++r)
                    ok = rows[r].dot(x) <= rhs[r] + 1e-9;
                if (ok)
                {
                    feasible = true;
                    best = std::max(best, prob.objective.dot(x));
                }
            }
            int k = static_cast<int>(n) - 1;
            while (k >= 0 && pick[k] == m - static_cast<int>(n) + k)
                --k;
            if (k < 0)
                break;
            ++pick[k];
            for (int i = k + 1; i < n; ++i)
                pick[i] = pick[i - 1] + 1;
        }
        return best;
    }

    inline convex::LpProblem random_lp(std::mt19937_64 &rng)
    {
        std::uniform_int_distribution<int> nvar(1, 3), ncon(0, 6);
        std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.05, 1.0);
        const int n = nvar(rng);
        convex::LpProblem p(n);
        for (int j = 0; j < n; ++j)
        {
            p.objective(j) = u(rng);
            p.lower(j) = -1.0 - pos(rng);
            p.upper(j) = 1.0 + pos(rng);
        }
        const int m = ncon(rng);
        for (int i = 0; i < m; ++i)
        {
            Eigen::VectorXd row(n);
            for (int j = 0; j < n; ++j)
                row(j) = u(rng);
            p.add_constraint(row, u(rng));
        }
        return p;
    }

    // min_q |g_q^H w|^2 maximized over w = [1, e^{j chi}] / sqrt(2).
    inline double phase_grid_two(const Eigen::MatrixXcd &G, double step = 1e-3)
    {
        double best = 0.0;
        for (double chi = 0.0; chi < 2 * std::numbers::pi; chi += step)
        {
            Eigen::VectorXcd w(2);
            w << 1.0, std::polar(1.0, chi);
            w /= std::sqrt(2.0);
            best = std::max(best, (G.adjoint() * w).cwiseAbs2().minCoeff());
        }
        return best;
    }

    inline Eigen::VectorXcd random_complex(std::mt19937_64 &rng, int n)
    {
        std::normal_distribution<double> g;
        Eigen::VectorXcd v(n);
        for (int i = 0; i < n; ++i)
            v(i) = {g(rng), g(rng)};
        return v;
    }
}

#endif
