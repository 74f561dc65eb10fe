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

#include "hr6dma/convex.hpp"
#include "hr6dma/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace hr6dma::convex
{
    std::string_view to_string(SolveStatus status)
    {
        switch (status)
        {
        case SolveStatus::Optimal:
            return "Optimal";
        case SolveStatus::Infeasible:
            return "Infeasible";
        case SolveStatus::Unbounded:
            return "Unbounded";
        case SolveStatus::IterLimit:
            return "IterLimit";
        }
        return "Unknown";
    }

    void SolverTolerances::validate() const
    {
        if (!(feas_tol > 0.0) || !(gap_tol > 0.0) || max_iters <= 0)
            throw ConfigError("solver tolerances must be positive");
    }

    LpProblem::LpProblem(Eigen::Index n_vars)
        : objective(Eigen::VectorXd::Zero(n_vars)), rows(0, n_vars), rhs(0),
          lower(Eigen::VectorXd::Constant(n_vars, -std::numeric_limits<double>::infinity())),
          upper(Eigen::VectorXd::Constant(n_vars, std::numeric_limits<double>::infinity()))
    {
    }

    void LpProblem::add_constraint(const Eigen::Ref<const Eigen::VectorXd> &row, double bound)
    {
        if (row.size() != n_vars())
            throw StructuralError("LpProblem::add_constraint: row has " + std::to_string(row.size()) +
                                  " entries, expected " + std::to_string(n_vars()));
        rows.conservativeResize(rows.rows() + 1, Eigen::NoChange);
        rows.row(rows.rows() - 1) = row.transpose();
        rhs.conservativeResize(rhs.size() + 1);
        rhs(rhs.size() - 1) = bound;
    }

    namespace
    {
        // Dictionary simplex on  max c^T z, A z <= b, z >= 0.
        class Dictionary
        {
        public:
            Dictionary(const Eigen::MatrixXd &A, const Eigen::VectorXd &b, const Eigen::VectorXd &c, int max_pivots)
                : m_(static_cast<int>(A.rows())), n_(static_cast<int>(A.cols())), D_(m_ + 2, n_ + 2),
                  basis_(m_), nonbasis_(n_ + 1), max_pivots_(max_pivots)
            {
                D_.setZero();
                D_.topLeftCorner(m_, n_) = A;
                D_.block(0, n_, m_, 1).setConstant(-1.0);
                D_.block(0, n_ + 1, m_, 1) = b;
                D_.block(m_, 0, 1, n_) = -c.transpose();
                D_(m_ + 1, n_) = 1.0;
                for (int i = 0; i < m_; ++i)
                    basis_[i] = n_ + i;
                for (int j = 0; j < n_; ++j)
                    nonbasis_[j] = j;
                nonbasis_[n_] = -1;
            }

            SolveStatus solve(Eigen::VectorXd &z, double &value)
            {
                int r = 0;
                for (int i = 1; i < m_; ++i)
                    if (D_(i, n_ + 1) < D_(r, n_ + 1))
                        r = i;
                if (m_ > 0 && D_(r, n_ + 1) < -eps_)
                {
                    pivot(r, n_);
                    const SolveStatus phase1 = run(1);
                    if (phase1 == SolveStatus::IterLimit)
                        return phase1;
                    if (phase1 != SolveStatus::Optimal || D_(m_ + 1, n_ + 1) < -feas_eps_)
                        return SolveStatus::Infeasible;
                    for (int i = 0; i < m_; ++i)
                    {
                        if (basis_[i] != -1)
                            continue;
                        int s = -1;
                        for (int j = 0; j <= n_; ++j)
                            if (s == -1 || std::abs(D_(i, j)) > std::abs(D_(i, s)))
                                s = j;
                        if (s >= 0 && std::abs(D_(i, s)) > eps_)
                            pivot(i, s);
                    }
                }
                const SolveStatus phase2 = run(2);
                z = Eigen::VectorXd::Zero(n_);
                for (int i = 0; i < m_; ++i)
                    if (basis_[i] >= 0 && basis_[i] < n_)
                        z(basis_[i]) = D_(i, n_ + 1);
                value = D_(m_, n_ + 1);
                return phase2;
            }

            int pivots() const { return pivots_; }

        private:
            void pivot(int r, int s)
            {
                const double inv = 1.0 / D_(r, s);
                for (int i = 0; i < m_ + 2; ++i)
                {
                    if (i == r || D_(i, s) == 0.0)
                        continue;
                    const double f = D_(i, s) * inv;
                    for (int j = 0; j < n_ + 2; ++j)
                        if (j != s)
                            D_(i, j) -= D_(r, j) * f;
                    D_(i, s) = -f;
                }
                for (int j = 0; j < n_ + 2; ++j)
                    if (j != s)
                        D_(r, j) *= inv;
                D_(r, s) = inv;
                std::swap(basis_[r], nonbasis_[s]);
                ++pivots_;
            }

            SolveStatus run(int phase)
            {
                const int x = phase == 1 ? m_ + 1 : m_;
                int stalled = 0;
                while (true)
                {
                    if (pivots_ >= max_pivots_)
                        return SolveStatus::IterLimit;
                    const bool bland = stalled > 2 * (m_ + n_);
                    int s = -1;
                    for (int j = 0; j <= n_; ++j)
                    {
                        if (phase == 2 && nonbasis_[j] == -1)
                            continue;
                        if (D_(x, j) >= -eps_)
                            continue;
                        if (s == -1)
                        {
                            s = j;
                            continue;
                        }
                        if (bland ? nonbasis_[j] < nonbasis_[s]
                                  : (D_(x, j) < D_(x, s) ||
                                     (D_(x, j) == D_(x, s) && nonbasis_[j] < nonbasis_[s])))
                            s = j;
                    }
                    if (s == -1)
                        return SolveStatus::Optimal;

                    int r = -1;
                    double best = 0.0;
                    for (int i = 0; i < m_; ++i)
                    {
                        if (D_(i, s) <= eps_)
                            continue;
                        const double ratio = D_(i, n_ + 1) / D_(i, s);
                        if (r == -1 || ratio < best - eps_ || (ratio <= best + eps_ && basis_[i] < basis_[r]))
                        {
                            r = i;
                            best = ratio;
                        }
                    }
                    if (r == -1)
                        return SolveStatus::Unbounded;
                    stalled = best <= eps_ ? stalled + 1 : 0;
                    pivot(r, s);
                }
            }

            int m_;
            int n_;
            Eigen::MatrixXd D_;
            std::vector<int> basis_;
            std::vector<int> nonbasis_;
            int max_pivots_;
            int pivots_ = 0;
            static constexpr double eps_ = 1e-11;
            static constexpr double feas_eps_ = 1e-9;
        };
    }

    LpSolution solve_lp(const LpProblem &prob, const SolverTolerances &tol)
    {
        tol.validate();
        const Eigen::Index n = prob.n_vars();
        if (prob.rows.cols() != n || prob.rhs.size() != prob.rows.rows() || prob.lower.size() != n ||
            prob.upper.size() != n)
            throw StructuralError("solve_lp: inconsistent problem dimensions");
        for (Eigen::Index j = 0; j < n; ++j)
            if (prob.lower(j) > prob.upper(j))
                throw StructuralError("solve_lp: lower bound exceeds upper bound for variable " + std::to_string(j));

        // x = offset + map * z with z >= 0; finite bounds shift, free variables split.
        Eigen::VectorXd offset = Eigen::VectorXd::Zero(n);
        std::vector<std::pair<Eigen::Index, double>> columns; // (original variable, sign)
        std::vector<std::pair<Eigen::Index, double>> span_rows; // (standard column, upper - lower)
        for (Eigen::Index j = 0; j < n; ++j)
        {
            const bool has_lo = std::isfinite(prob.lower(j));
            const bool has_hi = std::isfinite(prob.upper(j));
            if (has_lo)
            {
                offset(j) = prob.lower(j);
                if (has_hi)
                    span_rows.emplace_back(static_cast<Eigen::Index>(columns.size()), prob.upper(j) - prob.lower(j));
                columns.emplace_back(j, 1.0);
            }
            else if (has_hi)
            {
                offset(j) = prob.upper(j);
                columns.emplace_back(j, -1.0);
            }
            else
            {
                columns.emplace_back(j, 1.0);
                columns.emplace_back(j, -1.0);
            }
        }

        const Eigen::Index n_std = static_cast<Eigen::Index>(columns.size());
        Eigen::MatrixXd map = Eigen::MatrixXd::Zero(n, n_std);
        for (Eigen::Index k = 0; k < n_std; ++k)
            map(columns[k].first, k) = columns[k].second;

        const Eigen::Index m_user = prob.rows.rows();
        const Eigen::Index m_std = m_user + static_cast<Eigen::Index>(span_rows.size());
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m_std, n_std);
        Eigen::VectorXd b(m_std);
        if (m_user > 0)
        {
            A.topRows(m_user) = prob.rows * map;
            b.head(m_user) = prob.rhs - prob.rows * offset;
        }
        for (std::size_t k = 0; k < span_rows.size(); ++k)
        {
            A(m_user + static_cast<Eigen::Index>(k), span_rows[k].first) = 1.0;
            b(m_user + static_cast<Eigen::Index>(k)) = span_rows[k].second;
        }
        // Row equilibration keeps pivot tolerances meaningful.
        for (Eigen::Index i = 0; i < m_std; ++i)
        {
            const double s = A.row(i).cwiseAbs().maxCoeff();
            if (s > 0.0)
            {
                A.row(i) /= s;
                b(i) /= s;
            }
        }
        const Eigen::VectorXd c = map.transpose() * prob.objective;

        Dictionary dict(A, b, c, tol.max_iters);
        Eigen::VectorXd z;
        double value = 0.0;
        LpSolution sol;
        sol.status = dict.solve(z, value);
        sol.iterations = dict.pivots();
        if (sol.status == SolveStatus::Infeasible)
            return sol;
        sol.x = offset + map * z;
        sol.objective = prob.objective.dot(sol.x);
        return sol;
    }
}
