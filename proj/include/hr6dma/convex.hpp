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

#ifndef HR6DMA_CONVEX_HPP
#define HR6DMA_CONVEX_HPP

#include <Eigen/Dense>
#include <string_view>
#include <vector>

namespace hr6dma::convex
{
    enum class SolveStatus
    {
        Optimal,
        Infeasible,
        Unbounded,
        IterLimit,
    };

    std::string_view to_string(SolveStatus status);

    struct SolverTolerances
    {
        double feas_tol = 1e-7;
        double gap_tol = 1e-6;
        int max_iters = 200;

        void validate() const;
    };

    // maximize c^T x  s.t.  rows * x <= rhs,  lower <= x <= upper (entries may be infinite).
    struct LpProblem
    {
        Eigen::VectorXd objective;
        Eigen::MatrixXd rows;
        Eigen::VectorXd rhs;
        Eigen::VectorXd lower;
        Eigen::VectorXd upper;

        // Unconstrained problem with free variables.
        explicit LpProblem(Eigen::Index n_vars = 0);

        Eigen::Index n_vars() const { return objective.size(); }
        void add_constraint(const Eigen::Ref<const Eigen::VectorXd> &row, double bound);
    };

    struct LpSolution
    {
        Eigen::VectorXd x;
        double objective = 0.0;
        SolveStatus status = SolveStatus::IterLimit;
        int iterations = 0;
    };

    // Two-phase dictionary simplex; Dantzig pricing with a switch to Bland's rule on stalls.
    // Throws StructuralError on inconsistent dimensions or lower > upper.
    LpSolution solve_lp(const LpProblem &prob, const SolverTolerances &tol = {});

    // maximize  tau + Re Tr(C W)   s.t.  Tr(A_q W) >= tau,  W_nn = diag_value,  W >= 0  (Hermitian).
    // The gain matrices A_q are rank-one columns of gain_vectors (A_q = g g^H) followed by
    // any general PSD entries of gain_matrices. Without tau coupling the trace rows are ignored.
    struct SdpProblem
    {
        int dim = 0;
        Eigen::MatrixXcd objective;                  // C; empty means zero
        Eigen::MatrixXcd gain_vectors;               // dim x Q
        std::vector<Eigen::MatrixXcd> gain_matrices; // extra PSD A_q
        double diag_value = 1.0;
        bool tau_coupled = true;
        std::vector<Eigen::Index> seed_rows; // gain rows added to the first constraint-generation round

        Eigen::Index n_gain_constraints() const
        {
            return gain_vectors.cols() + static_cast<Eigen::Index>(gain_matrices.size());
        }
    };

    struct SdpSolution
    {
        Eigen::MatrixXcd W;
        double tau = 0.0;       // min_q Tr(A_q W) of the returned W (0 without tau coupling)
        double objective = 0.0; // tau + Re Tr(C W)
        SolveStatus status = SolveStatus::IterLimit;
        int iterations = 0;    // interior-point iterations summed over cuts
        int cut_rounds = 0;    // constraint-generation rounds
        int active_constraints = 0;
        std::vector<Eigen::Index> active_rows; // gain rows of the final round, sorted
    };

    // Primal-dual interior-point method (HKM direction, Mehrotra predictor-corrector) with
    // constraint generation over the gain rows. The returned W has its diagonal fixed exactly.
    // Throws StructuralError on non-Hermitian or indefinite inputs and dimension mismatches.
    SdpSolution solve_sdp(const SdpProblem &prob, const SolverTolerances &tol = {});

    struct EigenPair
    {
        double value = 0.0;
        Eigen::VectorXcd vector;
    };

    // Largest eigenvalue and its unit eigenvector. Ties resolve toward the lowest-index basis
    // vector; the phase makes the largest-magnitude entry real and nonnegative.
    EigenPair principal_eigpair(const Eigen::MatrixXcd &W);

    // lambda_max(W) / Tr(W), in [0, 1] for PSD W.
    double rank_one_ratio(const Eigen::MatrixXcd &W);
}

#endif
