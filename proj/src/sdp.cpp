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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace hr6dma::convex
{
    namespace
    {
        using Eigen::Index;
        using Eigen::MatrixXcd;
        using Eigen::MatrixXd;
        using Eigen::VectorXcd;
        using Eigen::VectorXd;

        double hermitian_defect(const MatrixXcd &M)
        {
            if (M.size() == 0)
                return 0.0;
            return (M - M.adjoint()).cwiseAbs().maxCoeff() / std::max(1.0, M.cwiseAbs().maxCoeff());
        }

        MatrixXcd hermitian_part(const MatrixXcd &M) { return 0.5 * (M + M.adjoint()); }

        // Largest step alpha with X + alpha * dX >= 0 for X > 0.
        double max_psd_step(const MatrixXcd &X, const MatrixXcd &dX)
        {
            Eigen::LLT<MatrixXcd> llt(X);
            if (llt.info() != Eigen::Success)
                return 0.0;
            const MatrixXcd L = llt.matrixL();
            MatrixXcd T = L.triangularView<Eigen::Lower>().solve(dX);
            T = L.triangularView<Eigen::Lower>().solve(T.adjoint().eval()).adjoint();
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitian_part(T), Eigen::EigenvaluesOnly);
            const double lmin = es.eigenvalues()(0);
            return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
        }

        double max_lp_step(const VectorXd &x, const VectorXd &dx)
        {
            double alpha = std::numeric_limits<double>::infinity();
            for (Index i = 0; i < x.size(); ++i)
                if (dx(i) < 0.0)
                    alpha = std::min(alpha, -x(i) / dx(i));
            return alpha;
        }

        // Gain rows as blocks of rank-one factors: constraint q owns columns [start[q], start[q+1]).
        struct FactorSet
        {
            MatrixXcd F;
            std::vector<Index> start{0};

            Index count() const { return static_cast<Index>(start.size()) - 1; }
            bool rank_one() const { return F.cols() == count(); }

            void append(const MatrixXcd &cols)
            {
                const Index k0 = F.cols();
                F.conservativeResize(cols.rows(), k0 + cols.cols());
                F.rightCols(cols.cols()) = cols;
                start.push_back(k0 + cols.cols());
            }

            FactorSet subset(const std::vector<Index> &rows) const
            {
                FactorSet out;
                out.F.resize(F.rows(), 0);
                for (Index q : rows)
                    out.append(F.middleCols(start[q], start[q + 1] - start[q]));
                return out;
            }

            // Re Tr(A_q M) for every row.
            VectorXd traces(const MatrixXcd &M) const
            {
                const MatrixXcd MF = M * F;
                const VectorXd per_col = (F.conjugate().cwiseProduct(MF)).colwise().sum().real().transpose();
                return aggregate(per_col);
            }

            VectorXd aggregate(const VectorXd &per_col) const
            {
                if (rank_one())
                    return per_col;
                VectorXd out(count());
                for (Index q = 0; q < count(); ++q)
                    out(q) = per_col.segment(start[q], start[q + 1] - start[q]).sum();
                return out;
            }

            VectorXd expand(const VectorXd &per_row) const
            {
                if (rank_one())
                    return per_row;
                VectorXd out(F.cols());
                for (Index q = 0; q < count(); ++q)
                    out.segment(start[q], start[q + 1] - start[q]).setConstant(per_row(q));
                return out;
            }
        };

        struct IpmResult
        {
            MatrixXcd X;
            double tau = 0.0;
            SolveStatus status = SolveStatus::IterLimit;
            int iterations = 0;
        };

        // min Re Tr(Cm X) - tau  s.t.  Tr(A_q X) - tau - s_q = 0,  X_kk = d,  X >= 0, tau, s >= 0.
        // Without coupling the tau/s block and the gain rows are absent.
        class HkmSolver
        {
        public:
            HkmSolver(const FactorSet &gains, const MatrixXcd &Cmin, double diag_value, bool coupled,
                      const SolverTolerances &tol)
                : g_(gains), C_(Cmin), d_(diag_value), coupled_(coupled), tol_(tol),
                  n_(Cmin.rows()), nq_(coupled ? gains.count() : 0), m_(nq_ + n_), p_(coupled ? nq_ + 1 : 0)
            {
                b_ = VectorXd::Zero(m_);
                b_.tail(n_).setConstant(d_);
                c_ = VectorXd::Zero(p_);
                if (coupled_)
                    c_(0) = -1.0;
            }

            IpmResult run()
            {
                double a_norm = 1.0;
                if (nq_ > 0)
                    a_norm = std::max(a_norm, g_.F.colwise().squaredNorm().maxCoeff());
                const double xi = std::max({10.0, std::sqrt(static_cast<double>(n_)), (1.0 + d_) / 2.0});
                const double eta = std::max({10.0, std::sqrt(static_cast<double>(n_)), C_.norm(), a_norm});
                X_ = xi * MatrixXcd::Identity(n_, n_);
                Z_ = eta * MatrixXcd::Identity(n_, n_);
                x_ = VectorXd::Constant(p_, xi);
                z_ = VectorXd::Constant(p_, eta);
                y_ = VectorXd::Zero(m_);

                const double b_norm = b_.norm();
                const double c_norm = std::sqrt(C_.squaredNorm() + c_.squaredNorm());
                IpmResult res;
                int stalls = 0;
                int polish = 0;
                bool converged = false;
                for (int it = 0; it < tol_.max_iters; ++it)
                {
                    res.iterations = it;
                    Eigen::LLT<MatrixXcd> zllt(Z_);
                    if (zllt.info() != Eigen::Success)
                        break;
                    Zi_ = zllt.solve(MatrixXcd::Identity(n_, n_));
                    Zi_ = hermitian_part(Zi_);

                    rp_ = b_ - op_W(X_) - op_L(x_);
                    Rd_ = hermitian_part(C_ - adj_W(y_) - Z_);
                    rd_ = c_ - adj_L(y_) - z_;

                    const double pobj = (C_.cwiseProduct(X_.conjugate())).sum().real() + c_.dot(x_);
                    const double dobj = b_.dot(y_);
                    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
                    const double pinf = rp_.norm() / (1.0 + b_norm);
                    const double dinf = std::sqrt(Rd_.squaredNorm() + rd_.squaredNorm()) / (1.0 + c_norm);
                    if (gap <= tol_.gap_tol && pinf <= tol_.feas_tol && dinf <= tol_.feas_tol)
                    {
                        // Converged; a few extra steps bring the absolute gap under feas_tol.
                        converged = true;
                        res.status = SolveStatus::Optimal;
                        snapshot(res);
                        if (std::abs(pobj - dobj) <= tol_.feas_tol || ++polish > max_polish_)
                            break;
                    }
                    else if (converged)
                        break;

                    const double mu = ((X_.cwiseProduct(Z_.conjugate())).sum().real() + x_.dot(z_)) /
                                      static_cast<double>(n_ + p_);
                    if (!factor_schur())
                        break;

                    // Predictor.
                    Direction aff = direction(-X_ * Z_, -x_.cwiseProduct(z_));
                    const double ap_aff = std::min(1.0, step_primal(aff));
                    const double ad_aff = std::min(1.0, step_dual(aff));
                    const MatrixXcd Xa = X_ + ap_aff * aff.dX;
                    const MatrixXcd Za = Z_ + ad_aff * aff.dZ;
                    const double mu_aff =
                        ((Xa.cwiseProduct(Za.conjugate())).sum().real() +
                         (x_ + ap_aff * aff.dx).dot(z_ + ad_aff * aff.dz)) /
                        static_cast<double>(n_ + p_);
                    const double sigma = std::clamp(std::pow(mu_aff / std::max(mu, 1e-300), 3.0), 0.0, 1.0);

                    // Corrector.
                    MatrixXcd Rc = sigma * mu * MatrixXcd::Identity(n_, n_) - X_ * Z_ - aff.dX * aff.dZ;
                    VectorXd rc = VectorXd::Constant(p_, sigma * mu) - x_.cwiseProduct(z_) -
                                  aff.dx.cwiseProduct(aff.dz);
                    Direction dir = direction(Rc, rc);

                    const double gamma = 0.9 + 0.09 * std::min(ap_aff, ad_aff);
                    const double ap = std::min(1.0, gamma * step_primal(dir));
                    const double ad = std::min(1.0, gamma * step_dual(dir));
                    if (ap < 1e-12 && ad < 1e-12)
                    {
                        if (++stalls > 3)
                            break;
                    }
                    X_ = hermitian_part(X_ + ap * dir.dX);
                    x_ += ap * dir.dx;
                    Z_ = hermitian_part(Z_ + ad * dir.dZ);
                    z_ += ad * dir.dz;
                    y_ += ad * dir.dy;
                    res.iterations = it + 1;
                }
                if (!converged)
                    snapshot(res);
                return res;
            }

        private:
            static constexpr int max_polish_ = 5;

            void snapshot(IpmResult &res) const
            {
                res.X = X_;
                res.tau = coupled_ ? x_(0) : 0.0;
            }

            struct Direction
            {
                MatrixXcd dX, dZ;
                VectorXd dx, dz, dy;
            };

            VectorXd op_W(const MatrixXcd &G) const
            {
                VectorXd out(m_);
                if (nq_ > 0)
                    out.head(nq_) = g_.traces(G);
                out.tail(n_) = G.diagonal().real();
                return out;
            }

            MatrixXcd adj_W(const VectorXd &y) const
            {
                MatrixXcd out = MatrixXcd::Zero(n_, n_);
                if (nq_ > 0)
                {
                    const VectorXd yk = g_.expand(y.head(nq_));
                    out = g_.F * yk.asDiagonal() * g_.F.adjoint();
                }
                out.diagonal() += y.tail(n_).cast<std::complex<double>>();
                return out;
            }

            // Rows q: -tau - s_q.
            VectorXd op_L(const VectorXd &x) const
            {
                VectorXd out = VectorXd::Zero(m_);
                if (coupled_)
                    out.head(nq_) = -x(0) * VectorXd::Ones(nq_) - x.tail(nq_);
                return out;
            }

            VectorXd adj_L(const VectorXd &y) const
            {
                VectorXd out(p_);
                if (coupled_)
                {
                    out(0) = -y.head(nq_).sum();
                    out.tail(nq_) = -y.head(nq_);
                }
                return out;
            }

            bool factor_schur()
            {
                MatrixXd M = MatrixXd::Zero(m_, m_);
                // Diagonal rows: Re(X_kl Zi_lk).
                M.bottomRightCorner(n_, n_) = X_.cwiseProduct(Zi_.transpose()).real();
                if (nq_ > 0)
                {
                    const MatrixXcd XF = X_ * g_.F;
                    const MatrixXcd ZF = Zi_ * g_.F;
                    const MatrixXcd P = g_.F.adjoint() * XF;
                    const MatrixXcd R = g_.F.adjoint() * ZF;
                    const MatrixXd PR = P.cwiseProduct(R.transpose()).real();
                    const MatrixXd cross = XF.conjugate().cwiseProduct(ZF).real(); // n x K
                    if (g_.rank_one())
                    {
                        M.topLeftCorner(nq_, nq_) = PR;
                        M.topRightCorner(nq_, n_) = cross.transpose();
                    }
                    else
                    {
                        for (Index i = 0; i < nq_; ++i)
                        {
                            const Index si = g_.start[i], li = g_.start[i + 1] - si;
                            for (Index j = 0; j < nq_; ++j)
                            {
                                const Index sj = g_.start[j], lj = g_.start[j + 1] - sj;
                                M(i, j) = PR.block(si, sj, li, lj).sum();
                            }
                            M.block(i, nq_, 1, n_) = cross.middleCols(si, li).rowwise().sum().transpose();
                        }
                    }
                    M.bottomLeftCorner(n_, nq_) = M.topRightCorner(nq_, n_).transpose();
                    // tau couples every gain row; slacks sit on the diagonal.
                    M.topLeftCorner(nq_, nq_).array() += x_(0) / z_(0);
                    M.topLeftCorner(nq_, nq_).diagonal() += x_.tail(nq_).cwiseQuotient(z_.tail(nq_));
                }
                M = 0.5 * (M + M.transpose());
                schur_.compute(M);
                if (schur_.info() == Eigen::Success)
                {
                    use_ldlt_ = false;
                    return true;
                }
                M.diagonal().array() += 1e-14 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
                schur_ldlt_.compute(M);
                use_ldlt_ = true;
                return schur_ldlt_.info() == Eigen::Success;
            }

            Direction direction(const MatrixXcd &Rc, const VectorXd &rc) const
            {
                Direction dir;
                const MatrixXcd G = (Rc - X_ * Rd_) * Zi_;
                VectorXd rhs = rp_ - op_W(G);
                if (p_ > 0)
                    rhs -= op_L((rc - x_.cwiseProduct(rd_)).cwiseQuotient(z_));
                dir.dy = use_ldlt_ ? VectorXd(schur_ldlt_.solve(rhs)) : VectorXd(schur_.solve(rhs));
                dir.dZ = Rd_ - adj_W(dir.dy);
                dir.dX = hermitian_part((Rc - X_ * dir.dZ) * Zi_);
                if (p_ > 0)
                {
                    dir.dz = rd_ - adj_L(dir.dy);
                    dir.dx = (rc - x_.cwiseProduct(dir.dz)).cwiseQuotient(z_);
                }
                else
                {
                    dir.dz = VectorXd(0);
                    dir.dx = VectorXd(0);
                }
                return dir;
            }

            double step_primal(const Direction &dir) const
            {
                return std::min(max_psd_step(X_, dir.dX), max_lp_step(x_, dir.dx));
            }

            double step_dual(const Direction &dir) const
            {
                return std::min(max_psd_step(Z_, dir.dZ), max_lp_step(z_, dir.dz));
            }

            const FactorSet &g_;
            MatrixXcd C_;
            double d_;
            bool coupled_;
            SolverTolerances tol_;
            Index n_, nq_, m_, p_;
            VectorXd b_, c_;

            MatrixXcd X_, Z_, Zi_, Rd_;
            VectorXd x_, z_, y_, rp_, rd_;
            Eigen::LLT<MatrixXd> schur_;
            Eigen::LDLT<MatrixXd> schur_ldlt_;
            bool use_ldlt_ = false;
        };

        FactorSet build_factors(const SdpProblem &prob)
        {
            const Index n = prob.dim;
            FactorSet fs;
            fs.F.resize(n, 0);
            if (prob.gain_vectors.size() > 0)
            {
                if (prob.gain_vectors.rows() != n)
                    throw StructuralError("solve_sdp: gain_vectors must have dim rows");
                fs.F = prob.gain_vectors;
                fs.start.resize(static_cast<std::size_t>(prob.gain_vectors.cols()) + 1);
                std::iota(fs.start.begin(), fs.start.end(), Index{0});
            }
            for (std::size_t k = 0; k < prob.gain_matrices.size(); ++k)
            {
                const MatrixXcd &A = prob.gain_matrices[k];
                const std::string name = "solve_sdp: gain_matrices[" + std::to_string(k) + "]";
                if (A.rows() != n || A.cols() != n)
                    throw StructuralError(name + " has wrong shape");
                if (hermitian_defect(A) > 1e-12)
                    throw StructuralError(name + " is not Hermitian");
                Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitian_part(A));
                const VectorXd lam = es.eigenvalues();
                const double scale = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
                if (lam(0) < -1e-12 * std::max(1.0, scale))
                    throw StructuralError(name + " is not positive semidefinite");
                std::vector<Index> keep;
                for (Index i = 0; i < n; ++i)
                    if (lam(i) > 1e-14 * scale)
                        keep.push_back(i);
                MatrixXcd cols(n, static_cast<Index>(keep.size()));
                for (std::size_t i = 0; i < keep.size(); ++i)
                    cols.col(static_cast<Index>(i)) = es.eigenvectors().col(keep[i]) * std::sqrt(lam(keep[i]));
                fs.append(cols);
            }
            return fs;
        }

        std::vector<Index> initial_rows(Index total, Index n)
        {
            const Index want = std::min(total, std::max<Index>(12, 2 * n));
            std::vector<Index> rows;
            for (Index k = 0; k < want; ++k)
            {
                const Index q = want == 1 ? 0 : (k * (total - 1)) / (want - 1);
                if (rows.empty() || rows.back() != q)
                    rows.push_back(q);
            }
            return rows;
        }

        // Scale rows/cols so the diagonal equals d exactly; preserves PSD.
        MatrixXcd fix_diagonal(const MatrixXcd &X, double d)
        {
            VectorXd s(X.rows());
            for (Index k = 0; k < X.rows(); ++k)
            {
                const double xkk = X(k, k).real();
                s(k) = xkk > 0.0 ? std::sqrt(d / xkk) : 1.0;
            }
            MatrixXcd W = s.asDiagonal() * X * s.asDiagonal();
            W = hermitian_part(W);
            for (Index k = 0; k < W.rows(); ++k)
                W(k, k) = d;
            return W;
        }
    }

    SdpSolution solve_sdp(const SdpProblem &prob, const SolverTolerances &tol)
    {
        tol.validate();
        if (prob.dim < 1)
            throw StructuralError("solve_sdp: dim must be >= 1");
        if (!(prob.diag_value > 0.0))
            throw StructuralError("solve_sdp: diag_value must be positive");
        const Index n = prob.dim;
        MatrixXcd C = MatrixXcd::Zero(n, n);
        if (prob.objective.size() > 0)
        {
            if (prob.objective.rows() != n || prob.objective.cols() != n)
                throw StructuralError("solve_sdp: objective matrix has wrong shape");
            if (hermitian_defect(prob.objective) > 1e-12)
                throw StructuralError("solve_sdp: objective matrix is not Hermitian");
            C = hermitian_part(prob.objective);
        }
        const FactorSet all = build_factors(prob);

        SdpSolution sol;
        bool coupled = prob.tau_coupled;
        if (coupled)
        {
            if (all.count() == 0)
            {
                sol.status = SolveStatus::Unbounded;
                return sol;
            }
            // A vanishing gain row pins tau at zero and removes the strictly feasible interior.
            const VectorXd norms = all.aggregate(all.F.colwise().squaredNorm().transpose());
            const double ref = std::max(norms.maxCoeff(), 1e-300);
            if (norms.minCoeff() <= 1e-14 * ref)
                coupled = false;
        }

        const MatrixXcd Cmin = -C;
        if (!coupled)
        {
            const FactorSet none;
            HkmSolver ipm(none, Cmin, prob.diag_value, false, tol);
            IpmResult r = ipm.run();
            sol.W = fix_diagonal(r.X, prob.diag_value);
            sol.status = r.status;
            sol.iterations = r.iterations;
            sol.cut_rounds = 1;
            sol.tau = 0.0;
            sol.objective = (C.cwiseProduct(sol.W.conjugate())).sum().real();
            return sol;
        }

        std::vector<Index> active = initial_rows(all.count(), n);
        std::vector<char> in_set(static_cast<std::size_t>(all.count()), 0);
        for (Index q : active)
            in_set[static_cast<std::size_t>(q)] = 1;
        for (Index q : prob.seed_rows)
        {
            if (q < 0 || q >= all.count())
                throw StructuralError("solve_sdp: seed row out of range");
            if (!in_set[static_cast<std::size_t>(q)])
            {
                in_set[static_cast<std::size_t>(q)] = 1;
                active.push_back(q);
            }
        }

        const int max_rounds = 60;
        for (int round = 0; round < max_rounds; ++round)
        {
            std::sort(active.begin(), active.end());
            const FactorSet sub = all.subset(active);
            HkmSolver ipm(sub, Cmin, prob.diag_value, true, tol);
            IpmResult r = ipm.run();
            sol.iterations += r.iterations;
            sol.cut_rounds = round + 1;
            sol.status = r.status;
            sol.W = fix_diagonal(r.X, prob.diag_value);

            const VectorXd traces = all.traces(sol.W);
            double tau_active = std::numeric_limits<double>::infinity();
            for (Index q : active)
                tau_active = std::min(tau_active, traces(q));
            sol.tau = traces.minCoeff();
            sol.active_constraints = static_cast<int>(active.size());
            sol.active_rows = active;

            const double slack = tol.gap_tol * std::max(1.0, std::abs(tau_active));
            std::vector<std::pair<double, Index>> violated;
            for (Index q = 0; q < all.count(); ++q)
                if (!in_set[static_cast<std::size_t>(q)] && traces(q) < tau_active - slack)
                    violated.emplace_back(traces(q), q);
            if (violated.empty() || r.status != SolveStatus::Optimal)
                break;
            std::sort(violated.begin(), violated.end());
            const std::size_t add = std::min<std::size_t>(violated.size(), static_cast<std::size_t>(std::max<Index>(4, n)));
            for (std::size_t k = 0; k < add; ++k)
            {
                active.push_back(violated[k].second);
                in_set[static_cast<std::size_t>(violated[k].second)] = 1;
            }
            if (round == max_rounds - 1)
                sol.status = SolveStatus::IterLimit;
        }
        sol.objective = sol.tau + (C.cwiseProduct(sol.W.conjugate())).sum().real();
        return sol;
    }

    EigenPair principal_eigpair(const MatrixXcd &W)
    {
        if (W.rows() != W.cols() || W.rows() == 0)
            throw StructuralError("principal_eigpair: matrix must be square and nonempty");
        if (hermitian_defect(W) > 1e-10)
            throw StructuralError("principal_eigpair: matrix is not Hermitian");
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitian_part(W));
        const VectorXd &lam = es.eigenvalues();
        const Index n = W.rows();
        const double lmax = lam(n - 1);
        const double tie_tol = 1e-10 * std::max(W.norm(), 1e-300);

        Index first_tied = n - 1;
        while (first_tied > 0 && lmax - lam(first_tied - 1) <= tie_tol)
            --first_tied;
        const MatrixXcd U = es.eigenvectors().rightCols(n - first_tied);

        VectorXcd v;
        if (U.cols() == 1)
            v = U.col(0);
        else
        {
            // Project the standard basis in order; the first with a clear component wins.
            for (Index k = 0; k < n; ++k)
            {
                VectorXcd proj = U * U.row(k).adjoint();
                if (proj.norm() > 1e-6)
                {
                    v = proj / proj.norm();
                    break;
                }
            }
        }
        Index big = 0;
        for (Index k = 1; k < n; ++k)
            if (std::abs(v(k)) > std::abs(v(big)) * (1.0 + 1e-12))
                big = k;
        if (std::abs(v(big)) > 0.0)
            v *= std::conj(v(big)) / std::abs(v(big));
        v(big) = std::abs(v(big));
        v.normalize();
        return {lmax, v};
    }

    double rank_one_ratio(const MatrixXcd &W)
    {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitian_part(W), Eigen::EigenvaluesOnly);
        const double trace = W.trace().real();
        if (!(trace > 0.0))
            return 0.0;
        return es.eigenvalues().maxCoeff() / trace;
    }
}
