// SPDX-License-Identifier: Apache-2.0
//
// relcomp - blockage-aware CoMP beamforming toolkit
// Copyright (C) 2026 The relcomp authors
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

#ifndef relcomp_kkt_solver_H
#define relcomp_kkt_solver_H

#include "metrics.hpp"

#include <Eigen/Eigenvalues>

#include <functional>

namespace relcomp
{
    enum class InitStrategy
    {
        mrt,
        random
    };

    inline InitStrategy parse_init_strategy(const std::string &s)
    {
        if (s == "mrt")
            return InitStrategy::mrt;
        if (s == "random")
            return InitStrategy::random;
        throw ConfigError("unknown init strategy '" + s + "' (expected mrt or random)");
    }

    inline const char *to_string(InitStrategy s) { return s == InitStrategy::mrt ? "mrt" : "random"; }

    struct SolverOptions
    {
        std::size_t max_iters = 2000;
        double bisection_tol = 1e-7;
        double convergence_tol = 1e-3;
        std::size_t window = 50; // objective-change window of the stopping rule
        double beta = 0.005;
        double psi = 0.05;

        std::size_t sca_max_iters = 30;
        std::size_t inner_max_iters = 5000;
        double inner_tol = 1e-6;

        bool record_trace = true;
    };

    inline SolverOptions solver_options(const SystemConfig &cfg)
    {
        SolverOptions o;
        o.max_iters = cfg.kkt_max_iters;
        o.bisection_tol = cfg.bisection_tol;
        o.convergence_tol = cfg.convergence_tol;
        o.beta = cfg.subgrad_step;
        o.psi = cfg.best_response_step;
        o.sca_max_iters = cfg.sca_max_iters;
        o.inner_max_iters = cfg.sca_inner_max_iters;
        o.inner_tol = cfg.sca_inner_tol;
        return o;
    }

    // a[k][c] >= 0 for the subset SINR constraints, z[b] >= 0 for the per-RRU power constraints.
    struct DualState
    {
        std::vector<std::vector<double>> a;
        std::vector<double> z;
    };

    // Operating point of the first-order expansion.
    struct ScaPoint
    {
        BeamformerSet beams;
        std::vector<double> gammas;
    };

    struct IterationRecord
    {
        std::size_t outer = 0;
        std::size_t iteration = 0;
        double objective = 0.0;     // sum_k w_k ln(1 + min_c SINR_k^c)
        double max_violation = 0.0; // max_{k,c} (gamma_k - SINR_k^c)^+
        std::vector<double> rru_power;
        double min_dual = 0.0;
        double min_gamma = 0.0;
    };

    struct SolverState
    {
        BeamformerSet beams;
        std::vector<double> gammas;
        DualState duals;
        std::size_t iteration = 0;
        std::vector<IterationRecord> trace;
    };

    struct SolverResult
    {
        BeamformerSet beams;
        std::vector<double> gammas;        // pessimistic SINR of the returned beams
        std::vector<double> solver_gammas; // final gamma iterate of the algorithm
        DualState duals;                   // a in noise-normalized units
        std::vector<IterationRecord> trace;
        double objective = 0.0;
        bool converged = false;
        std::size_t iterations = 0;
        std::size_t outer_iterations = 0;
        std::size_t rejected_steps = 0;
    };

    // Per-RRU orthonormal basis Q of span{h_{b,k}}_k with H_b = Q R. Both sides of the
    // beamformer system live in this span, so the Nt x Nt solve reduces to r x r.
    struct RruBasis
    {
        cmat H; // Nt x K
        cmat Q; // Nt x r
        cmat R; // r x K
        std::vector<std::size_t> served;
    };

    // Noise-normalized copy of a problem (h / sigma, sigma^2 = 1) plus per-RRU bases.
    class KktContext
    {
    public:
        explicit KktContext(const Problem &p) : scale_(std::sqrt(p.noise))
        {
            prob_ = p;
            for (auto &v : prob_.h)
                v /= scale_;
            prob_.noise = 1.0;

            const std::size_t B = p.num_rrus(), K = p.num_users(), nt = p.antennas();
            for (std::size_t b = 0; b < B; ++b)
            {
                RruBasis rb;
                rb.H.resize(nt, K);
                for (std::size_t k = 0; k < K; ++k)
                {
                    rb.H.col(k) = prob_.h(b, k);
                    if (prob_.serves(b, k))
                        rb.served.push_back(k);
                }
                Eigen::SelfAdjointEigenSolver<cmat> es(rb.H.adjoint() * rb.H);
                const auto &mu = es.eigenvalues();
                const double top = mu.size() ? mu.maxCoeff() : 0.0;
                std::vector<Eigen::Index> keep;
                for (Eigen::Index i = 0; i < mu.size(); ++i)
                    if (top > 0.0 && mu[i] > 1e-12 * top)
                        keep.push_back(i);
                rb.Q.resize(nt, Eigen::Index(keep.size()));
                rb.R.resize(Eigen::Index(keep.size()), K);
                for (std::size_t i = 0; i < keep.size(); ++i)
                {
                    const double s = std::sqrt(mu[keep[i]]);
                    rb.Q.col(i) = rb.H * es.eigenvectors().col(keep[i]) / s;
                    rb.R.row(i) = s * es.eigenvectors().col(keep[i]).adjoint();
                }
                rru_.push_back(std::move(rb));
            }

            for (std::size_t k = 0; k < K; ++k)
            {
                double amp = 0.0;
                for (auto b : prob_.serving[k])
                    amp += std::sqrt(prob_.power[b]) * prob_.h(b, k).norm();
                gamma_ub_.push_back(amp * amp);
            }
        }

        const Problem &problem() const { return prob_; }
        double scale() const { return scale_; }
        const RruBasis &rru(std::size_t b) const { return rru_.at(b); }
        double gamma_ub(std::size_t k) const { return gamma_ub_.at(k); }

    private:
        Problem prob_;
        double scale_;
        std::vector<RruBasis> rru_;
        std::vector<double> gamma_ub_;
    };

    // All link inner products and subset quantities of one beamformer set.
    struct LinkSums
    {
        std::vector<cmat> P;                         // P[b](k, j) = h_{b,k}^H f_{b,j}
        std::vector<std::vector<cvec>> s;            // s[k][c](j) = sum_{b in G_k^c} P[b](k, j)
        std::vector<std::vector<double>> sinr;       // [k][c]
        std::vector<std::vector<double>> received;   // [k][c] = 1 + sum_j |s|^2
        std::vector<double> pessimistic;             // min_c sinr
    };

    inline LinkSums compute_sums(const KktContext &ctx, const BeamformerSet &f)
    {
        const Problem &p = ctx.problem();
        const std::size_t B = p.num_rrus(), K = p.num_users();
        const Eigen::Index nt = Eigen::Index(p.antennas());
        LinkSums ls;
        ls.P.resize(B);
        cmat F(nt, K);
        for (std::size_t b = 0; b < B; ++b)
        {
            for (std::size_t j = 0; j < K; ++j)
                F.col(j) = f(b, j);
            ls.P[b].noalias() = ctx.rru(b).H.adjoint() * F;
        }
        ls.s.resize(K);
        ls.sinr.resize(K);
        ls.received.resize(K);
        ls.pessimistic.assign(K, 0.0);
        for (std::size_t k = 0; k < K; ++k)
        {
            const auto &fam = p.family[k];
            double pess = std::numeric_limits<double>::infinity();
            for (const auto &e : fam)
            {
                cvec s = cvec::Zero(K);
                for (std::size_t b = 0; b < B; ++b)
                    if (e.mask[b])
                        s += ls.P[b].row(k).transpose();
                double total = 1.0, sig = std::norm(s[k]);
                for (std::size_t j = 0; j < K; ++j)
                    total += std::norm(s[j]);
                const double g = sig / (total - sig);
                ls.s[k].push_back(std::move(s));
                ls.sinr[k].push_back(g);
                ls.received[k].push_back(total);
                pess = std::min(pess, g);
            }
            ls.pessimistic[k] = pess;
        }
        return ls;
    }

    inline double objective_value(const std::vector<double> &pessimistic, const std::vector<double> &weights)
    {
        return weighted_sum_rate(pessimistic, weights);
    }

    namespace detail
    {
        // Beamformer system of one (b, k) diagonalized in the RRU basis:
        // f = Q E diag(1 / (z + lambda)) c.
        struct ReducedSystem
        {
            std::size_t user = 0;
            Eigen::VectorXd lambda;
            cmat E;
            cvec c;
        };

        inline double denom(double z, double lambda) { return std::max(z + std::max(lambda, 0.0), 1e-12); }

        // Right-hand side t_{b,k} expressed as weights w on the columns of H_b. `point` supplies the
        // expansion terms, `cur` the frozen cross-RRU couplings of the current iterate.
        inline cvec rhs_weights(const KktContext &ctx, std::size_t b, std::size_t k, const DualState &duals,
                                const LinkSums &point, const std::vector<double> &point_gamma, const LinkSums &cur)
        {
            const Problem &p = ctx.problem();
            const std::size_t K = p.num_users();
            cvec w = cvec::Zero(K);
            for (std::size_t j = 0; j < K; ++j)
            {
                const double g1 = 1.0 + point_gamma[j];
                const auto &fam = p.family[j];
                for (std::size_t c = 0; c < fam.size(); ++c)
                {
                    if (!fam[c].mask[b])
                        continue;
                    const double a = duals.a[j][c];
                    if (a == 0.0)
                        continue;
                    w[j] += a * point.s[j][c][k] / g1;
                    if (j != k)
                        w[j] -= a * (cur.s[j][c][k] - cur.P[b](j, k));
                }
            }
            return w;
        }

        // alpha_u = sum of a_{u,c} over subsets in which RRU b is not blocked
        inline Eigen::VectorXd interference_weights(const KktContext &ctx, std::size_t b, const DualState &duals)
        {
            const Problem &p = ctx.problem();
            Eigen::VectorXd alpha = Eigen::VectorXd::Zero(Eigen::Index(p.num_users()));
            for (std::size_t u = 0; u < p.num_users(); ++u)
                for (std::size_t c = 0; c < p.family[u].size(); ++c)
                    if (p.family[u][c].mask[b])
                        alpha[u] += duals.a[u][c];
            return alpha;
        }

        inline ReducedSystem reduce(const RruBasis &rb, std::size_t k, const Eigen::VectorXd &alpha, const cvec &w)
        {
            ReducedSystem rs;
            rs.user = k;
            const Eigen::Index r = rb.R.rows();
            if (r == 0)
                return rs;
            Eigen::VectorXd d = alpha;
            d[k] = 0.0;
            const cmat M = rb.R * d.asDiagonal() * rb.R.adjoint();
            Eigen::SelfAdjointEigenSolver<cmat> es(M);
            rs.lambda = es.eigenvalues();
            rs.E = es.eigenvectors();
            rs.c = rs.E.adjoint() * (rb.R * w);
            return rs;
        }

        inline double reduced_power(const ReducedSystem &rs, double z)
        {
            double p = 0.0;
            for (Eigen::Index i = 0; i < rs.c.size(); ++i)
            {
                const double d = denom(z, rs.lambda[i]);
                p += std::norm(rs.c[i]) / (d * d);
            }
            return p;
        }

        inline cvec reduced_beam(const RruBasis &rb, const ReducedSystem &rs, double z)
        {
            if (rs.c.size() == 0)
                return cvec::Zero(rb.H.rows());
            cvec y(rs.c.size());
            for (Eigen::Index i = 0; i < rs.c.size(); ++i)
                y[i] = rs.c[i] / denom(z, rs.lambda[i]);
            return rb.Q * (rs.E * y);
        }

        // Smallest z >= 0 with total power <= P_b (within tol * P_b from above when z > 0).
        inline double bisect(const std::vector<ReducedSystem> &sys, double P, double tol, std::size_t b)
        {
            auto power = [&](double z)
            {
                double s = 0.0;
                for (const auto &rs : sys)
                    s += reduced_power(rs, z);
                return s;
            };
            if (power(0.0) <= P)
                return 0.0;
            double lo = 0.0, hi = 1.0;
            std::size_t n = 0;
            while (power(hi) >= P)
            {
                lo = hi;
                hi *= 2.0;
                if (++n > 2000 || !std::isfinite(hi))
                    throw SolverError("power-dual bisection: no upper bracket for RRU " + std::to_string(b) +
                                      " (last z = " + std::to_string(hi) + ")");
            }
            for (n = 0; n < 300; ++n)
            {
                const double ph = power(hi);
                if (P - ph <= tol * P)
                    return hi;
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi)
                    return hi; // bracket exhausted at double precision
                if (power(mid) > P)
                    lo = mid;
                else
                    hi = mid;
            }
            throw SolverError("power-dual bisection did not converge for RRU " + std::to_string(b) + ", bracket [" +
                              std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }

        struct RruResponse
        {
            double z = 0.0;
            std::vector<cvec> f; // indexed by user, zero for users not served by b
        };

        inline RruResponse rru_response(const KktContext &ctx, std::size_t b, const DualState &duals,
                                        const LinkSums &point, const std::vector<double> &point_gamma,
                                        const LinkSums &cur, double tol)
        {
            const Problem &p = ctx.problem();
            const RruBasis &rb = ctx.rru(b);
            RruResponse out;
            out.f.assign(p.num_users(), cvec::Zero(Eigen::Index(p.antennas())));
            if (rb.served.empty())
                return out;
            const Eigen::VectorXd alpha = interference_weights(ctx, b, duals);
            std::vector<ReducedSystem> sys;
            for (auto k : rb.served)
                sys.push_back(reduce(rb, k, alpha, rhs_weights(ctx, b, k, duals, point, point_gamma, cur)));
            out.z = bisect(sys, p.power[b], tol, b);
            for (const auto &rs : sys)
                out.f[rs.user] = reduced_beam(rb, rs, out.z);
            return out;
        }

        inline double clamp_gamma(const KktContext &ctx, std::size_t k, double weight, double den, double point_gamma)
        {
            const double ub = ctx.gamma_ub(k);
            if (weight <= 0.0)
                return 0.0;
            if (!(den > 0.0))
                return ub;
            const double g = weight * (1.0 + point_gamma) * (1.0 + point_gamma) / den - 1.0;
            return std::clamp(g, 0.0, ub);
        }

        inline IterationRecord make_record(const KktContext &ctx, std::size_t outer, std::size_t it,
                                           const BeamformerSet &f, const LinkSums &ls,
                                           const std::vector<double> &gammas, const DualState &duals)
        {
            const Problem &p = ctx.problem();
            IterationRecord r;
            r.outer = outer;
            r.iteration = it;
            r.objective = objective_value(ls.pessimistic, p.weights);
            r.min_dual = std::numeric_limits<double>::infinity();
            r.min_gamma = gammas.empty() ? 0.0 : *std::min_element(gammas.begin(), gammas.end());
            for (std::size_t k = 0; k < p.num_users(); ++k)
                for (std::size_t c = 0; c < ls.sinr[k].size(); ++c)
                {
                    r.max_violation = std::max(r.max_violation, gammas[k] - ls.sinr[k][c]);
                    r.min_dual = std::min(r.min_dual, duals.a[k][c]);
                }
            for (double z : duals.z)
                r.min_dual = std::min(r.min_dual, z);
            for (std::size_t b = 0; b < p.num_rrus(); ++b)
                r.rru_power.push_back(rru_power(f, b));
            return r;
        }

        // Spread of the objective over the last window + 1 values, relative to the latest value.
        inline bool window_converged(const std::vector<double> &obj, std::size_t window, double tol)
        {
            if (obj.size() <= window)
                return false;
            const auto first = obj.end() - std::ptrdiff_t(window) - 1;
            const auto [lo, hi] = std::minmax_element(first, obj.end());
            return *hi - *lo <= tol * std::max(std::abs(obj.back()), 1e-12);
        }
    }

    // Feasible starting beams (each RRU splits P_b equally over its served users), the pessimistic
    // SINR of those beams, and duals a = w_k (1 + gamma_k) pi_c / (1 + sum_j |s_{k,c,j}|^2) so the
    // first gamma update reproduces gamma^(0). The share pi_c is 1/(2C) for every subset except the
    // tightest one, which takes the rest.
    template <class Rng>
    SolverState init_feasible(const KktContext &ctx, InitStrategy strategy, Rng &rng)
    {
        const Problem &p = ctx.problem();
        const std::size_t B = p.num_rrus(), K = p.num_users(), nt = p.antennas();
        SolverState st;
        st.beams = zero_beams(B, K, nt);
        for (std::size_t b = 0; b < B; ++b)
        {
            const auto &served = ctx.rru(b).served;
            if (served.empty())
                continue;
            const double amp = std::sqrt(p.power[b] / double(served.size()));
            for (auto k : served)
            {
                cvec v;
                if (strategy == InitStrategy::mrt)
                    v = p.h(b, k);
                else
                {
                    v.resize(Eigen::Index(nt));
                    for (std::size_t n = 0; n < nt; ++n)
                        v[n] = complex_normal(rng);
                }
                const double nv = v.norm();
                st.beams(b, k) = nv > 0.0 ? cvec(amp * v / nv) : cvec::Zero(Eigen::Index(nt));
            }
        }
        const LinkSums ls = compute_sums(ctx, st.beams);
        st.gammas = ls.pessimistic;
        st.duals.z.assign(B, 0.0);
        st.duals.a.resize(K);
        for (std::size_t k = 0; k < K; ++k)
        {
            const std::size_t C = ls.sinr[k].size();
            const double w = p.weights[k] > 0.0 ? p.weights[k] : 1.0;
            const std::size_t cmin = std::size_t(std::min_element(ls.sinr[k].begin(), ls.sinr[k].end()) - ls.sinr[k].begin());
            for (std::size_t c = 0; c < C; ++c)
            {
                const double slack_share = 0.5 / double(C);
                const double share = c == cmin ? 1.0 - slack_share * double(C - 1) : slack_share;
                st.duals.a[k].push_back(w * (1.0 + st.gammas[k]) * share / ls.received[k][c]);
            }
        }
        return st;
    }

    // Solution of (z I + sum_{u != k} alpha_{b,u} h_{b,u} h_{b,u}^H) f = t_{b,k} for a given z.
    inline cvec beamformer_star(const KktContext &ctx, std::size_t b, std::size_t k, const SolverState &state,
                                const ScaPoint &point, double z)
    {
        const LinkSums pt = compute_sums(ctx, point.beams);
        const LinkSums cur = compute_sums(ctx, state.beams);
        const RruBasis &rb = ctx.rru(b);
        const auto alpha = detail::interference_weights(ctx, b, state.duals);
        const auto rs = detail::reduce(rb, k, alpha, detail::rhs_weights(ctx, b, k, state.duals, pt, point.gammas, cur));
        return detail::reduced_beam(rb, rs, z);
    }

    // Right-hand side t_{b,k} of the system above, in the Nt-dimensional space.
    inline cvec beamformer_rhs(const KktContext &ctx, std::size_t b, std::size_t k, const SolverState &state,
                               const ScaPoint &point)
    {
        const LinkSums pt = compute_sums(ctx, point.beams);
        const LinkSums cur = compute_sums(ctx, state.beams);
        return ctx.rru(b).H * detail::rhs_weights(ctx, b, k, state.duals, pt, point.gammas, cur);
    }

    inline double bisect_power_dual(const KktContext &ctx, std::size_t b, const SolverState &state,
                                    const ScaPoint &point, double tol)
    {
        if (!(tol > 0.0))
            throw ContractViolation("bisect_power_dual: tol must be positive");
        const LinkSums pt = compute_sums(ctx, point.beams);
        const LinkSums cur = compute_sums(ctx, state.beams);
        return detail::rru_response(ctx, b, state.duals, pt, point.gammas, cur, tol).z;
    }

    // f + psi (f* - f)
    inline BeamformerSet best_response_step(const BeamformerSet &f, const BeamformerSet &f_star, double psi)
    {
        BeamformerSet out = f;
        for (std::size_t b = 0; b < f.rows(); ++b)
            for (std::size_t k = 0; k < f.cols(); ++k)
                out(b, k) = f(b, k) + psi * (f_star(b, k) - f(b, k));
        return out;
    }

    // gamma = w (1 + point_gamma)^2 / sum_c a_c A_c - 1, clamped below at 0, where
    // A_c = sigma^2 + sum_j |hbar_k^c^H fbar_j|^2 at the expansion point.
    inline double gamma_update(double weight, const std::vector<double> &a, const std::vector<double> &received,
                               double point_gamma)
    {
        if (a.size() != received.size())
            throw ContractViolation("gamma_update: size mismatch");
        double den = 0.0, sum_a = 0.0;
        for (std::size_t c = 0; c < a.size(); ++c)
        {
            den += a[c] * received[c];
            sum_a += a[c];
        }
        if (weight > 0.0 && !(sum_a > 0.0))
            throw ContractViolation("gamma_update: all subset duals are zero for a user with positive weight");
        if (weight <= 0.0)
            return 0.0;
        return std::max(0.0, weight * (1.0 + point_gamma) * (1.0 + point_gamma) / den - 1.0);
    }

    inline double dual_subgradient_update(double a, double beta, double gamma, double sinr)
    {
        if (!(beta > 0.0))
            throw ContractViolation("dual_subgradient_update: beta must be positive");
        return std::max(0.0, a + beta * (gamma - sinr));
    }

    // Parallel best-response KKT iteration; the expansion point follows the iterate.
    template <class Rng>
    SolverResult solve(const Problem &problem, const SolverOptions &opt, InitStrategy init, Rng &rng)
    {
        const KktContext ctx(problem);
        const Problem &p = ctx.problem();
        const std::size_t B = p.num_rrus(), K = p.num_users();

        SolverState st = init_feasible(ctx, init, rng);
        LinkSums cur = compute_sums(ctx, st.beams);
        std::vector<double> obj{objective_value(cur.pessimistic, p.weights)};
        if (opt.record_trace)
            st.trace.push_back(detail::make_record(ctx, 0, 0, st.beams, cur, st.gammas, st.duals));

        SolverResult res;
        BeamformerSet f_star = zero_beams(B, K, p.antennas());
        for (std::size_t it = 1; it <= opt.max_iters; ++it)
        {
            const std::vector<double> gamma0 = cur.pessimistic;
            for (std::size_t b = 0; b < B; ++b)
            {
                auto r = detail::rru_response(ctx, b, st.duals, cur, gamma0, cur, opt.bisection_tol);
                st.duals.z[b] = r.z;
                for (std::size_t k = 0; k < K; ++k)
                    f_star(b, k) = std::move(r.f[k]);
            }
            st.beams = best_response_step(st.beams, f_star, opt.psi);
            LinkSums next = compute_sums(ctx, st.beams);

            for (std::size_t k = 0; k < K; ++k)
            {
                double den = 0.0;
                for (std::size_t c = 0; c < st.duals.a[k].size(); ++c)
                    den += st.duals.a[k][c] * cur.received[k][c];
                st.gammas[k] = detail::clamp_gamma(ctx, k, p.weights[k], den, gamma0[k]);
            }
            for (std::size_t k = 0; k < K; ++k)
                for (std::size_t c = 0; c < st.duals.a[k].size(); ++c)
                    st.duals.a[k][c] = dual_subgradient_update(st.duals.a[k][c], opt.beta, st.gammas[k], next.sinr[k][c]);

            cur = std::move(next);
            st.iteration = it;
            obj.push_back(objective_value(cur.pessimistic, p.weights));
            if (opt.record_trace)
                st.trace.push_back(detail::make_record(ctx, 0, it, st.beams, cur, st.gammas, st.duals));
            if (detail::window_converged(obj, opt.window, opt.convergence_tol))
            {
                res.converged = true;
                break;
            }
        }

        res.beams = std::move(st.beams);
        res.gammas = cur.pessimistic;
        res.solver_gammas = st.gammas;
        res.duals = std::move(st.duals);
        res.trace = std::move(st.trace);
        res.objective = obj.back();
        res.iterations = st.iteration;
        return res;
    }
}

#endif
