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

#ifndef relcomp_sca_solver_H
#define relcomp_sca_solver_H

#include "kkt_solver.hpp"

namespace relcomp
{
    struct SubproblemSolution
    {
        BeamformerSet beams;
        std::vector<double> gammas;
        std::size_t inner_iterations = 0;
        bool converged = false;
    };

    // Solves the convex subproblem obtained by linearizing every subset SINR constraint at `point`.
    // `duals` carries warm-start multipliers in and the final multipliers out.
    class SubproblemBackend
    {
    public:
        virtual ~SubproblemBackend() = default;
        virtual SubproblemSolution solve(const KktContext &ctx, const ScaPoint &point, DualState &duals,
                                         const SolverOptions &opt) = 0;
    };

    // Largest gamma_k allowed by the linearized constraint of (k, c) for beams with sums `cur`:
    // gamma0 + (1 + gamma0) (1 - (I - T) / Q), with T the linear part and Q = A0 / (1 + gamma0).
    inline std::vector<std::vector<double>> surrogate_gamma_bounds(const KktContext &ctx, const LinkSums &point,
                                                                   const std::vector<double> &point_gamma,
                                                                   const LinkSums &cur)
    {
        const Problem &p = ctx.problem();
        const std::size_t K = p.num_users();
        std::vector<std::vector<double>> g(K);
        for (std::size_t k = 0; k < K; ++k)
        {
            const double g1 = 1.0 + point_gamma[k];
            for (std::size_t c = 0; c < cur.s[k].size(); ++c)
            {
                const cvec &s0 = point.s[k][c];
                const cvec &s = cur.s[k][c];
                double lin = 0.0;
                for (Eigen::Index j = 0; j < s.size(); ++j)
                    lin += 2.0 * (std::conj(s0[j]) * (s[j] - s0[j])).real();
                lin /= g1;
                const double interf = cur.received[k][c] - std::norm(s[k]);
                const double q = point.received[k][c] / g1;
                g[k].push_back(point_gamma[k] + g1 * (1.0 - (interf - lin) / q));
            }
        }
        return g;
    }

    // KKT iteration at a fixed expansion point: best-response beam steps, closed-form gamma and
    // subgradient steps on a driven by the linearized-constraint slack. The returned gamma is the
    // largest value the linearized constraints admit for the returned beams.
    class DefaultBackend : public SubproblemBackend
    {
    public:
        SubproblemSolution solve(const KktContext &ctx, const ScaPoint &point, DualState &duals,
                                 const SolverOptions &opt) override
        {
            const Problem &p = ctx.problem();
            const std::size_t B = p.num_rrus(), K = p.num_users();
            const LinkSums pt = compute_sums(ctx, point.beams);

            SubproblemSolution sol;
            sol.beams = point.beams;
            LinkSums cur = pt;
            auto bounds = surrogate_gamma_bounds(ctx, pt, point.gammas, cur);
            auto inner_objective = [&](const std::vector<std::vector<double>> &g)
            {
                std::vector<double> m(K);
                for (std::size_t k = 0; k < K; ++k)
                    m[k] = std::max(0.0, *std::min_element(g[k].begin(), g[k].end()));
                return m;
            };
            std::vector<double> obj{objective_value(inner_objective(bounds), p.weights)};
            std::vector<double> gammas(K);
            BeamformerSet f_star = zero_beams(B, K, p.antennas());

            for (std::size_t it = 1; it <= opt.inner_max_iters; ++it)
            {
                for (std::size_t b = 0; b < B; ++b)
                {
                    auto r = detail::rru_response(ctx, b, duals, pt, point.gammas, cur, opt.bisection_tol);
                    duals.z[b] = r.z;
                    for (std::size_t k = 0; k < K; ++k)
                        f_star(b, k) = std::move(r.f[k]);
                }
                sol.beams = best_response_step(sol.beams, f_star, opt.psi);
                cur = compute_sums(ctx, sol.beams);
                bounds = surrogate_gamma_bounds(ctx, pt, point.gammas, cur);

                for (std::size_t k = 0; k < K; ++k)
                {
                    double den = 0.0;
                    for (std::size_t c = 0; c < duals.a[k].size(); ++c)
                        den += duals.a[k][c] * pt.received[k][c];
                    gammas[k] = detail::clamp_gamma(ctx, k, p.weights[k], den, point.gammas[k]);
                }
                for (std::size_t k = 0; k < K; ++k)
                    for (std::size_t c = 0; c < duals.a[k].size(); ++c)
                        duals.a[k][c] = dual_subgradient_update(duals.a[k][c], opt.beta, gammas[k], bounds[k][c]);

                sol.inner_iterations = it;
                obj.push_back(objective_value(inner_objective(bounds), p.weights));
                if (detail::window_converged(obj, opt.window, opt.inner_tol))
                {
                    sol.converged = true;
                    break;
                }
            }
            sol.gammas = inner_objective(bounds);
            return sol;
        }
    };

    // Sequential convex approximation: each outer step solves the subproblem at the current point
    // and moves the point there. A step that lowers the true objective is rejected and ends the run.
    template <class Rng>
    SolverResult sca_solve(const Problem &problem, const SolverOptions &opt, InitStrategy init, Rng &rng,
                           SubproblemBackend &backend)
    {
        const KktContext ctx(problem);
        const Problem &p = ctx.problem();

        SolverState st = init_feasible(ctx, init, rng);
        LinkSums cur = compute_sums(ctx, st.beams);
        ScaPoint point{st.beams, cur.pessimistic};
        double obj = objective_value(cur.pessimistic, p.weights);

        SolverResult res;
        std::size_t inner_total = 0;
        if (opt.record_trace)
            res.trace.push_back(detail::make_record(ctx, 0, 0, point.beams, cur, point.gammas, st.duals));

        for (std::size_t t = 1; t <= opt.sca_max_iters; ++t)
        {
            DualState trial = st.duals;
            SubproblemSolution sol;
            try
            {
                sol = backend.solve(ctx, point, trial, opt);
            }
            catch (const SolverError &e)
            {
                throw SolverError("SCA outer iteration " + std::to_string(t) + ": " + e.what());
            }
            inner_total += sol.inner_iterations;
            LinkSums next = compute_sums(ctx, sol.beams);
            const double next_obj = objective_value(next.pessimistic, p.weights);
            if (next_obj < obj)
            {
                ++res.rejected_steps;
                break;
            }
            const double change = std::abs(next_obj - obj);
            st.duals = std::move(trial);
            st.gammas = sol.gammas;
            point = ScaPoint{sol.beams, next.pessimistic};
            cur = std::move(next);
            obj = next_obj;
            res.outer_iterations = t;
            if (opt.record_trace)
                res.trace.push_back(detail::make_record(ctx, t, inner_total, point.beams, cur, st.gammas, st.duals));
            if (change <= opt.convergence_tol * std::max(std::abs(obj), 1e-12))
            {
                res.converged = true;
                break;
            }
        }

        res.beams = point.beams;
        res.gammas = cur.pessimistic;
        res.solver_gammas = st.gammas.empty() ? cur.pessimistic : st.gammas;
        res.duals = st.duals;
        res.objective = obj;
        res.iterations = inner_total;
        return res;
    }

    template <class Rng>
    SolverResult sca_solve(const Problem &problem, const SolverOptions &opt, InitStrategy init, Rng &rng)
    {
        DefaultBackend backend;
        return sca_solve(problem, opt, init, rng, backend);
    }

    enum class SolverKind
    {
        kkt,
        sca
    };

    inline SolverKind parse_solver_kind(const std::string &s)
    {
        if (s == "kkt")
            return SolverKind::kkt;
        if (s == "sca")
            return SolverKind::sca;
        throw ConfigError("unknown solver '" + s + "' (expected kkt or sca)");
    }

    inline const char *to_string(SolverKind s) { return s == SolverKind::kkt ? "kkt" : "sca"; }

    template <class Rng>
    SolverResult run_solver(const Problem &problem, const SolverOptions &opt, SolverKind kind, InitStrategy init,
                            Rng &rng)
    {
        return kind == SolverKind::kkt ? solve(problem, opt, init, rng) : sca_solve(problem, opt, init, rng);
    }
}

#endif
