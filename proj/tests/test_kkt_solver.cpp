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

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace relcomp;
using namespace relcomp::testing;

namespace
{
    double coherent_jt_rate(const Problem &p, std::size_t k)
    {
        double amp = 0.0;
        for (auto b : p.serving[k])
            amp += std::sqrt(p.power[b]) * p.h(b, k).norm();
        return std::log2(1.0 + amp * amp / p.noise);
    }

    // Random state with positive duals and beams at a random feasible point.
    SolverState random_state(const KktContext &ctx, Engine &rng)
    {
        SolverState st = init_feasible(ctx, InitStrategy::random, rng);
        std::uniform_real_distribution<double> u(0.1, 2.0);
        for (auto &ak : st.duals.a)
            for (auto &a : ak)
                a = u(rng);
        return st;
    }
}

TEST(KktSolver, DualSubgradientExamples)
{
    EXPECT_DOUBLE_EQ(dual_subgradient_update(0.1, 0.005, 0.0, 30.0), 0.0);
    EXPECT_DOUBLE_EQ(dual_subgradient_update(0.1, 0.005, 2.0, 2.0), 0.1);
    EXPECT_NEAR(dual_subgradient_update(0.1, 0.005, 10.0, 0.0), 0.15, 1e-15);
    EXPECT_THROW(dual_subgradient_update(0.1, 0.0, 1.0, 0.0), ContractViolation);
}

TEST(KktSolver, GammaUpdateExamples)
{
    EXPECT_DOUBLE_EQ(gamma_update(1.0, {1.0}, {1.0}, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(gamma_update(2.0, {1.0}, {1.0}, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(gamma_update(0.5, {1.0}, {4.0}, 0.0), 0.0); // raw value negative
    EXPECT_DOUBLE_EQ(gamma_update(0.0, {0.0}, {1.0}, 0.0), 0.0);
    EXPECT_THROW(gamma_update(1.0, {0.0, 0.0}, {1.0, 1.0}, 0.0), ContractViolation);
    EXPECT_THROW(gamma_update(1.0, {1.0}, {1.0, 1.0}, 0.0), ContractViolation);
}

TEST(KktSolver, BestResponseStep)
{
    Engine rng(1);
    const Problem p = random_problem(2, 2, 3, 1, 1.0, rng);
    const auto f = random_beams(p, rng), g = random_beams(p, rng);
    EXPECT_EQ(best_response_step(f, g, 0.0), f);
    const auto one = best_response_step(f, g, 1.0);
    const auto half = best_response_step(f, g, 0.5);
    for (std::size_t b = 0; b < 2; ++b)
        for (std::size_t k = 0; k < 2; ++k)
        {
            EXPECT_NEAR((one(b, k) - g(b, k)).norm(), 0.0, 1e-15);
            EXPECT_NEAR((half(b, k) - 0.5 * (f(b, k) + g(b, k))).norm(), 0.0, 1e-15);
        }
}

TEST(KktSolver, MrtInitSingleUser)
{
    Engine rng(2);
    const Problem p = random_problem(1, 1, 6, 1, 2.0, rng);
    const KktContext ctx(p);
    const auto st = init_feasible(ctx, InitStrategy::mrt, rng);
    const cvec expect = std::sqrt(2.0) * p.h(0, 0) / p.h(0, 0).norm();
    EXPECT_NEAR((st.beams(0, 0) - expect).norm(), 0.0, 1e-12);
    EXPECT_NEAR(st.gammas[0], 2.0 * p.h(0, 0).squaredNorm(), 1e-10);
}

TEST(KktSolver, InitIsPowerFeasibleWithPositiveDuals)
{
    Engine rng(3);
    const SystemConfig cfg;
    for (std::size_t d = 0; d < 5; ++d)
    {
        const Problem p = drop_problem(cfg, 9, d);
        const KktContext ctx(p);
        for (auto s : {InitStrategy::mrt, InitStrategy::random})
        {
            const auto st = init_feasible(ctx, s, rng);
            for (std::size_t b = 0; b < p.num_rrus(); ++b)
            {
                // every RRU serves someone in the default scenario at full power, or nobody
                const double pw = rru_power(st.beams, b);
                EXPECT_TRUE(std::abs(pw - p.power[b]) <= 1e-9 * p.power[b] || pw == 0.0);
            }
            for (const auto &ak : st.duals.a)
                for (double a : ak)
                    EXPECT_GT(a, 0.0);
            for (std::size_t k = 0; k < p.num_users(); ++k)
                EXPECT_NEAR(st.gammas[k], pessimistic_sinr(k, p.h, st.beams, p.noise, p.family),
                            1e-9 * std::max(1.0, st.gammas[k]));
        }
    }
}

TEST(KktSolver, BeamformerMatchesDenseInverseOracle)
{
    Engine rng(4);
    for (int trial = 0; trial < 40; ++trial)
    {
        const std::size_t nt = 2 + std::size_t(trial % 7), B = 2 + std::size_t(trial % 2), K = 2 + std::size_t(trial % 3);
        const Problem p = random_problem(B, K, nt, 1 + std::size_t(trial % 2), 1.0, rng);
        const KktContext ctx(p);
        const SolverState st = random_state(ctx, rng);
        const ScaPoint pt{random_beams(p, rng, 0.3), std::vector<double>(K, 0.7)};
        const Problem &q = ctx.problem();
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t k = 0; k < K; ++k)
            {
                const double z = 0.3 + 0.1 * double(trial % 5);
                cmat A = z * cmat::Identity(Eigen::Index(nt), Eigen::Index(nt));
                for (std::size_t u = 0; u < K; ++u)
                {
                    if (u == k)
                        continue;
                    double alpha = 0.0;
                    for (std::size_t c = 0; c < q.family[u].size(); ++c)
                        if (q.family[u][c].mask[b])
                            alpha += st.duals.a[u][c];
                    A += alpha * q.h(b, u) * q.h(b, u).adjoint();
                }
                const cvec t = beamformer_rhs(ctx, b, k, st, pt);
                const cvec oracle = A.inverse() * t;
                const cvec f = beamformer_star(ctx, b, k, st, pt, z);
                EXPECT_LE((f - oracle).norm(), 1e-9 * std::max(1.0, oracle.norm())) << "trial " << trial;
            }
    }
}

TEST(KktSolver, LargeRidgeFollowsRightHandSide)
{
    Engine rng(5);
    const Problem p = random_problem(2, 1, 4, 2, 1.0, rng);
    const KktContext ctx(p);
    const SolverState st = random_state(ctx, rng);
    const ScaPoint pt{st.beams, st.gammas};
    const double z = 1e8;
    const cvec t = beamformer_rhs(ctx, 0, 0, st, pt);
    EXPECT_LE((beamformer_star(ctx, 0, 0, st, pt, z) - t / z).norm(), 1e-12 * t.norm() / z);
}

TEST(KktSolver, BisectionHitsPowerBudget)
{
    Engine rng(6);
    for (double P : {1e-6, 1e-3, 1.0})
    {
        const Problem p = random_problem(2, 3, 6, 1, P, rng);
        const KktContext ctx(p);
        const SolverState st = random_state(ctx, rng);
        const ScaPoint pt{st.beams, st.gammas};
        const double tol = 1e-7;
        const double z = bisect_power_dual(ctx, 0, st, pt, tol);
        double pw = 0.0;
        for (std::size_t k = 0; k < 3; ++k)
            pw += beamformer_star(ctx, 0, k, st, pt, z).squaredNorm();
        if (z > 0.0)
        {
            EXPECT_LE(pw, P);
            EXPECT_GE(pw, P * (1.0 - tol));
            // complementary slackness
            EXPECT_LE(z * std::abs(pw - P), tol * P * z);
        }
        else
            EXPECT_LE(pw, P);
    }
    // zero subset duals give a zero right-hand side, so the budget is slack and z = 0
    const Problem p = random_problem(2, 3, 6, 1, 1.0, rng);
    const KktContext ctx(p);
    SolverState st = random_state(ctx, rng);
    for (auto &ak : st.duals.a)
        std::fill(ak.begin(), ak.end(), 0.0);
    EXPECT_EQ(bisect_power_dual(ctx, 0, st, ScaPoint{st.beams, st.gammas}, 1e-7), 0.0);
    EXPECT_THROW(bisect_power_dual(ctx, 0, st, ScaPoint{st.beams, st.gammas}, 0.0), ContractViolation);
}

TEST(KktSolver, PowerIsNonincreasingInDual)
{
    Engine rng(7);
    const Problem p = random_problem(2, 3, 5, 2, 1.0, rng);
    const KktContext ctx(p);
    const SolverState st = random_state(ctx, rng);
    const ScaPoint pt{st.beams, st.gammas};
    double prev = std::numeric_limits<double>::infinity();
    for (double z = 1e-3; z < 1e4; z *= 1.7)
    {
        double pw = 0.0;
        for (std::size_t k = 0; k < 3; ++k)
            pw += beamformer_star(ctx, 1, k, st, pt, z).squaredNorm();
        EXPECT_LE(pw, prev * (1.0 + 1e-12));
        prev = pw;
    }
}

TEST(KktSolver, SingleUserReachesCoherentJointTransmission)
{
    SystemConfig cfg;
    cfg.num_users = 1;
    cfg.num_rrus = 4;
    cfg.serving_set_size = 4;
    cfg.subset_floor = 4;
    cfg.blockage_density = 0.0;
    double ratio = 0.0;
    const int drops = 10;
    for (int d = 0; d < drops; ++d)
    {
        const Problem p = drop_problem(cfg, 21, std::size_t(d));
        Engine rng(1);
        const auto r = solve(p, solver_options(cfg), InitStrategy::random, rng);
        ratio += std::log2(1.0 + r.gammas[0]) / coherent_jt_rate(p, 0);
    }
    EXPECT_GE(ratio / drops, 0.98);
}

TEST(KktSolver, HygieneOnDefaultDrops)
{
    const SystemConfig cfg;
    for (std::size_t d = 0; d < 4; ++d)
    {
        const Problem p = drop_problem(cfg, 5, d);
        Engine rng(d);
        const auto r = solve(p, solver_options(cfg), InitStrategy::mrt, rng);
        ASSERT_FALSE(r.trace.empty());
        for (const auto &rec : r.trace)
        {
            for (double pw : rec.rru_power)
                EXPECT_LE(pw, cfg.tx_power_watt() * (1.0 + 1e-6));
            EXPECT_GE(rec.min_dual, 0.0);
            EXPECT_GE(rec.min_gamma, 0.0);
        }
        for (std::size_t k = 0; k < p.num_users(); ++k)
        {
            EXPECT_GE(r.gammas[k], 0.0);
            EXPECT_NEAR(r.gammas[k], pessimistic_sinr(k, p.h, r.beams, p.noise, p.family),
                        1e-9 * std::max(1.0, r.gammas[k]));
        }
        EXPECT_NEAR(r.objective, weighted_sum_rate(r.gammas, p.weights), 1e-12);
        EXPECT_LE(r.iterations, cfg.kkt_max_iters);
    }
}

TEST(KktSolver, ZeroWeightsGiveZeroObjective)
{
    Engine rng(8);
    Problem p = random_problem(2, 2, 3, 1, 1.0, rng);
    p.weights = {0.0, 0.0};
    SolverOptions opt;
    opt.max_iters = 200;
    const auto r = solve(p, opt, InitStrategy::mrt, rng);
    EXPECT_EQ(r.objective, 0.0);
    EXPECT_EQ(r.solver_gammas, std::vector<double>(2, 0.0));
}

TEST(KktSolver, PsiZeroKeepsInitialBeams)
{
    const SystemConfig cfg;
    const Problem p = drop_problem(cfg, 3, 0);
    SolverOptions opt = solver_options(cfg);
    opt.psi = 0.0;
    Engine r1(1), r2(1);
    const auto r = solve(p, opt, InitStrategy::mrt, r1);
    const KktContext ctx(p);
    const auto st = init_feasible(ctx, InitStrategy::mrt, r2);
    EXPECT_EQ(r.beams, st.beams);
    for (const auto &rec : r.trace)
        EXPECT_DOUBLE_EQ(rec.objective, r.trace.front().objective);
}

TEST(KktSolver, DeterministicUnderFixedSeed)
{
    const SystemConfig cfg;
    const Problem p = drop_problem(cfg, 3, 1);
    Engine r1(5), r2(5);
    const auto a = solve(p, solver_options(cfg), InitStrategy::random, r1);
    const auto b = solve(p, solver_options(cfg), InitStrategy::random, r2);
    EXPECT_EQ(a.beams, b.beams);
    EXPECT_EQ(a.gammas, b.gammas);
}

TEST(KktSolver, StoppingWindow)
{
    std::vector<double> obj(60, 1.0);
    EXPECT_TRUE(detail::window_converged(obj, 50, 1e-3));
    obj[30] = 0.9;
    EXPECT_FALSE(detail::window_converged(obj, 50, 1e-3));
    EXPECT_FALSE(detail::window_converged(std::vector<double>(50, 1.0), 50, 1e-3));
}
