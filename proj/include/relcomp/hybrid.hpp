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

#ifndef relcomp_hybrid_H
#define relcomp_hybrid_H

#include "channel.hpp"
#include "sca_solver.hpp"

namespace relcomp
{
    struct AnalogCodebook
    {
        std::vector<cvec> beams;

        std::size_t size() const { return beams.size(); }

        // Steering vectors on a uniform sin-angle grid: sin(phi_m) = -1 + (2m + 1) / n.
        static AnalogCodebook steering(std::size_t nt, std::size_t n = 32)
        {
            AnalogCodebook cb;
            for (std::size_t m = 0; m < n; ++m)
                cb.beams.push_back(steering_vector_sin(-1.0 + (2.0 * double(m) + 1.0) / double(n), nt));
            return cb;
        }

        static AnalogCodebook standard_basis(std::size_t nt)
        {
            AnalogCodebook cb;
            for (std::size_t n = 0; n < nt; ++n)
                cb.beams.push_back(cvec::Unit(Eigen::Index(nt), Eigen::Index(n)));
            return cb;
        }
    };

    enum class HybridMode
    {
        off,
        per_user,   // one RF chain per user, each steered to that user's best codebook beam
        compromise, // a single RF chain steered to the normalized sum of the users' best beams
    };

    inline HybridMode parse_hybrid_mode(const std::string &s)
    {
        if (s == "off")
            return HybridMode::off;
        if (s == "per_user")
            return HybridMode::per_user;
        if (s == "compromise")
            return HybridMode::compromise;
        throw ConfigError("unknown hybrid mode '" + s + "' (expected off, per_user or compromise)");
    }

    inline const char *to_string(HybridMode m)
    {
        switch (m)
        {
        case HybridMode::per_user:
            return "per_user";
        case HybridMode::compromise:
            return "compromise";
        default:
            return "off";
        }
    }

    struct HybridConfig
    {
        std::size_t n_rf = 0; // RF chains per RRU; 0 means "number of users" for per_user
        HybridMode mode = HybridMode::off;
    };

    // argmax_m |h^H v_m|^2, first index on ties.
    inline std::pair<std::size_t, cvec> select_beam(const cvec &h, const AnalogCodebook &cb)
    {
        if (cb.beams.empty())
            throw ContractViolation("select_beam: empty codebook");
        std::size_t best = 0;
        double best_gain = -1.0;
        for (std::size_t m = 0; m < cb.size(); ++m)
        {
            const double g = std::norm(h.dot(cb.beams[m]));
            if (g > best_gain)
            {
                best_gain = g;
                best = m;
            }
        }
        return {best, cb.beams[best]};
    }

    // W_b^H h_{b,k} where column k of W_b is user k's best beam at RRU b.
    inline Grid<cvec> effective_channels_case1(const Grid<cvec> &h, const AnalogCodebook &cb)
    {
        const std::size_t B = h.rows(), K = h.cols();
        Grid<cvec> out(B, K);
        for (std::size_t b = 0; b < B; ++b)
        {
            cmat W(h(b, 0).size(), Eigen::Index(K));
            for (std::size_t k = 0; k < K; ++k)
                W.col(k) = select_beam(h(b, k), cb).second;
            for (std::size_t k = 0; k < K; ++k)
                out(b, k) = W.adjoint() * h(b, k);
        }
        return out;
    }

    // Normalized superposition of the users' best beams at one RRU.
    inline cvec compromise_beam(const std::vector<cvec> &h_b, const AnalogCodebook &cb)
    {
        if (h_b.empty())
            throw ContractViolation("compromise_beam: no users");
        cvec sum = cvec::Zero(h_b.front().size());
        for (const auto &h : h_b)
            sum += select_beam(h, cb).second;
        const double n = sum.norm();
        if (!(n > 1e-12))
            throw SolverError("compromise_beam: best beams cancel");
        return sum / n;
    }

    // Analog matrix of one RRU for per_user mode: the distinct best beams of all users, topped up
    // to n_rf columns with the remaining beams of largest aggregate gain sum_k |h_k^H v|^2.
    // Columns follow codebook order.
    inline cmat per_user_analog(const std::vector<cvec> &h_b, const AnalogCodebook &cb, std::size_t n_rf)
    {
        if (n_rf > cb.size())
            throw ConfigError("n_rf exceeds the codebook size");
        std::vector<std::size_t> chosen;
        for (const auto &h : h_b)
        {
            const auto m = select_beam(h, cb).first;
            if (std::find(chosen.begin(), chosen.end(), m) == chosen.end())
                chosen.push_back(m);
        }
        if (chosen.size() > n_rf)
            throw ConfigError("per_user hybrid mode needs n_rf >= number of users");
        std::vector<std::pair<double, std::size_t>> rest;
        for (std::size_t m = 0; m < cb.size(); ++m)
        {
            if (std::find(chosen.begin(), chosen.end(), m) != chosen.end())
                continue;
            double g = 0.0;
            for (const auto &h : h_b)
                g += std::norm(h.dot(cb.beams[m]));
            rest.push_back({-g, m});
        }
        std::stable_sort(rest.begin(), rest.end(), [](const auto &a, const auto &b)
                         { return a.first < b.first; });
        for (std::size_t i = 0; chosen.size() < n_rf; ++i)
            chosen.push_back(rest[i].second);
        // codebook order, so a complete standard-basis codebook yields W = I
        std::sort(chosen.begin(), chosen.end());

        cmat W(h_b.front().size(), Eigen::Index(n_rf));
        for (std::size_t i = 0; i < n_rf; ++i)
            W.col(Eigen::Index(i)) = cb.beams[chosen[i]];
        return W;
    }

    // Orthonormal basis of span(W) with the same column count (zero columns pad a rank
    // deficiency), so ||Q y|| = ||y|| on the digital coordinates that carry signal.
    inline cmat orthonormal_columns(const cmat &W)
    {
        const cmat G = W.adjoint() * W;
        if ((G - cmat::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() <= 1e-12)
            return W;
        Eigen::SelfAdjointEigenSolver<cmat> es(G);
        const double top = es.eigenvalues().maxCoeff();
        cmat Q = cmat::Zero(W.rows(), W.cols());
        Eigen::Index col = 0;
        for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i)
        {
            const double mu = es.eigenvalues()[i];
            if (top > 0.0 && mu > 1e-10 * top)
                Q.col(col++) = W * es.eigenvectors().col(i) / std::sqrt(mu);
        }
        return Q;
    }

    // Fixes the analog stage from the design channel, runs the digital solver on the reduced
    // channels Q_b^H h_{b,k} and returns the composed Nt-dimensional beams Q_b y_{b,k}.
    template <class Rng>
    SolverResult hybrid_solve(const Problem &problem, const HybridConfig &hc, const AnalogCodebook &cb,
                              SolverKind kind, const SolverOptions &opt, InitStrategy init, Rng &rng,
                              std::vector<cmat> *analog_out = nullptr)
    {
        if (hc.mode == HybridMode::off)
            return run_solver(problem, opt, kind, init, rng);

        const std::size_t B = problem.num_rrus(), K = problem.num_users();
        if (hc.mode == HybridMode::per_user && hc.n_rf != 0 && hc.n_rf < K)
            throw ConfigError("per_user hybrid mode needs n_rf >= number of users");
        if (hc.mode == HybridMode::compromise && hc.n_rf > 1)
            throw ConfigError("compromise hybrid mode uses a single RF chain (n_rf = 1)");
        std::vector<cmat> Q(B);
        for (std::size_t b = 0; b < B; ++b)
        {
            std::vector<cvec> hb;
            for (std::size_t k = 0; k < K; ++k)
                hb.push_back(problem.h(b, k));
            if (hc.mode == HybridMode::per_user)
                Q[b] = orthonormal_columns(per_user_analog(hb, cb, hc.n_rf ? hc.n_rf : K));
            else
            {
                cvec w;
                try
                {
                    w = compromise_beam(hb, cb);
                }
                catch (const SolverError &)
                {
                    w = select_beam(hb.front(), cb).second;
                }
                Q[b] = w;
            }
        }
        if (analog_out)
            *analog_out = Q;

        Problem reduced = problem;
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t k = 0; k < K; ++k)
                reduced.h(b, k) = Q[b].adjoint() * problem.h(b, k);

        SolverResult res = run_solver(reduced, opt, kind, init, rng);
        BeamformerSet composed(B, K);
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t k = 0; k < K; ++k)
                composed(b, k) = Q[b] * res.beams(b, k);
        res.beams = std::move(composed);
        for (std::size_t k = 0; k < K; ++k)
            res.gammas[k] = pessimistic_sinr(k, problem.h, res.beams, problem.noise, problem.family);
        res.objective = weighted_sum_rate(res.gammas, problem.weights);
        return res;
    }
}

#endif
