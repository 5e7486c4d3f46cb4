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

#ifndef relcomp_reliability_H
#define relcomp_reliability_H

#include "hybrid.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace relcomp
{
    // LoS blocking probability 1 - exp(-eta d).
    inline double link_block_prob(double d, double eta)
    {
        if (d < 0.0 || eta < 0.0)
            throw ContractViolation("link_block_prob: need d >= 0 and eta >= 0");
        return -std::expm1(-eta * d);
    }

    // Probability that at least L of the links with blocking probabilities q are unblocked:
    // sum over admissible subsets of prod(1 - q) over available times prod(q) over blocked.
    inline double success_probability(const std::vector<double> &q, std::size_t L)
    {
        std::vector<std::size_t> idx(q.size());
        std::iota(idx.begin(), idx.end(), std::size_t(0));
        double p = 0.0;
        for (const auto &e : enumerate_subsets(idx, L, q.size()))
        {
            double term = 1.0;
            for (auto i : e.available)
                term *= 1.0 - q[i];
            for (auto i : e.blocked)
                term *= q[i];
            p += term;
        }
        return p;
    }

    inline std::vector<double> serving_block_probs(std::size_t k, const Topology &topo, double eta)
    {
        std::vector<double> q;
        for (auto b : topo.serving_sets.at(k))
            q.push_back(link_block_prob(link_distance(topo, b, k), eta));
        return q;
    }

    inline double success_probability(std::size_t k, const Topology &topo, const SystemConfig &cfg)
    {
        const auto q = serving_block_probs(k, topo, cfg.blockage_density);
        return success_probability(q, std::min(cfg.subset_floor, q.size()));
    }

    // 1 - prod_k p_k
    inline double system_outage_theory(const std::vector<double> &p)
    {
        double s = 1.0;
        for (double v : p)
            s *= v;
        return 1.0 - s;
    }

    inline double system_outage_theory(const Topology &topo, const SystemConfig &cfg)
    {
        std::vector<double> p;
        for (std::size_t k = 0; k < topo.num_users(); ++k)
            p.push_back(success_probability(k, topo, cfg));
        return system_outage_theory(p);
    }

    // (n - Psi) C(n, Psi) int_0^{1 - qbar} t^(n - Psi - 1) (1 - t)^Psi dt with Psi = n - L.
    inline double success_upper_bound(std::size_t n, std::size_t L, double qbar)
    {
        if (L < 1 || L > n)
            throw ContractViolation("success_upper_bound: need 1 <= L <= n");
        if (!(qbar >= 0.0 && qbar <= 1.0))
            throw ContractViolation("success_upper_bound: qbar must lie in [0, 1]");
        const std::size_t psi = n - L;
        const double upper = 1.0 - qbar;
        if (upper <= 0.0)
            return 0.0;
        auto f = [&](double t)
        { return std::pow(t, double(n - psi - 1)) * std::pow(1.0 - t, double(psi)); };
        double err = 0.0, l1 = 0.0;
        const double val = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, 0.0, upper, 15, 1e-12, &err, &l1);
        if (err > 1e-8 * std::max(l1, 1e-300))
            throw SolverError("success_upper_bound: quadrature error estimate " + std::to_string(err) +
                              " exceeds tolerance");
        return double(n - psi) * double(binomial(n, psi)) * val;
    }

    // Blocking probability of RRU b averaged over user positions uniform in the rectangle.
    inline double area_block_prob(const Position &rru, double width, double height, double eta)
    {
        using boost::math::quadrature::gauss_kronrod;
        double worst = 0.0;
        auto inner = [&](double x)
        {
            auto fy = [&](double y)
            { return link_block_prob(std::hypot(x - rru.x, y - rru.y), eta); };
            double err = 0.0, l1 = 0.0, v = 0.0;
            const double ys = std::clamp(rru.y, 0.0, height);
            if (ys > 0.0)
                v += gauss_kronrod<double, 15>::integrate(fy, 0.0, ys, 12, 1e-11, &err, &l1), worst = std::max(worst, err);
            if (ys < height)
                v += gauss_kronrod<double, 15>::integrate(fy, ys, height, 12, 1e-11, &err, &l1), worst = std::max(worst, err);
            return v;
        };
        double err = 0.0, l1 = 0.0, v = 0.0;
        const double xs = std::clamp(rru.x, 0.0, width);
        if (xs > 0.0)
            v += gauss_kronrod<double, 15>::integrate(inner, 0.0, xs, 12, 1e-10, &err, &l1), worst = std::max(worst, err);
        if (xs < width)
            v += gauss_kronrod<double, 15>::integrate(inner, xs, width, 12, 1e-10, &err, &l1), worst = std::max(worst, err);
        const double area = width * height;
        if (worst > 1e-6 * std::max(v, 1e-12))
            throw SolverError("area_block_prob: quadrature error estimate " + std::to_string(worst) + " too large");
        return v / area;
    }

    enum class QbarVariant
    {
        point, // user at its actual position
        area,  // user position averaged over the rectangle
    };

    inline double mean_block_prob(std::size_t k, const Topology &topo, double eta, QbarVariant v)
    {
        double s = 0.0;
        const auto &serving = topo.serving_sets.at(k);
        for (auto b : serving)
            s += v == QbarVariant::point ? link_block_prob(link_distance(topo, b, k), eta)
                                         : area_block_prob(topo.rru_positions.at(b), topo.width, topo.height, eta);
        return s / double(serving.size());
    }

    inline double success_upper_bound(std::size_t k, const Topology &topo, const SystemConfig &cfg,
                                      QbarVariant v = QbarVariant::area)
    {
        const std::size_t n = topo.serving_sets.at(k).size();
        return success_upper_bound(n, std::min(cfg.subset_floor, n), mean_block_prob(k, topo, cfg.blockage_density, v));
    }

    enum class BaselineKind
    {
        mrt,
        full_jt,
        cb
    };

    inline BaselineKind parse_baseline(const std::string &s)
    {
        if (s == "mrt")
            return BaselineKind::mrt;
        if (s == "full_jt")
            return BaselineKind::full_jt;
        if (s == "cb")
            return BaselineKind::cb;
        throw ConfigError("unknown baseline '" + s + "' (expected mrt, full_jt or cb)");
    }

    inline const char *to_string(BaselineKind b)
    {
        switch (b)
        {
        case BaselineKind::mrt:
            return "mrt";
        case BaselineKind::full_jt:
            return "full_jt";
        default:
            return "cb";
        }
    }

    // What to run on each drop: the robust solver (optionally hybrid) or one of the baselines.
    struct MethodSpec
    {
        SolverKind solver = SolverKind::kkt;
        std::optional<BaselineKind> baseline;
        HybridConfig hybrid;
        InitStrategy init = InitStrategy::mrt;

        std::string label() const
        {
            if (baseline)
                return to_string(*baseline);
            std::string s = to_string(solver);
            if (hybrid.mode != HybridMode::off)
                s += std::string("+") + to_string(hybrid.mode);
            return s;
        }
    };

    // Serving sets used by a baseline: cb keeps only each user's strongest RRU.
    inline std::vector<std::vector<std::size_t>> cb_serving_sets(const Grid<cvec> &h)
    {
        std::vector<std::vector<std::size_t>> s;
        for (std::size_t k = 0; k < h.cols(); ++k)
        {
            std::size_t best = 0;
            for (std::size_t b = 1; b < h.rows(); ++b)
                if (h(b, k).norm() > h(best, k).norm())
                    best = b;
            s.push_back({best});
        }
        return s;
    }

    // mrt: matched filters with equal per-RRU power split; full_jt: solver with L = |B_k|;
    // cb: solver with singleton serving sets {strongest RRU} and L = 1.
    template <class Rng>
    SolverResult baseline_beamformers(BaselineKind kind, const Grid<cvec> &h, const Topology &topo,
                                      const SystemConfig &cfg, SolverKind solver, Rng &rng)
    {
        const SolverOptions opt = solver_options(cfg);
        if (kind == BaselineKind::mrt)
        {
            SystemConfig c = cfg;
            c.subset_floor = std::numeric_limits<std::size_t>::max(); // clipped to |B_k|
            const Problem p = make_problem(h, topo.serving_sets, c);
            const KktContext ctx(p);
            SolverState st = init_feasible(ctx, InitStrategy::mrt, rng);
            SolverResult r;
            r.beams = std::move(st.beams);
            for (std::size_t k = 0; k < p.num_users(); ++k)
                r.gammas.push_back(sinr_full(k, p.h, r.beams, p.noise));
            r.solver_gammas = r.gammas;
            r.duals = std::move(st.duals);
            r.objective = weighted_sum_rate(r.gammas, p.weights);
            r.converged = true;
            return r;
        }
        if (kind == BaselineKind::full_jt)
        {
            SystemConfig c = cfg;
            c.subset_floor = std::numeric_limits<std::size_t>::max(); // clipped to |B_k|
            return run_solver(make_problem(h, topo.serving_sets, c), opt, solver, InitStrategy::mrt, rng);
        }
        SystemConfig c = cfg;
        c.subset_floor = 1;
        return run_solver(make_problem(h, cb_serving_sets(h), c), opt, solver, InitStrategy::mrt, rng);
    }

    struct DropOutcome
    {
        bool failed = false;
        std::string error;
        bool outage = false;
        std::vector<double> assigned_rate;  // log2(1 + pessimistic SINR) on the estimation snapshot
        std::vector<double> supported_rate; // log2(1 + SINR) on the transmission snapshot
        double sum_rate = 0.0;
        double objective = 0.0;
        std::size_t iterations = 0;
        std::vector<double> success_prob; // closed form for this drop's geometry
        double theory_outage = 0.0;
        double bound_outage = 0.0;
        // worst values over every recorded solver iteration
        double max_power_ratio = 0.0;
        double min_dual = 0.0;
        double min_gamma = 0.0;
    };

    // Relative slack on R_k > C_k so rounding of equal quantities is not counted as outage.
    inline constexpr double outage_slack = 1e-9;

    inline bool rate_outage(const std::vector<double> &assigned, const std::vector<double> &supported)
    {
        for (std::size_t k = 0; k < assigned.size(); ++k)
            if (assigned[k] > supported[k] * (1.0 + outage_slack) + outage_slack)
                return true;
        return false;
    }

    // Per-RRU area-averaged blocking probabilities used by the bound.
    inline std::vector<double> area_block_probs(const Topology &topo, double eta)
    {
        std::vector<double> q;
        for (const auto &r : topo.rru_positions)
            q.push_back(area_block_prob(r, topo.width, topo.height, eta));
        return q;
    }

    // Topology and both channel snapshots of one drop.
    struct Drop
    {
        Topology topology;
        ChannelSet channels;
        Grid<cvec> h_est; // effective estimation-snapshot channels
        Grid<cvec> h_tx;  // effective transmission-snapshot channels
    };

    inline Drop make_drop(const SystemConfig &cfg, std::uint64_t seed, std::size_t drop)
    {
        Engine topo_rng = substream(seed, {drop, 0});
        Engine chan_rng = substream(seed, {drop, 1});
        Drop d;
        d.topology = build_topology(cfg, topo_rng);
        d.channels = draw_channel_set(d.topology, cfg, chan_rng);
        d.h_est = effective_channels(d.channels.estimation);
        d.h_tx = effective_channels(d.channels.transmission);
        return d;
    }

    inline Engine drop_solver_rng(std::uint64_t seed, std::size_t drop) { return substream(seed, {drop, 2}); }

    // One Monte Carlo drop. Streams derive from (seed, drop) only, so drops can run in any order.
    inline DropOutcome evaluate_drop(const SystemConfig &cfg, const MethodSpec &m, std::uint64_t seed,
                                     std::size_t drop, const std::vector<double> &area_q,
                                     const AnalogCodebook *codebook = nullptr, SolverResult *keep = nullptr)
    {
        DropOutcome out;
        const Drop d = make_drop(cfg, seed, drop);
        const Topology &topo = d.topology;
        const Grid<cvec> &h_est = d.h_est;
        const Grid<cvec> &h_tx = d.h_tx;
        Engine solve_rng = drop_solver_rng(seed, drop);

        std::vector<std::vector<std::size_t>> serving = topo.serving_sets;
        std::size_t floor = cfg.subset_floor;
        if (m.baseline == BaselineKind::cb)
        {
            serving = cb_serving_sets(h_est);
            floor = 1;
        }
        else if (m.baseline)
            floor = std::numeric_limits<std::size_t>::max();

        for (std::size_t k = 0; k < topo.num_users(); ++k)
        {
            std::vector<double> q;
            double qa = 0.0;
            for (auto b : serving[k])
            {
                q.push_back(link_block_prob(link_distance(topo, b, k), cfg.blockage_density));
                qa += area_q.at(b);
            }
            const std::size_t L = std::min(floor, q.size());
            out.success_prob.push_back(success_probability(q, L));
            out.bound_outage = 1.0 - (1.0 - out.bound_outage) * success_upper_bound(q.size(), L, qa / double(q.size()));
        }
        out.theory_outage = system_outage_theory(out.success_prob);

        SolverResult res;
        try
        {
            if (m.baseline)
                res = baseline_beamformers(*m.baseline, h_est, topo, cfg, m.solver, solve_rng);
            else
            {
                const Problem p = make_problem(h_est, topo.serving_sets, cfg);
                AnalogCodebook cb = codebook ? *codebook : AnalogCodebook::steering(cfg.antennas_per_rru);
                res = hybrid_solve(p, m.hybrid, cb, m.solver, solver_options(cfg), m.init, solve_rng);
            }
        }
        catch (const SolverError &e)
        {
            out.failed = true;
            out.error = e.what();
            return out;
        }

        const double sigma2 = cfg.noise_power_watt();
        for (std::size_t k = 0; k < topo.num_users(); ++k)
        {
            out.assigned_rate.push_back(std::log2(1.0 + res.gammas[k]));
            out.supported_rate.push_back(std::log2(1.0 + sinr_full(k, h_tx, res.beams, sigma2)));
            out.sum_rate += out.assigned_rate.back();
        }
        out.outage = rate_outage(out.assigned_rate, out.supported_rate);
        out.objective = res.objective;
        out.iterations = res.iterations;

        const double P = cfg.tx_power_watt();
        out.min_dual = std::numeric_limits<double>::infinity();
        out.min_gamma = std::numeric_limits<double>::infinity();
        for (const auto &r : res.trace)
        {
            for (double p : r.rru_power)
                out.max_power_ratio = std::max(out.max_power_ratio, p / P);
            out.min_dual = std::min(out.min_dual, r.min_dual);
            out.min_gamma = std::min(out.min_gamma, r.min_gamma);
        }
        for (std::size_t b = 0; b < res.beams.rows(); ++b)
            out.max_power_ratio = std::max(out.max_power_ratio, rru_power(res.beams, b) / P);
        for (const auto &ak : res.duals.a)
            for (double a : ak)
                out.min_dual = std::min(out.min_dual, a);
        for (double g : res.solver_gammas)
            out.min_gamma = std::min(out.min_gamma, g);
        if (keep)
            *keep = std::move(res);
        return out;
    }

    struct ReliabilityReport
    {
        std::size_t drops = 0;
        std::size_t failures = 0;
        std::vector<double> success_prob;  // per user, mean over drops
        double theory_outage = 0.0;        // mean over drops
        double bound_outage = 0.0;         // mean over drops, area-averaged qbar
        double outage = 0.0;               // Monte Carlo, over non-failed drops
        double outage_ci = 0.0;            // 95% normal-approximation half-width
        double sum_rate = 0.0;             // mean of sum_k R_k [bit/s/Hz]
        double effective_rate = 0.0;       // (1 - outage) * sum_rate
        std::vector<DropOutcome> outcomes; // in drop order
    };

    // Runs `drops` independent drops on `threads` workers; aggregates are independent of the
    // thread count.
    inline ReliabilityReport monte_carlo_outage(const SystemConfig &cfg, std::size_t drops, const MethodSpec &m,
                                                std::uint64_t seed, std::size_t threads = 1,
                                                const AnalogCodebook *codebook = nullptr)
    {
        if (drops < 1)
            throw ContractViolation("monte_carlo_outage: drops must be >= 1");
        cfg.validate();
        Engine t0 = substream(seed, {0, 0});
        const std::vector<double> area_q = area_block_probs(build_topology(cfg, t0), cfg.blockage_density);

        ReliabilityReport rep;
        rep.drops = drops;
        rep.outcomes.resize(drops);
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex err_mu;
        auto worker = [&]()
        {
            for (std::size_t d; (d = next.fetch_add(1)) < drops;)
            {
                try
                {
                    rep.outcomes[d] = evaluate_drop(cfg, m, seed, d, area_q, codebook);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_error)
                        first_error = std::current_exception();
                }
            }
        };
        threads = std::max<std::size_t>(1, std::min(threads, drops));
        if (threads == 1)
            worker();
        else
        {
            std::vector<std::thread> pool;
            for (std::size_t t = 0; t < threads; ++t)
                pool.emplace_back(worker);
            for (auto &t : pool)
                t.join();
        }
        if (first_error)
            std::rethrow_exception(first_error);

        std::size_t n = 0, outages = 0;
        double rate = 0.0;
        rep.success_prob.assign(cfg.num_users, 0.0);
        for (const auto &o : rep.outcomes)
        {
            rep.theory_outage += o.theory_outage / double(drops);
            rep.bound_outage += o.bound_outage / double(drops);
            for (std::size_t k = 0; k < o.success_prob.size(); ++k)
                rep.success_prob[k] += o.success_prob[k] / double(drops);
            if (o.failed)
            {
                ++rep.failures;
                continue;
            }
            ++n;
            outages += o.outage ? 1 : 0;
            rate += o.sum_rate;
        }
        if (n > 0)
        {
            rep.outage = double(outages) / double(n);
            rep.outage_ci = 1.96 * std::sqrt(rep.outage * (1.0 - rep.outage) / double(n));
            rep.sum_rate = rate / double(n);
            rep.effective_rate = (1.0 - rep.outage) * rep.sum_rate;
        }
        return rep;
    }
}

#endif
