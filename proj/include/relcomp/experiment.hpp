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

#ifndef relcomp_experiment_H
#define relcomp_experiment_H

#include "reliability.hpp"

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>

namespace relcomp
{
    // Shortest decimal form that round-trips, so CSV output is byte-stable.
    inline std::string fmt_num(double v)
    {
        char buf[32];
        for (int prec = 1; prec <= 17; ++prec)
        {
            std::snprintf(buf, sizeof buf, "%.*g", prec, v);
            if (std::strtod(buf, nullptr) == v)
                break;
        }
        return buf;
    }

    inline const std::vector<std::string> &sweep_keys()
    {
        static const std::vector<std::string> keys = {"eta", "L", "tx_power_dbm", "psi", "beta", "n_rf"};
        return keys;
    }

    struct SweepAxis
    {
        std::string key;
        std::vector<double> values;
    };

    // "KEY=V1,V2,..."
    inline SweepAxis parse_sweep_axis(const std::string &s)
    {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("sweep '" + s + "' is not of the form KEY=V1,V2,...");
        SweepAxis ax{s.substr(0, eq), {}};
        const auto &keys = sweep_keys();
        if (std::find(keys.begin(), keys.end(), ax.key) == keys.end())
            throw ConfigError("unknown sweep key '" + ax.key + "'");
        std::stringstream ss(s.substr(eq + 1));
        for (std::string tok; std::getline(ss, tok, ',');)
        {
            std::size_t used = 0;
            double v = 0.0;
            try
            {
                v = std::stod(tok, &used);
            }
            catch (const std::exception &)
            {
                used = 0;
            }
            if (used == 0 || used != tok.size() || !std::isfinite(v))
                throw ConfigError("sweep '" + ax.key + "': bad value '" + tok + "'");
            ax.values.push_back(v);
        }
        if (ax.values.empty())
            throw ConfigError("sweep '" + ax.key + "' has no values");
        return ax;
    }

    inline std::size_t as_count(const std::string &key, double v)
    {
        if (!(v >= 0.0) || v != std::floor(v))
            throw ConfigError("sweep '" + key + "' needs nonnegative integers, got " + fmt_num(v));
        return std::size_t(v);
    }

    struct SweepSpec
    {
        std::vector<SweepAxis> axes;
        std::size_t drops = 100;
        MethodSpec method;                   // robust solver, optionally hybrid
        std::vector<BaselineKind> baselines; // extra rows per point
        std::uint64_t seed = 1;
        std::size_t threads = 1;
    };

    struct SweepPoint
    {
        SystemConfig cfg;
        HybridConfig hybrid;
    };

    // Applies one swept value; the result is validated by the caller.
    inline void apply_sweep_value(SweepPoint &p, const std::string &key, double v)
    {
        if (key == "eta")
            p.cfg.blockage_density = v;
        else if (key == "L")
            p.cfg.subset_floor = as_count(key, v);
        else if (key == "tx_power_dbm")
            p.cfg.tx_power_dbm = v;
        else if (key == "psi")
            p.cfg.best_response_step = v;
        else if (key == "beta")
            p.cfg.subgrad_step = v;
        else if (key == "n_rf")
            p.hybrid.n_rf = as_count(key, v);
        else
            throw ConfigError("unknown sweep key '" + key + "'");
    }

    // Cartesian product of the axes, last axis fastest.
    inline std::vector<SweepPoint> expand_sweep(const SystemConfig &base, const HybridConfig &hc,
                                                const std::vector<SweepAxis> &axes)
    {
        std::vector<SweepPoint> pts{{base, hc}};
        for (const auto &ax : axes)
        {
            std::vector<SweepPoint> next;
            for (const auto &p : pts)
                for (double v : ax.values)
                {
                    SweepPoint q = p;
                    apply_sweep_value(q, ax.key, v);
                    next.push_back(std::move(q));
                }
            pts = std::move(next);
        }
        for (const auto &p : pts)
            p.cfg.validate();
        return pts;
    }

    inline const char *sweep_csv_header()
    {
        return "eta,L,tx_power_dbm,psi,beta,n_rf,hybrid,solver,drops,failures,outage,outage_ci,sum_rate,"
               "effective_rate,theory_outage,bound_outage";
    }

    // One row per (point, method). Rates in bit/s/Hz; `solver` holds the method label.
    inline void run_sweep(const SystemConfig &base, const SweepSpec &spec, std::ostream &out,
                          std::ostream *progress = nullptr)
    {
        if (spec.drops < 1)
            throw ConfigError("drops must be >= 1");
        const auto pts = expand_sweep(base, spec.method.hybrid, spec.axes);
        std::vector<MethodSpec> methods;
        methods.push_back(spec.method);
        for (auto b : spec.baselines)
        {
            MethodSpec m = spec.method;
            m.baseline = b;
            m.hybrid = HybridConfig{};
            methods.push_back(m);
        }

        out << sweep_csv_header() << '\n';
        std::size_t done = 0;
        for (const auto &pt : pts)
            for (MethodSpec m : methods)
            {
                if (!m.baseline)
                    m.hybrid = pt.hybrid;
                const auto rep = monte_carlo_outage(pt.cfg, spec.drops, m, spec.seed, spec.threads);
                const auto &c = pt.cfg;
                out << fmt_num(c.blockage_density) << ',' << c.subset_floor << ',' << fmt_num(c.tx_power_dbm) << ','
                    << fmt_num(c.best_response_step) << ',' << fmt_num(c.subgrad_step) << ',' << m.hybrid.n_rf << ','
                    << to_string(m.hybrid.mode) << ',' << m.label() << ',' << rep.drops << ',' << rep.failures << ','
                    << fmt_num(rep.outage) << ',' << fmt_num(rep.outage_ci) << ',' << fmt_num(rep.sum_rate) << ','
                    << fmt_num(rep.effective_rate) << ',' << fmt_num(rep.theory_outage) << ','
                    << fmt_num(rep.bound_outage) << '\n';
                ++done;
                if (progress)
                    *progress << "[sweep] " << done << '/' << pts.size() * methods.size() << ' ' << m.label()
                              << " eta=" << fmt_num(c.blockage_density) << " L=" << c.subset_floor
                              << " outage=" << fmt_num(rep.outage) << '\n';
            }
    }

    inline const char *theory_csv_header()
    {
        return "eta,L,k,p_k,p_k_bound_point,p_k_bound_area,theory_outage,bound_outage";
    }

    // Closed-form success probabilities of each user on the drop-0 topology over an (eta, L) grid.
    // bound_outage uses the area-averaged qbar.
    inline void run_theory(const SystemConfig &base, const std::vector<double> &etas,
                           const std::vector<std::size_t> &floors, std::uint64_t seed, std::ostream &out)
    {
        Engine rng = substream(seed, {0, 0});
        const Topology topo = build_topology(base, rng);
        out << theory_csv_header() << '\n';
        for (double eta : etas)
        {
            if (!(eta >= 0.0) || !std::isfinite(eta))
                throw ConfigError("eta must be finite and nonnegative");
            const auto area_q = area_block_probs(topo, eta);
            for (std::size_t L : floors)
            {
                if (L < 1)
                    throw ConfigError("L must be >= 1");
                std::vector<double> p, bp, ba;
                for (std::size_t k = 0; k < topo.num_users(); ++k)
                {
                    const auto q = serving_block_probs(k, topo, eta);
                    const std::size_t Lk = std::min(L, q.size());
                    double qp = 0.0, qa = 0.0;
                    for (std::size_t i = 0; i < q.size(); ++i)
                    {
                        qp += q[i];
                        qa += area_q[topo.serving_sets[k][i]];
                    }
                    const double n = double(q.size());
                    p.push_back(success_probability(q, Lk));
                    bp.push_back(success_upper_bound(q.size(), Lk, qp / n));
                    ba.push_back(success_upper_bound(q.size(), Lk, qa / n));
                }
                const double th = system_outage_theory(p), bo = system_outage_theory(ba);
                for (std::size_t k = 0; k < p.size(); ++k)
                    out << fmt_num(eta) << ',' << L << ',' << k << ',' << fmt_num(p[k]) << ',' << fmt_num(bp[k]) << ','
                        << fmt_num(ba[k]) << ',' << fmt_num(th) << ',' << fmt_num(bo) << '\n';
            }
        }
    }

    inline std::string convergence_csv_header(std::size_t num_rrus)
    {
        std::string h = "solver,init,outer,iteration,objective,max_violation";
        for (std::size_t b = 0; b < num_rrus; ++b)
            h += ",power_" + std::to_string(b);
        return h;
    }

    // Per-iteration traces of the chosen solver on drop 0 from both initializations.
    // Objective in nats, power in W.
    inline void run_convergence(const SystemConfig &cfg, SolverKind kind, std::uint64_t seed, std::ostream &out)
    {
        cfg.validate();
        const Drop d = make_drop(cfg, seed, 0);
        const Problem p = make_problem(d.h_est, d.topology.serving_sets, cfg);
        SolverOptions opt = solver_options(cfg);
        opt.record_trace = true;
        out << convergence_csv_header(cfg.num_rrus) << '\n';
        for (auto init : {InitStrategy::mrt, InitStrategy::random})
        {
            Engine rng = drop_solver_rng(seed, 0);
            const auto res = run_solver(p, opt, kind, init, rng);
            for (const auto &r : res.trace)
            {
                out << to_string(kind) << ',' << to_string(init) << ',' << r.outer << ',' << r.iteration << ','
                    << fmt_num(r.objective) << ',' << fmt_num(r.max_violation);
                for (double pw : r.rru_power)
                    out << ',' << fmt_num(pw);
                out << '\n';
            }
        }
    }

    struct SolveOutput
    {
        nlohmann::ordered_json solution;
        nlohmann::ordered_json channels;
    };

    // One drop solved with `m`; beams in sqrt(W), rates in bit/s/Hz, objective in nats.
    inline SolveOutput run_solve(const SystemConfig &cfg, const MethodSpec &m, std::uint64_t seed)
    {
        using nlohmann::ordered_json;
        cfg.validate();
        const Drop d = make_drop(cfg, seed, 0);
        Engine rng = drop_solver_rng(seed, 0);
        SolverResult res;
        std::vector<std::vector<std::size_t>> serving = d.topology.serving_sets;
        if (m.baseline)
        {
            res = baseline_beamformers(*m.baseline, d.h_est, d.topology, cfg, m.solver, rng);
            if (*m.baseline == BaselineKind::cb)
                serving = cb_serving_sets(d.h_est);
        }
        else
        {
            const Problem p = make_problem(d.h_est, serving, cfg);
            res = hybrid_solve(p, m.hybrid, AnalogCodebook::steering(cfg.antennas_per_rru), m.solver,
                               solver_options(cfg), m.init, rng);
        }
        std::vector<double> assigned, supported;
        for (std::size_t k = 0; k < res.beams.cols(); ++k)
        {
            assigned.push_back(std::log2(1.0 + res.gammas[k]));
            supported.push_back(std::log2(1.0 + sinr_full(k, d.h_tx, res.beams, cfg.noise_power_watt())));
        }

        ordered_json j;
        j["seed"] = seed;
        j["method"] = m.label();
        j["solver"] = to_string(m.solver);
        j["init"] = to_string(m.init);
        j["hybrid"] = {{"mode", to_string(m.hybrid.mode)}, {"n_rf", m.hybrid.n_rf}};
        j["config"] = config_to_json(cfg);
        ordered_json topo;
        for (const auto &r : d.topology.rru_positions)
            topo["rru_positions"].push_back({r.x, r.y});
        for (const auto &u : d.topology.user_positions)
            topo["user_positions"].push_back({u.x, u.y});
        topo["serving_sets"] = serving;
        j["topology"] = topo;
        ordered_json beams = ordered_json::array();
        for (std::size_t b = 0; b < res.beams.rows(); ++b)
            for (std::size_t k = 0; k < res.beams.cols(); ++k)
            {
                ordered_json e = detail::cvec_to_json(res.beams(b, k));
                beams.push_back({{"rru", b}, {"user", k}, {"re", e["re"]}, {"im", e["im"]}});
            }
        j["beams"] = beams;
        std::vector<double> power;
        for (std::size_t b = 0; b < res.beams.rows(); ++b)
            power.push_back(rru_power(res.beams, b));
        j["rru_power_w"] = power;
        j["gamma"] = res.gammas;
        j["solver_gamma"] = res.solver_gammas;
        j["duals"] = {{"a", res.duals.a}, {"z", res.duals.z}};
        j["objective"] = res.objective;
        j["converged"] = res.converged;
        j["iterations"] = res.iterations;
        j["outer_iterations"] = res.outer_iterations;
        j["assigned_rate"] = assigned;
        j["supported_rate"] = supported;
        j["outage"] = rate_outage(assigned, supported);
        ordered_json trace = ordered_json::array();
        for (const auto &r : res.trace)
            trace.push_back({{"outer", r.outer}, {"iteration", r.iteration}, {"objective", r.objective},
                             {"max_violation", r.max_violation}});
        j["trace"] = trace;
        return {j, channel_set_to_json(d.channels)};
    }
}

#endif
