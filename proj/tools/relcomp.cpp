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

#include <relcomp/relcomp.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace
{
    constexpr int exit_ok = 0;
    constexpr int exit_config = 2;
    constexpr int exit_solver = 3;
    constexpr int exit_io = 4;

    struct Options
    {
        std::string config;
        std::optional<std::uint64_t> seed;
        std::string out = "-";
        std::size_t drops = 100;
        std::string solver = "kkt";
        std::vector<std::string> baselines;
        std::vector<std::string> sweeps;
        std::string hybrid = "off";
        std::size_t n_rf = 0;
        std::size_t threads = 1;
        std::string init = "mrt";
        std::string dump_channels;
    };

    void write_output(const std::string &path, const std::string &text)
    {
        if (path.empty() || path == "-")
        {
            std::cout << text;
            std::cout.flush();
            if (!std::cout)
                throw std::ios_base::failure("cannot write to stdout");
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw std::ios_base::failure("cannot open '" + path + "' for writing");
        f << text;
        f.close();
        if (!f)
            throw std::ios_base::failure("cannot write '" + path + "'");
    }

    relcomp::SystemConfig load(const Options &o)
    {
        relcomp::SystemConfig cfg = o.config.empty() ? relcomp::SystemConfig{} : relcomp::load_config(o.config);
        cfg.validate();
        return cfg;
    }

    std::uint64_t seed_of(const Options &o, const relcomp::SystemConfig &cfg) { return o.seed.value_or(cfg.rng_seed); }

    relcomp::MethodSpec method_of(const Options &o)
    {
        relcomp::MethodSpec m;
        m.solver = relcomp::parse_solver_kind(o.solver);
        m.init = relcomp::parse_init_strategy(o.init);
        m.hybrid.mode = relcomp::parse_hybrid_mode(o.hybrid);
        m.hybrid.n_rf = o.n_rf;
        return m;
    }

    std::vector<relcomp::SweepAxis> axes_of(const Options &o)
    {
        std::vector<relcomp::SweepAxis> axes;
        for (const auto &s : o.sweeps)
            axes.push_back(relcomp::parse_sweep_axis(s));
        return axes;
    }

    void cmd_solve(const Options &o)
    {
        const auto cfg = load(o);
        relcomp::MethodSpec m = method_of(o);
        if (o.baselines.size() > 1)
            throw relcomp::ConfigError("solve accepts at most one --baseline");
        if (!o.baselines.empty())
            m.baseline = relcomp::parse_baseline(o.baselines.front());
        const auto res = relcomp::run_solve(cfg, m, seed_of(o, cfg));
        write_output(o.out, res.solution.dump(2) + "\n");
        if (!o.dump_channels.empty())
            write_output(o.dump_channels, res.channels.dump(2) + "\n");
    }

    void cmd_sweep(const Options &o)
    {
        const auto cfg = load(o);
        relcomp::SweepSpec spec;
        spec.axes = axes_of(o);
        spec.drops = o.drops;
        spec.method = method_of(o);
        for (const auto &b : o.baselines)
            spec.baselines.push_back(relcomp::parse_baseline(b));
        spec.seed = seed_of(o, cfg);
        spec.threads = o.threads;
        std::ostringstream csv;
        relcomp::run_sweep(cfg, spec, csv, &std::cerr);
        write_output(o.out, csv.str());
    }

    void cmd_theory(const Options &o)
    {
        const auto cfg = load(o);
        std::vector<double> etas;
        std::vector<std::size_t> floors;
        for (const auto &ax : axes_of(o))
        {
            if (ax.key == "eta")
                etas = ax.values;
            else if (ax.key == "L")
            {
                floors.clear();
                for (double v : ax.values)
                    floors.push_back(relcomp::as_count("L", v));
            }
            else
                throw relcomp::ConfigError("theory sweeps only eta and L, not '" + ax.key + "'");
        }
        if (etas.empty())
            for (int i = 0; i <= 10; ++i)
                etas.push_back(0.001 * i);
        if (floors.empty())
            for (std::size_t L = 1; L <= cfg.serving_set_size; ++L)
                floors.push_back(L);
        std::ostringstream csv;
        relcomp::run_theory(cfg, etas, floors, seed_of(o, cfg), csv);
        write_output(o.out, csv.str());
    }

    void cmd_convergence(const Options &o)
    {
        const auto cfg = load(o);
        std::ostringstream csv;
        relcomp::run_convergence(cfg, relcomp::parse_solver_kind(o.solver), seed_of(o, cfg), csv);
        write_output(o.out, csv.str());
    }
}

int main(int argc, char **argv)
{
    Options o;
    CLI::App app{"Blockage-aware reliable CoMP beamforming experiments"};
    app.require_subcommand(1);

    auto common = [&](CLI::App *c)
    {
        c->add_option("--config", o.config, "JSON config file (defaults apply when omitted)");
        c->add_option("--seed", o.seed, "master seed (default: rng_seed from the config)");
        c->add_option("--out", o.out, "output path, '-' for stdout");
    };
    auto solver_flags = [&](CLI::App *c)
    {
        c->add_option("--solver", o.solver, "kkt or sca")->check(CLI::IsMember({"kkt", "sca"}));
        c->add_option("--init", o.init, "mrt or random")->check(CLI::IsMember({"mrt", "random"}));
        c->add_option("--hybrid", o.hybrid, "off, per_user or compromise")
            ->check(CLI::IsMember({"off", "per_user", "compromise"}));
        c->add_option("--n-rf", o.n_rf, "RF chains per RRU (0: number of users)");
        c->add_option("--baseline", o.baselines, "mrt, full_jt or cb")->check(CLI::IsMember({"mrt", "full_jt", "cb"}));
    };

    auto *solve = app.add_subcommand("solve", "solve one drop and dump the solution as JSON");
    common(solve);
    solver_flags(solve);
    solve->add_option("--dump-channels", o.dump_channels, "also write both channel snapshots as JSON");

    auto *sweep = app.add_subcommand("sweep", "Monte Carlo outage and rate over a parameter grid (CSV)");
    common(sweep);
    solver_flags(sweep);
    sweep->add_option("--drops", o.drops, "drops per grid point")->check(CLI::PositiveNumber);
    sweep->add_option("--sweep", o.sweeps, "KEY=V1,V2,... with KEY in eta, L, tx_power_dbm, psi, beta, n_rf");
    sweep->add_option("--threads", o.threads, "worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);

    auto *theory = app.add_subcommand("theory", "closed-form success and outage probabilities (CSV)");
    common(theory);
    theory->add_option("--sweep", o.sweeps, "eta=... and/or L=... grids");

    auto *conv = app.add_subcommand("convergence", "per-iteration solver traces from MRT and random init (CSV)");
    common(conv);
    conv->add_option("--solver", o.solver, "kkt or sca")->check(CLI::IsMember({"kkt", "sca"}));

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    try
    {
        if (*solve)
            cmd_solve(o);
        else if (*sweep)
            cmd_sweep(o);
        else if (*theory)
            cmd_theory(o);
        else
            cmd_convergence(o);
    }
    catch (const relcomp::ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const relcomp::ContractViolation &e)
    {
        std::cerr << "invalid input: " << e.what() << '\n';
        return exit_config;
    }
    catch (const relcomp::SolverError &e)
    {
        std::cerr << "solver failure: " << e.what() << '\n';
        return exit_solver;
    }
    catch (const std::ios_base::failure &e)
    {
        std::cerr << "I/O error: " << e.what() << '\n';
        return exit_io;
    }
    return exit_ok;
}
