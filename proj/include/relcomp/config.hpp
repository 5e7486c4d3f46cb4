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

#ifndef relcomp_config_H
#define relcomp_config_H

#include "core.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace relcomp
{
    // Scenario, channel, power and algorithm parameters. Defaults reproduce the
    // factory-hall setup: 8 RRUs with 16-element ULAs on the perimeter of a 100 m x 50 m
    // hall, 4 users, 4-RRU user-centric clusters.
    struct SystemConfig
    {
        std::size_t num_rrus = 8;
        std::size_t antennas_per_rru = 16;
        std::size_t num_users = 4;
        std::size_t serving_set_size = 4;
        std::size_t subset_floor = 3;

        double tx_power_dbm = 33.0;       // per RRU
        double noise_psd_dbm_hz = -72.0;  // integrated over bandwidth_hz
        double bandwidth_hz = 20e6;
        double carrier_freq_hz = 28e9;
        double los_pathloss_exp = 2.0;    // amplitude exponent
        double nlos_pathloss_exp = 3.0;   // amplitude exponent
        std::size_t num_paths = 4;        // LoS + (num_paths - 1) NLoS
        double blockage_density = 0.005;  // per meter
        std::vector<double> user_weights; // empty -> all ones

        std::size_t sca_max_iters = 30;
        std::size_t kkt_max_iters = 2000;
        double bisection_tol = 1e-7;
        double convergence_tol = 1e-3;
        double subgrad_step = 0.005;
        double best_response_step = 0.05;

        double area_width_m = 100.0;
        double area_height_m = 50.0;
        std::uint64_t rng_seed = 1;

        // Inner loop of the default SCA subproblem backend.
        std::size_t sca_inner_max_iters = 5000;
        double sca_inner_tol = 1e-6;

        // Optional fixed geometry; empty means "drop users at random" / "nearest RRUs".
        std::vector<std::array<double, 2>> user_positions;
        std::vector<std::vector<std::size_t>> serving_sets;

        double tx_power_watt() const { return dbm_to_watt(tx_power_dbm); }

        double noise_power_watt() const
        {
            return dbm_to_watt(noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz));
        }

        double weight(std::size_t k) const { return user_weights.empty() ? 1.0 : user_weights.at(k); }

        std::vector<double> weights() const
        {
            std::vector<double> w(num_users);
            for (std::size_t k = 0; k < num_users; ++k)
                w[k] = weight(k);
            return w;
        }

        void validate() const;
    };

    inline void SystemConfig::validate() const
    {
        auto fail = [](const std::string &msg)
        { throw ConfigError(msg); };

        if (num_rrus == 0)
            fail("num_rrus must be positive");
        if (antennas_per_rru == 0)
            fail("antennas_per_rru must be positive");
        if (num_users == 0)
            fail("num_users must be positive");
        if (num_paths == 0)
            fail("num_paths must be positive");
        if (subset_floor < 1 || subset_floor > serving_set_size || serving_set_size > num_rrus)
            fail("need 1 <= subset_floor <= serving_set_size <= num_rrus");
        if (!(blockage_density >= 0.0) || !std::isfinite(blockage_density))
            fail("blockage_density must be a finite nonnegative number");
        if (!(subgrad_step > 0.0))
            fail("subgrad_step must be positive");
        if (!(best_response_step >= 0.0 && best_response_step <= 1.0))
            fail("best_response_step must lie in [0, 1]");
        if (!(bisection_tol > 0.0) || !(convergence_tol > 0.0) || !(sca_inner_tol > 0.0))
            fail("tolerances must be positive");
        if (!(bandwidth_hz > 0.0))
            fail("bandwidth_hz must be positive");
        if (!(carrier_freq_hz > 0.0))
            fail("carrier_freq_hz must be positive");
        if (!(area_width_m > 0.0) || !(area_height_m > 0.0))
            fail("area dimensions must be positive");
        if (!std::isfinite(tx_power_dbm) || !std::isfinite(noise_psd_dbm_hz))
            fail("power levels must be finite");
        if (!(noise_power_watt() > 0.0) || !std::isfinite(noise_power_watt()))
            fail("derived noise power must be positive and finite");
        if (!std::isfinite(los_pathloss_exp) || !std::isfinite(nlos_pathloss_exp))
            fail("path-loss exponents must be finite");
        if (!user_weights.empty())
        {
            if (user_weights.size() != num_users)
                fail("user_weights must have num_users entries");
            for (double w : user_weights)
                if (!(w >= 0.0) || !std::isfinite(w))
                    fail("user_weights must be finite and nonnegative");
        }
        if (!user_positions.empty())
        {
            if (user_positions.size() != num_users)
                fail("user_positions must have num_users entries");
            for (const auto &p : user_positions)
                if (!(p[0] >= 0.0 && p[0] <= area_width_m && p[1] >= 0.0 && p[1] <= area_height_m))
                    fail("user_positions must lie inside the area");
        }
        if (!serving_sets.empty())
        {
            if (serving_sets.size() != num_users)
                fail("serving_sets must have num_users entries");
            for (const auto &s : serving_sets)
            {
                if (s.size() != serving_set_size)
                    fail("every serving set must have serving_set_size entries");
                std::set<std::size_t> uniq(s.begin(), s.end());
                if (uniq.size() != s.size())
                    fail("serving set entries must be distinct");
                if (*uniq.rbegin() >= num_rrus)
                    fail("serving set entry out of range (RRU indices are 0-based)");
            }
        }
    }

    namespace detail
    {
        template <class T>
        void read_key(const nlohmann::json &j, const char *key, T &out)
        {
            auto it = j.find(key);
            if (it == j.end())
                return;
            try
            {
                out = it->get<T>();
            }
            catch (const nlohmann::json::exception &e)
            {
                throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
            }
        }
    }

    inline const std::vector<std::string> &config_keys()
    {
        static const std::vector<std::string> keys = {
            "num_rrus", "antennas_per_rru", "num_users", "serving_set_size", "subset_floor",
            "tx_power_dbm", "noise_psd_dbm_hz", "bandwidth_hz", "carrier_freq_hz",
            "los_pathloss_exp", "nlos_pathloss_exp", "num_paths", "blockage_density", "user_weights",
            "sca_max_iters", "kkt_max_iters", "bisection_tol", "convergence_tol",
            "subgrad_step", "best_response_step", "area_width_m", "area_height_m", "rng_seed",
            "sca_inner_max_iters", "sca_inner_tol", "user_positions", "serving_sets"};
        return keys;
    }

    // Accepts either a flat object or sections ("scenario", "channel", ...) whose members are
    // config keys; unknown keys anywhere are rejected.
    inline SystemConfig config_from_json(const nlohmann::json &root)
    {
        if (!root.is_object())
            throw ConfigError("config root must be a JSON object");

        const auto &keys = config_keys();
        auto is_key = [&](const std::string &k)
        { return std::find(keys.begin(), keys.end(), k) != keys.end(); };

        nlohmann::json flat = nlohmann::json::object();
        for (auto it = root.begin(); it != root.end(); ++it)
        {
            if (is_key(it.key()))
            {
                if (flat.contains(it.key()))
                    throw ConfigError("duplicate key '" + it.key() + "'");
                flat[it.key()] = it.value();
            }
            else if (it.value().is_object())
            {
                for (auto jt = it.value().begin(); jt != it.value().end(); ++jt)
                {
                    if (!is_key(jt.key()))
                        throw ConfigError("unknown config key '" + it.key() + "." + jt.key() + "'");
                    if (flat.contains(jt.key()))
                        throw ConfigError("duplicate key '" + jt.key() + "'");
                    flat[jt.key()] = jt.value();
                }
            }
            else
                throw ConfigError("unknown config key '" + it.key() + "'");
        }

        SystemConfig c;
        using detail::read_key;
        read_key(flat, "num_rrus", c.num_rrus);
        read_key(flat, "antennas_per_rru", c.antennas_per_rru);
        read_key(flat, "num_users", c.num_users);
        read_key(flat, "serving_set_size", c.serving_set_size);
        read_key(flat, "subset_floor", c.subset_floor);
        read_key(flat, "tx_power_dbm", c.tx_power_dbm);
        read_key(flat, "noise_psd_dbm_hz", c.noise_psd_dbm_hz);
        read_key(flat, "bandwidth_hz", c.bandwidth_hz);
        read_key(flat, "carrier_freq_hz", c.carrier_freq_hz);
        read_key(flat, "los_pathloss_exp", c.los_pathloss_exp);
        read_key(flat, "nlos_pathloss_exp", c.nlos_pathloss_exp);
        read_key(flat, "num_paths", c.num_paths);
        read_key(flat, "blockage_density", c.blockage_density);
        read_key(flat, "user_weights", c.user_weights);
        read_key(flat, "sca_max_iters", c.sca_max_iters);
        read_key(flat, "kkt_max_iters", c.kkt_max_iters);
        read_key(flat, "bisection_tol", c.bisection_tol);
        read_key(flat, "convergence_tol", c.convergence_tol);
        read_key(flat, "subgrad_step", c.subgrad_step);
        read_key(flat, "best_response_step", c.best_response_step);
        read_key(flat, "area_width_m", c.area_width_m);
        read_key(flat, "area_height_m", c.area_height_m);
        read_key(flat, "rng_seed", c.rng_seed);
        read_key(flat, "sca_inner_max_iters", c.sca_inner_max_iters);
        read_key(flat, "sca_inner_tol", c.sca_inner_tol);
        read_key(flat, "user_positions", c.user_positions);
        read_key(flat, "serving_sets", c.serving_sets);

        // negative integers wrap silently through get<size_t>; catch them here
        for (const char *k : {"num_rrus", "antennas_per_rru", "num_users", "serving_set_size", "subset_floor",
                              "num_paths", "sca_max_iters", "kkt_max_iters", "sca_inner_max_iters"})
            if (flat.contains(k) && !flat[k].is_number_unsigned())
                throw ConfigError(std::string("'") + k + "' must be a nonnegative integer");

        c.validate();
        return c;
    }

    inline nlohmann::ordered_json config_to_json(const SystemConfig &c)
    {
        nlohmann::ordered_json j;
        j["num_rrus"] = c.num_rrus;
        j["antennas_per_rru"] = c.antennas_per_rru;
        j["num_users"] = c.num_users;
        j["serving_set_size"] = c.serving_set_size;
        j["subset_floor"] = c.subset_floor;
        j["tx_power_dbm"] = c.tx_power_dbm;
        j["noise_psd_dbm_hz"] = c.noise_psd_dbm_hz;
        j["bandwidth_hz"] = c.bandwidth_hz;
        j["carrier_freq_hz"] = c.carrier_freq_hz;
        j["los_pathloss_exp"] = c.los_pathloss_exp;
        j["nlos_pathloss_exp"] = c.nlos_pathloss_exp;
        j["num_paths"] = c.num_paths;
        j["blockage_density"] = c.blockage_density;
        j["user_weights"] = c.user_weights;
        j["sca_max_iters"] = c.sca_max_iters;
        j["kkt_max_iters"] = c.kkt_max_iters;
        j["bisection_tol"] = c.bisection_tol;
        j["convergence_tol"] = c.convergence_tol;
        j["subgrad_step"] = c.subgrad_step;
        j["best_response_step"] = c.best_response_step;
        j["area_width_m"] = c.area_width_m;
        j["area_height_m"] = c.area_height_m;
        j["rng_seed"] = c.rng_seed;
        j["sca_inner_max_iters"] = c.sca_inner_max_iters;
        j["sca_inner_tol"] = c.sca_inner_tol;
        j["user_positions"] = c.user_positions;
        j["serving_sets"] = c.serving_sets;
        return j;
    }

    // Throws ConfigError on malformed content; std::ios_base::failure if the file cannot be read.
    inline SystemConfig load_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::ios_base::failure("cannot open config file '" + path + "'");
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse(in, nullptr, true, true);
        }
        catch (const nlohmann::json::parse_error &e)
        {
            throw ConfigError("cannot parse '" + path + "': " + e.what());
        }
        return config_from_json(j);
    }
}

#endif
