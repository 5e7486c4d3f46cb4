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

#ifndef relcomp_channel_H
#define relcomp_channel_H

#include "scenario.hpp"

namespace relcomp
{
    // Half-wavelength ULA response; element n carries phase -pi * n * sin(phi).
    inline cvec steering_vector_sin(double sin_phi, std::size_t nt)
    {
        cvec a(nt);
        const double norm = 1.0 / std::sqrt(double(nt));
        for (std::size_t n = 0; n < nt; ++n)
            a[n] = std::polar(norm, -M_PI * double(n) * sin_phi);
        return a;
    }

    inline cvec steering_vector(double phi, std::size_t nt) { return steering_vector_sin(std::sin(phi), nt); }

    struct LinkChannel
    {
        cvec los_component;  // kept intact; los_blocked removes it from effective()
        cvec nlos_component; // sum of the scattered paths
        bool los_blocked = false;
        double distance_m = 0.0;

        cvec effective() const { return los_blocked ? nlos_component : cvec(los_component + nlos_component); }
        bool operator==(const LinkChannel &) const = default;
    };

    // Two snapshots over the same path gains: blockage at channel-estimation time and
    // an independent blockage draw at data-transmission time.
    struct ChannelSet
    {
        Grid<LinkChannel> estimation;   // (b, k)
        Grid<LinkChannel> transmission; // (b, k)

        std::size_t num_rrus() const { return estimation.rows(); }
        std::size_t num_users() const { return estimation.cols(); }
        bool operator==(const ChannelSet &) const = default;
    };

    inline Grid<cvec> effective_channels(const Grid<LinkChannel> &links)
    {
        Grid<cvec> h(links.rows(), links.cols());
        for (std::size_t b = 0; b < links.rows(); ++b)
            for (std::size_t k = 0; k < links.cols(); ++k)
                h(b, k) = links(b, k).effective();
        return h;
    }

    // Distances below 1 m are clamped in the path-loss term only.
    template <class Rng>
    LinkChannel generate_link(std::size_t b, std::size_t k, const Topology &topo, const SystemConfig &cfg, Rng &rng)
    {
        const std::size_t nt = cfg.antennas_per_rru;
        const Position &r = topo.rru_positions.at(b);
        const Position &u = topo.user_positions.at(k);
        const Position &axis = topo.rru_axes.at(b);

        LinkChannel link;
        link.distance_m = link_distance(topo, b, k);
        const double d_pl = std::max(link.distance_m, 1.0);
        const double sin_los = link.distance_m > 0.0
                                   ? std::clamp(((u.x - r.x) * axis.x + (u.y - r.y) * axis.y) / link.distance_m, -1.0, 1.0)
                                   : 0.0;
        const double scale = std::sqrt(double(nt) / double(cfg.num_paths));

        const cplx g_los = complex_normal(rng) * std::pow(d_pl, -cfg.los_pathloss_exp);
        link.los_component = scale * g_los * steering_vector_sin(sin_los, nt);

        link.nlos_component = cvec::Zero(nt);
        std::uniform_real_distribution<double> aoa(-M_PI / 2.0, M_PI / 2.0);
        for (std::size_t m = 1; m < cfg.num_paths; ++m)
        {
            const cplx g = complex_normal(rng) * std::pow(d_pl, -cfg.nlos_pathloss_exp);
            const double phi = aoa(rng);
            link.nlos_component += scale * g * steering_vector(phi, nt);
        }
        return link;
    }

    // true = LoS blocked, which happens with probability 1 - exp(-eta d).
    template <class Rng>
    bool sample_blockage(double d, double eta, Rng &rng)
    {
        if (eta <= 0.0 || d <= 0.0)
            return false;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        return u(rng) >= std::exp(-eta * d);
    }

    // One 64-bit draw from rng seeds per-link substreams, so the result does not depend on the
    // order in which links are generated.
    template <class Rng>
    ChannelSet draw_channel_set(const Topology &topo, const SystemConfig &cfg, Rng &rng)
    {
        const std::uint64_t base = rng();
        const std::size_t B = topo.num_rrus(), K = topo.num_users();
        ChannelSet cs{Grid<LinkChannel>(B, K), Grid<LinkChannel>(B, K)};
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t k = 0; k < K; ++k)
            {
                Engine gen = substream(base, {0, b, k});
                Engine est = substream(base, {1, b, k});
                Engine tx = substream(base, {2, b, k});
                LinkChannel link = generate_link(b, k, topo, cfg, gen);
                link.los_blocked = sample_blockage(link.distance_m, cfg.blockage_density, est);
                cs.estimation(b, k) = link;
                link.los_blocked = sample_blockage(link.distance_m, cfg.blockage_density, tx);
                cs.transmission(b, k) = std::move(link);
            }
        return cs;
    }

    namespace detail
    {
        inline nlohmann::ordered_json cvec_to_json(const cvec &v)
        {
            nlohmann::ordered_json re = nlohmann::ordered_json::array(), im = nlohmann::ordered_json::array();
            for (Eigen::Index i = 0; i < v.size(); ++i)
            {
                re.push_back(v[i].real());
                im.push_back(v[i].imag());
            }
            return {{"re", re}, {"im", im}};
        }

        template <class Json>
        cvec cvec_from_json(const Json &j)
        {
            const auto re = j.at("re").template get<std::vector<double>>();
            const auto im = j.at("im").template get<std::vector<double>>();
            if (re.size() != im.size())
                throw ConfigError("complex vector with mismatched re/im lengths");
            cvec v(re.size());
            for (std::size_t i = 0; i < re.size(); ++i)
                v[i] = {re[i], im[i]};
            return v;
        }
    }

    inline nlohmann::ordered_json channel_set_to_json(const ChannelSet &cs)
    {
        nlohmann::ordered_json links = nlohmann::ordered_json::array();
        for (std::size_t b = 0; b < cs.num_rrus(); ++b)
            for (std::size_t k = 0; k < cs.num_users(); ++k)
            {
                const auto &l = cs.estimation(b, k);
                nlohmann::ordered_json j;
                j["rru"] = b;
                j["user"] = k;
                j["distance_m"] = l.distance_m;
                j["los_blocked_estimation"] = l.los_blocked;
                j["los_blocked_transmission"] = cs.transmission(b, k).los_blocked;
                j["los"] = detail::cvec_to_json(l.los_component);
                j["nlos"] = detail::cvec_to_json(l.nlos_component);
                links.push_back(std::move(j));
            }
        nlohmann::ordered_json out;
        out["num_rrus"] = cs.num_rrus();
        out["num_users"] = cs.num_users();
        out["links"] = std::move(links);
        return out;
    }

    template <class Json>
    ChannelSet channel_set_from_json(const Json &j)
    {
        try
        {
            const auto B = j.at("num_rrus").template get<std::size_t>();
            const auto K = j.at("num_users").template get<std::size_t>();
            ChannelSet cs{Grid<LinkChannel>(B, K), Grid<LinkChannel>(B, K)};
            for (const auto &l : j.at("links"))
            {
                LinkChannel link;
                link.distance_m = l.at("distance_m").template get<double>();
                link.los_component = detail::cvec_from_json(l.at("los"));
                link.nlos_component = detail::cvec_from_json(l.at("nlos"));
                const auto b = l.at("rru").template get<std::size_t>();
                const auto k = l.at("user").template get<std::size_t>();
                link.los_blocked = l.at("los_blocked_estimation").template get<bool>();
                cs.estimation.at(b, k) = link;
                link.los_blocked = l.at("los_blocked_transmission").template get<bool>();
                cs.transmission.at(b, k) = link;
            }
            return cs;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ConfigError(std::string("malformed channel dump: ") + e.what());
        }
        catch (const std::out_of_range &e)
        {
            throw ConfigError(std::string("malformed channel dump: ") + e.what());
        }
    }
}

#endif
