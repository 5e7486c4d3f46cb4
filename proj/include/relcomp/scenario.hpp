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

#ifndef relcomp_scenario_H
#define relcomp_scenario_H

#include "config.hpp"

#include <algorithm>
#include <numeric>

namespace relcomp
{
    struct Position
    {
        double x = 0.0, y = 0.0;
        bool operator==(const Position &) const = default;
    };

    inline double distance(const Position &a, const Position &b) { return std::hypot(a.x - b.x, a.y - b.y); }

    struct Topology
    {
        double width = 0.0, height = 0.0;
        std::vector<Position> rru_positions;
        std::vector<Position> rru_axes; // unit vector along each RRU's array (perimeter tangent)
        std::vector<Position> user_positions;
        std::vector<std::vector<std::size_t>> serving_sets; // nearest first

        std::size_t num_rrus() const { return rru_positions.size(); }
        std::size_t num_users() const { return user_positions.size(); }
        bool operator==(const Topology &) const = default;
    };

    // Point at arc length s along the rectangle perimeter, walking counter-clockwise from (0,0)
    // along the bottom edge. Returns the position and the unit tangent there.
    inline std::pair<Position, Position> perimeter_point(double s, double width, double height)
    {
        const double per = 2.0 * (width + height);
        s = std::fmod(s, per);
        if (s < 0.0)
            s += per;
        if (s < width)
            return {{s, 0.0}, {1.0, 0.0}};
        s -= width;
        if (s < height)
            return {{width, s}, {0.0, 1.0}};
        s -= height;
        if (s < width)
            return {{width - s, height}, {-1.0, 0.0}};
        s -= width;
        return {{0.0, height - s}, {0.0, -1.0}};
    }

    // The n RRUs closest to p; ties go to the lower index.
    inline std::vector<std::size_t> nearest_rrus(const std::vector<Position> &rrus, const Position &p, std::size_t n)
    {
        std::vector<std::size_t> idx(rrus.size());
        std::iota(idx.begin(), idx.end(), std::size_t(0));
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b)
                         { return distance(rrus[a], p) < distance(rrus[b], p); });
        idx.resize(std::min(n, idx.size()));
        return idx;
    }

    // Places RRUs at arc lengths (b + 1/2) P / B on the perimeter, drops users uniformly (unless fixed
    // in the config) and pairs each user with its serving_set_size nearest RRUs (unless fixed).
    template <class Rng>
    Topology build_topology(const SystemConfig &cfg, Rng &rng)
    {
        cfg.validate();
        Topology t;
        t.width = cfg.area_width_m;
        t.height = cfg.area_height_m;

        const double per = 2.0 * (t.width + t.height);
        for (std::size_t b = 0; b < cfg.num_rrus; ++b)
        {
            auto [pos, axis] = perimeter_point((double(b) + 0.5) * per / double(cfg.num_rrus), t.width, t.height);
            t.rru_positions.push_back(pos);
            t.rru_axes.push_back(axis);
        }

        if (!cfg.user_positions.empty())
            for (const auto &p : cfg.user_positions)
                t.user_positions.push_back({p[0], p[1]});
        else
        {
            std::uniform_real_distribution<double> ux(0.0, t.width), uy(0.0, t.height);
            for (std::size_t k = 0; k < cfg.num_users; ++k)
            {
                const double x = ux(rng);
                const double y = uy(rng);
                t.user_positions.push_back({x, y});
            }
        }

        if (!cfg.serving_sets.empty())
            t.serving_sets = cfg.serving_sets;
        else
            for (const auto &p : t.user_positions)
                t.serving_sets.push_back(nearest_rrus(t.rru_positions, p, cfg.serving_set_size));
        return t;
    }

    inline double link_distance(const Topology &topo, std::size_t b, std::size_t k)
    {
        return distance(topo.rru_positions.at(b), topo.user_positions.at(k));
    }
}

#endif
