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

#include <gtest/gtest.h>

using namespace relcomp;

TEST(Scenario, PerimeterWalk)
{
    auto [p0, a0] = perimeter_point(10.0, 100.0, 50.0);
    EXPECT_DOUBLE_EQ(p0.x, 10.0);
    EXPECT_DOUBLE_EQ(p0.y, 0.0);
    EXPECT_DOUBLE_EQ(a0.x, 1.0);
    auto [p1, a1] = perimeter_point(120.0, 100.0, 50.0);
    EXPECT_DOUBLE_EQ(p1.x, 100.0);
    EXPECT_DOUBLE_EQ(p1.y, 20.0);
    EXPECT_DOUBLE_EQ(a1.y, 1.0);
    auto [p2, a2] = perimeter_point(160.0, 100.0, 50.0);
    EXPECT_DOUBLE_EQ(p2.x, 90.0);
    EXPECT_DOUBLE_EQ(p2.y, 50.0);
    EXPECT_DOUBLE_EQ(a2.x, -1.0);
    auto [p3, a3] = perimeter_point(290.0, 100.0, 50.0);
    EXPECT_DOUBLE_EQ(p3.x, 0.0);
    EXPECT_DOUBLE_EQ(p3.y, 10.0);
    EXPECT_DOUBLE_EQ(a3.y, -1.0);
}

TEST(Scenario, RrusEvenlySpacedOnPerimeter)
{
    SystemConfig cfg;
    cfg.num_rrus = 4;
    cfg.serving_set_size = 2;
    cfg.subset_floor = 1;
    Engine rng(1);
    const auto t = build_topology(cfg, rng);
    ASSERT_EQ(t.num_rrus(), 4u);
    // arc lengths 37.5, 112.5, 187.5, 262.5 on a 300 m perimeter
    EXPECT_DOUBLE_EQ(t.rru_positions[0].x, 37.5);
    EXPECT_DOUBLE_EQ(t.rru_positions[0].y, 0.0);
    EXPECT_DOUBLE_EQ(t.rru_positions[1].x, 100.0);
    EXPECT_DOUBLE_EQ(t.rru_positions[1].y, 12.5);
    EXPECT_DOUBLE_EQ(t.rru_positions[2].x, 62.5);
    EXPECT_DOUBLE_EQ(t.rru_positions[2].y, 50.0);
    EXPECT_DOUBLE_EQ(t.rru_positions[3].x, 0.0);
    EXPECT_DOUBLE_EQ(t.rru_positions[3].y, 37.5);
}

TEST(Scenario, UsersInsideAndServedByNearest)
{
    const SystemConfig cfg;
    for (std::uint64_t s = 0; s < 50; ++s)
    {
        Engine rng(s);
        const auto t = build_topology(cfg, rng);
        ASSERT_EQ(t.num_users(), cfg.num_users);
        for (std::size_t k = 0; k < t.num_users(); ++k)
        {
            const auto &u = t.user_positions[k];
            EXPECT_GE(u.x, 0.0);
            EXPECT_LE(u.x, cfg.area_width_m);
            EXPECT_GE(u.y, 0.0);
            EXPECT_LE(u.y, cfg.area_height_m);
            const auto &sv = t.serving_sets[k];
            ASSERT_EQ(sv.size(), cfg.serving_set_size);
            double worst_in = 0.0;
            for (auto b : sv)
                worst_in = std::max(worst_in, link_distance(t, b, k));
            for (std::size_t b = 0; b < t.num_rrus(); ++b)
                if (std::find(sv.begin(), sv.end(), b) == sv.end())
                    EXPECT_GE(link_distance(t, b, k), worst_in);
            for (std::size_t i = 1; i < sv.size(); ++i)
                EXPECT_LE(link_distance(t, sv[i - 1], k), link_distance(t, sv[i], k));
        }
    }
}

TEST(Scenario, NearestTiesGoToLowerIndex)
{
    const std::vector<Position> rrus{{0.0, 0.0}, {2.0, 0.0}, {1.0, 5.0}};
    EXPECT_EQ(nearest_rrus(rrus, {1.0, 0.0}, 2), (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(nearest_rrus(rrus, {1.0, 0.0}, 1), (std::vector<std::size_t>{0}));
}

TEST(Scenario, FixedPositionsAndServingSets)
{
    SystemConfig cfg;
    cfg.num_users = 2;
    cfg.serving_set_size = 2;
    cfg.subset_floor = 1;
    cfg.user_positions = {{{10.0, 10.0}}, {{90.0, 40.0}}};
    cfg.serving_sets = {{5, 2}, {0, 1}};
    Engine rng(3);
    const auto t = build_topology(cfg, rng);
    EXPECT_DOUBLE_EQ(t.user_positions[1].x, 90.0);
    EXPECT_EQ(t.serving_sets, cfg.serving_sets);
}

TEST(Scenario, DeterministicGivenSeed)
{
    const SystemConfig cfg;
    Engine a(42), b(42), c(43);
    const auto ta = build_topology(cfg, a);
    EXPECT_EQ(ta, build_topology(cfg, b));
    EXPECT_FALSE(ta == build_topology(cfg, c));
}

TEST(Scenario, InvalidConfigAndIndicesThrow)
{
    SystemConfig cfg;
    cfg.subset_floor = 0;
    Engine rng(1);
    EXPECT_THROW(build_topology(cfg, rng), ConfigError);
    const auto t = build_topology(SystemConfig{}, rng);
    EXPECT_THROW(link_distance(t, 8, 0), std::out_of_range);
    EXPECT_THROW(link_distance(t, 0, 4), std::out_of_range);
}
