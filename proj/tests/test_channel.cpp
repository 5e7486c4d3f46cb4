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

TEST(Channel, SteeringVectorOracle)
{
    const cvec a = steering_vector_sin(1.0, 2);
    EXPECT_NEAR(std::abs(a[0] - cplx(1.0 / std::sqrt(2.0), 0.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(a[1] - cplx(-1.0 / std::sqrt(2.0), 0.0)), 0.0, 1e-15);
    const cvec b = steering_vector(0.0, 4);
    for (Eigen::Index n = 0; n < 4; ++n)
        EXPECT_NEAR(std::abs(b[n] - 0.5), 0.0, 1e-15);
    for (double phi : {-1.2, -0.3, 0.4, 1.5})
        EXPECT_NEAR(steering_vector(phi, 16).norm(), 1.0, 1e-12);
}

TEST(Channel, BlockageProbabilityFrequency)
{
    // d = 200, eta = 0.005: blocked with probability 1 - e^-1 = 0.6321
    Engine rng(7);
    const int n = 100000;
    int blocked = 0;
    for (int i = 0; i < n; ++i)
        blocked += sample_blockage(200.0, 0.005, rng) ? 1 : 0;
    const double p = 1.0 - std::exp(-1.0);
    EXPECT_NEAR(double(blocked) / n, p, 3.0 * std::sqrt(p * (1.0 - p) / n));
}

TEST(Channel, NoBlockageAtZeroDensityOrDistance)
{
    Engine rng(1);
    for (int i = 0; i < 1000; ++i)
    {
        EXPECT_FALSE(sample_blockage(80.0, 0.0, rng));
        EXPECT_FALSE(sample_blockage(0.0, 0.5, rng));
    }
}

TEST(Channel, LosPowerFollowsPathLoss)
{
    SystemConfig cfg;
    cfg.user_positions = {{{50.0, 10.0}}, {{50.0, 20.0}}, {{50.0, 30.0}}, {{50.0, 40.0}}};
    Engine t(1);
    const Topology topo = build_topology(cfg, t);
    Engine rng(5);
    const int n = 20000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
        acc += generate_link(0, 0, topo, cfg, rng).los_component.squaredNorm();
    const double d = link_distance(topo, 0, 0);
    const double expect = double(cfg.antennas_per_rru) / double(cfg.num_paths) * std::pow(d, -2.0 * cfg.los_pathloss_exp);
    EXPECT_NEAR(acc / n / expect, 1.0, 0.05);
}

TEST(Channel, LosDirectionMatchesGeometry)
{
    SystemConfig cfg;
    cfg.num_paths = 1; // LoS only
    Engine t(2);
    const Topology topo = build_topology(cfg, t);
    Engine rng(3);
    const auto link = generate_link(2, 1, topo, cfg, rng);
    const auto &r = topo.rru_positions[2];
    const auto &u = topo.user_positions[1];
    const auto &ax = topo.rru_axes[2];
    const double s = ((u.x - r.x) * ax.x + (u.y - r.y) * ax.y) / link.distance_m;
    const cvec a = steering_vector_sin(s, cfg.antennas_per_rru);
    EXPECT_NEAR(std::abs(a.dot(link.los_component)), link.los_component.norm(), 1e-12 * link.los_component.norm());
    EXPECT_EQ(link.nlos_component.norm(), 0.0);
}

TEST(Channel, BlockedLinkKeepsOnlyScatter)
{
    SystemConfig cfg;
    Engine t(2);
    const Topology topo = build_topology(cfg, t);
    Engine rng(3);
    auto link = generate_link(0, 0, topo, cfg, rng);
    link.los_blocked = false;
    EXPECT_NEAR((link.effective() - link.los_component - link.nlos_component).norm(), 0.0, 1e-18);
    link.los_blocked = true;
    EXPECT_EQ(link.effective(), link.nlos_component);
}

TEST(Channel, SnapshotsSharePathGains)
{
    SystemConfig cfg;
    cfg.blockage_density = 0.02;
    Engine t(4), rng(9);
    const Topology topo = build_topology(cfg, t);
    const ChannelSet cs = draw_channel_set(topo, cfg, rng);
    int differ = 0;
    for (std::size_t b = 0; b < cs.num_rrus(); ++b)
        for (std::size_t k = 0; k < cs.num_users(); ++k)
        {
            EXPECT_EQ(cs.estimation(b, k).los_component, cs.transmission(b, k).los_component);
            EXPECT_EQ(cs.estimation(b, k).nlos_component, cs.transmission(b, k).nlos_component);
            differ += cs.estimation(b, k).los_blocked != cs.transmission(b, k).los_blocked;
        }
    EXPECT_GT(differ, 0); // independent blockage draws at eta = 0.02 over 32 links
}

TEST(Channel, DeterministicAndSerializable)
{
    SystemConfig cfg;
    Engine t(4), r1(9), r2(9);
    const Topology topo = build_topology(cfg, t);
    const ChannelSet a = draw_channel_set(topo, cfg, r1);
    const ChannelSet b = draw_channel_set(topo, cfg, r2);
    EXPECT_EQ(a, b);
    const auto j = channel_set_to_json(a);
    const ChannelSet back = channel_set_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(back, a);
    EXPECT_THROW(channel_set_from_json(nlohmann::json::parse(R"({"num_rrus": 1})")), ConfigError);
}
