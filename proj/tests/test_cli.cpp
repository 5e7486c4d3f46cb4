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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace
{
    const std::string cli = RELCOMP_CLI_PATH;
    const std::string src = RELCOMP_SOURCE_DIR;

    int run(const std::string &args)
    {
        const int rc = std::system((cli + " " + args + " 2>/dev/null").c_str());
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    }

    std::string slurp(const std::string &path)
    {
        std::ifstream f(path, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }

    std::string tmp(const std::string &name) { return ::testing::TempDir() + "relcomp_cli_" + name; }
}

TEST(Cli, SolveIsByteIdenticalForFixedSeed)
{
    const std::string a = tmp("a.json"), b = tmp("b.json"), ch = tmp("ch.json");
    ASSERT_EQ(run("solve --config " + src + "/configs/default.json --seed 5 --out " + a + " --dump-channels " + ch), 0);
    ASSERT_EQ(run("solve --config " + src + "/configs/default.json --seed 5 --out " + b), 0);
    EXPECT_FALSE(slurp(a).empty());
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_NE(slurp(ch).find("los_blocked_estimation"), std::string::npos);
}

TEST(Cli, ExitCodes)
{
    const std::string bad = tmp("bad.json");
    {
        std::ofstream f(bad);
        f << "{\"num_users\": ";
    }
    EXPECT_EQ(run("solve --config " + bad), 2);
    {
        std::ofstream f(bad);
        f << "{\"unknown_key\": 1}";
    }
    EXPECT_EQ(run("solve --config " + bad), 2);
    EXPECT_EQ(run("solve --config /nonexistent/cfg.json"), 4);
    EXPECT_EQ(run("solve --out /nonexistent/dir/out.json"), 4);
    EXPECT_EQ(run("sweep --sweep bogus=1 --drops 1"), 2);
    EXPECT_EQ(run("sweep --solver cvx"), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    EXPECT_EQ(run("solve --hybrid compromise --n-rf 3"), 2);
}

TEST(Cli, SweepTheoryConvergenceProduceCsv)
{
    const std::string s = tmp("s.csv"), t = tmp("t.csv"), c = tmp("c.csv");
    ASSERT_EQ(run("sweep --config " + src + "/configs/fixed_users.json --sweep eta=0.01 --drops 1 --out " + s), 0);
    const std::string sw = slurp(s);
    EXPECT_EQ(sw.rfind("eta,L,tx_power_dbm,psi,beta,n_rf,hybrid,solver,drops,failures,outage,outage_ci,sum_rate,"
                       "effective_rate,theory_outage,bound_outage\n",
                       0),
              0u);
    EXPECT_EQ(std::count(sw.begin(), sw.end(), '\n'), 2);
    ASSERT_EQ(run("theory --sweep eta=0,0.005 --sweep L=1,2 --out " + t), 0);
    const std::string th = slurp(t);
    EXPECT_EQ(std::count(th.begin(), th.end(), '\n'), 1 + 2 * 2 * 4);
    ASSERT_EQ(run("convergence --seed 2 --out " + c), 0);
    EXPECT_NE(slurp(c).find("kkt,random,"), std::string::npos);
}

TEST(Cli, SweepOutputIndependentOfThreads)
{
    const std::string a = tmp("t1.csv"), b = tmp("t3.csv");
    const std::string args = "sweep --sweep L=1,3 --drops 3 --baseline cb --seed 4 ";
    ASSERT_EQ(run(args + "--threads 1 --out " + a), 0);
    ASSERT_EQ(run(args + "--threads 3 --out " + b), 0);
    EXPECT_EQ(slurp(a), slurp(b));
}
