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

#ifndef relcomp_subsets_H
#define relcomp_subsets_H

#include "core.hpp"

#include <algorithm>

namespace relcomp
{
    // One admissible blockage pattern of a user: the RRUs still available, the blocked rest of
    // the serving set, and a length-B mask that is 1 for every RRU not in `blocked`.
    struct SubsetEntry
    {
        std::vector<std::size_t> available;
        std::vector<std::size_t> blocked;
        std::vector<char> mask;
        bool operator==(const SubsetEntry &) const = default;
    };

    using SubsetFamily = std::vector<std::vector<SubsetEntry>>; // [user][subset]

    inline std::uint64_t binomial(std::size_t n, std::size_t k)
    {
        if (k > n)
            return 0;
        k = std::min(k, n - k);
        std::uint64_t r = 1;
        for (std::size_t i = 1; i <= k; ++i)
            r = r * (n - k + i) / i;
        return r;
    }

    inline std::uint64_t subset_count(std::size_t setsize, std::size_t L)
    {
        if (L < 1 || L > setsize)
            throw ContractViolation("subset_count: need 1 <= L <= set size");
        std::uint64_t c = 0;
        for (std::size_t l = L; l <= setsize; ++l)
            c += binomial(setsize, l);
        return c;
    }

    // All subsets of `serving` with at least L members, largest first and lexicographic (over the
    // ascending RRU indices) within a size. num_rrus sets the mask length.
    inline std::vector<SubsetEntry> enumerate_subsets(const std::vector<std::size_t> &serving, std::size_t L,
                                                      std::size_t num_rrus)
    {
        const std::size_t n = serving.size();
        if (L < 1 || L > n)
            throw ContractViolation("enumerate_subsets: need 1 <= L <= |serving set|");
        if (n > 62)
            throw ContractViolation("enumerate_subsets: serving set too large");
        std::vector<std::size_t> sorted = serving;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ContractViolation("enumerate_subsets: duplicate RRU in serving set");
        if (!sorted.empty() && sorted.back() >= num_rrus)
            throw ContractViolation("enumerate_subsets: RRU index out of range");

        std::vector<SubsetEntry> out;
        out.reserve(subset_count(n, L));
        for (std::size_t l = n; l >= L; --l)
        {
            // selection vector with l leading ones; prev_permutation walks combinations lexicographically
            std::vector<char> pick(n, 0);
            std::fill(pick.begin(), pick.begin() + l, 1);
            do
            {
                SubsetEntry e;
                e.mask.assign(num_rrus, 1);
                for (std::size_t i = 0; i < n; ++i)
                {
                    if (pick[i])
                        e.available.push_back(sorted[i]);
                    else
                    {
                        e.blocked.push_back(sorted[i]);
                        e.mask[sorted[i]] = 0;
                    }
                }
                out.push_back(std::move(e));
            } while (std::prev_permutation(pick.begin(), pick.end()));
        }
        return out;
    }

    inline SubsetFamily build_subset_family(const std::vector<std::vector<std::size_t>> &serving_sets,
                                            const std::vector<std::size_t> &floors, std::size_t num_rrus)
    {
        if (floors.size() != serving_sets.size())
            throw ContractViolation("build_subset_family: one floor per user required");
        SubsetFamily fam;
        for (std::size_t k = 0; k < serving_sets.size(); ++k)
            fam.push_back(enumerate_subsets(serving_sets[k], floors[k], num_rrus));
        return fam;
    }

    // Concatenation of mask[b] * h_b over all b (length B * Nt).
    inline cvec stacked_channel(const std::vector<cvec> &per_rru, const std::vector<char> &mask)
    {
        if (per_rru.size() != mask.size())
            throw ContractViolation("stacked_channel: mask length mismatch");
        Eigen::Index total = 0;
        for (const auto &v : per_rru)
            total += v.size();
        cvec out = cvec::Zero(total);
        Eigen::Index off = 0;
        for (std::size_t b = 0; b < per_rru.size(); ++b)
        {
            if (mask[b])
                out.segment(off, per_rru[b].size()) = per_rru[b];
            off += per_rru[b].size();
        }
        return out;
    }

    // Same layout for a user's beamformer blocks; blocks outside the serving mask are zero.
    inline cvec stacked_beamformer(const std::vector<cvec> &per_rru, const std::vector<char> &serving_mask)
    {
        return stacked_channel(per_rru, serving_mask);
    }
}

#endif
