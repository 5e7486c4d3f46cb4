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

#ifndef relcomp_metrics_H
#define relcomp_metrics_H

#include "scenario.hpp"
#include "subsets.hpp"

#include <limits>

namespace relcomp
{
    // f(b, k): beamformer of RRU b for user k, zero when b does not serve k.
    using BeamformerSet = Grid<cvec>;

    inline BeamformerSet zero_beams(std::size_t B, std::size_t K, std::size_t nt)
    {
        return BeamformerSet(B, K, cvec::Zero(nt));
    }

    // Everything a beamforming solver needs about one drop.
    struct Problem
    {
        Grid<cvec> h;                                 // (b, k) channel used for the design
        std::vector<std::vector<std::size_t>> serving; // B_k
        Grid<char> serves;                            // (b, k) = b in B_k
        SubsetFamily family;
        std::vector<double> power; // per RRU [W]
        double noise = 1.0;        // sigma^2 [W]
        std::vector<double> weights;

        std::size_t num_rrus() const { return h.rows(); }
        std::size_t num_users() const { return h.cols(); }
        std::size_t antennas() const { return h.rows() ? std::size_t(h(0, 0).size()) : 0; }
    };

    inline Problem make_problem(Grid<cvec> h, std::vector<std::vector<std::size_t>> serving,
                                const std::vector<std::size_t> &floors, std::vector<double> power, double noise,
                                std::vector<double> weights)
    {
        const std::size_t B = h.rows(), K = h.cols();
        if (B == 0 || K == 0)
            throw ContractViolation("make_problem: empty channel grid");
        if (serving.size() != K || weights.size() != K || power.size() != B)
            throw ContractViolation("make_problem: dimension mismatch");
        if (!(noise > 0.0))
            throw ContractViolation("make_problem: noise power must be positive");
        const Eigen::Index nt = h(0, 0).size();
        for (const auto &v : h)
            if (v.size() != nt)
                throw ContractViolation("make_problem: ragged channel vectors");

        Problem p;
        p.family = build_subset_family(serving, floors, B);
        p.serves = Grid<char>(B, K, 0);
        for (std::size_t k = 0; k < K; ++k)
            for (auto b : serving[k])
                p.serves(b, k) = 1;
        p.h = std::move(h);
        p.serving = std::move(serving);
        p.power = std::move(power);
        p.noise = noise;
        p.weights = std::move(weights);
        return p;
    }

    // Floor is clipped to the serving set size, so singleton serving sets work with any config.
    inline Problem make_problem(Grid<cvec> h, const std::vector<std::vector<std::size_t>> &serving,
                                const SystemConfig &cfg)
    {
        std::vector<std::size_t> floors;
        for (const auto &s : serving)
            floors.push_back(std::min(cfg.subset_floor, s.size()));
        std::vector<double> power(h.rows(), cfg.tx_power_watt());
        return make_problem(std::move(h), serving, floors, std::move(power), cfg.noise_power_watt(), cfg.weights());
    }

    // sum_b mask[b] h_{b,k}^H f_{b,j}; a null mask means all RRUs.
    inline cplx masked_link_sum(const Grid<cvec> &h, std::size_t k, const std::vector<char> *mask,
                                const BeamformerSet &f, std::size_t j)
    {
        cplx s = 0.0;
        for (std::size_t b = 0; b < h.rows(); ++b)
            if (!mask || (*mask)[b])
                s += h(b, k).dot(f(b, j));
        return s;
    }

    inline double sinr_masked(const Grid<cvec> &h, std::size_t k, const std::vector<char> *mask,
                              const BeamformerSet &f, double sigma2)
    {
        double interf = sigma2;
        double sig = 0.0;
        for (std::size_t u = 0; u < h.cols(); ++u)
        {
            const double p = std::norm(masked_link_sum(h, k, mask, f, u));
            (u == k ? sig : interf) += p;
        }
        return sig / interf;
    }

    inline double sinr_full(std::size_t k, const Grid<cvec> &h, const BeamformerSet &f, double sigma2)
    {
        return sinr_masked(h, k, nullptr, f, sigma2);
    }

    inline double sinr_subset(std::size_t k, std::size_t c, const Grid<cvec> &h, const BeamformerSet &f,
                              double sigma2, const SubsetFamily &family)
    {
        return sinr_masked(h, k, &family.at(k).at(c).mask, f, sigma2);
    }

    inline double interference_plus_noise(std::size_t k, std::size_t c, const Grid<cvec> &h,
                                          const BeamformerSet &f, double sigma2, const SubsetFamily &family)
    {
        const auto &mask = family.at(k).at(c).mask;
        double v = sigma2;
        for (std::size_t u = 0; u < h.cols(); ++u)
            if (u != k)
                v += std::norm(masked_link_sum(h, k, &mask, f, u));
        return v;
    }

    // sigma^2 + sum over all users j of |hbar_k^c^H fbar_j|^2
    inline double received_plus_noise(std::size_t k, std::size_t c, const Grid<cvec> &h, const BeamformerSet &f,
                                      double sigma2, const SubsetFamily &family)
    {
        const auto &mask = family.at(k).at(c).mask;
        double v = sigma2;
        for (std::size_t u = 0; u < h.cols(); ++u)
            v += std::norm(masked_link_sum(h, k, &mask, f, u));
        return v;
    }

    // Quadratic-over-linear term: (sigma^2 + sum_j |s_j|^2) / (1 + gamma).
    inline double qol_function(std::size_t k, std::size_t c, const Grid<cvec> &h, const BeamformerSet &f,
                               double gamma, double sigma2, const SubsetFamily &family)
    {
        return received_plus_noise(k, c, h, f, sigma2, family) / (1.0 + gamma);
    }

    // First-order expansion of qol_function around (point_f, point_gamma); affine in (f, gamma).
    inline double taylor_surrogate(std::size_t k, std::size_t c, const Grid<cvec> &h, const BeamformerSet &f,
                                   double gamma, const BeamformerSet &point_f, double point_gamma, double sigma2,
                                   const SubsetFamily &family)
    {
        if (point_gamma < 0.0)
            throw ContractViolation("taylor_surrogate: point_gamma must be nonnegative");
        const auto &mask = family.at(k).at(c).mask;
        const double g1 = 1.0 + point_gamma;
        double lin = 0.0, a0 = sigma2;
        for (std::size_t j = 0; j < h.cols(); ++j)
        {
            const cplx s0 = masked_link_sum(h, k, &mask, point_f, j);
            const cplx s = masked_link_sum(h, k, &mask, f, j);
            lin += 2.0 * (std::conj(s0) * (s - s0)).real();
            a0 += std::norm(s0);
        }
        return lin / g1 + a0 / g1 * (1.0 - (gamma - point_gamma) / g1);
    }

    inline double pessimistic_sinr(std::size_t k, const Grid<cvec> &h, const BeamformerSet &f, double sigma2,
                                   const SubsetFamily &family)
    {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < family.at(k).size(); ++c)
            m = std::min(m, sinr_subset(k, c, h, f, sigma2, family));
        return m;
    }

    // sum_k w_k ln(1 + gamma_k)
    inline double weighted_sum_rate(const std::vector<double> &gammas, const std::vector<double> &weights)
    {
        if (gammas.size() != weights.size())
            throw ContractViolation("weighted_sum_rate: size mismatch");
        double r = 0.0;
        for (std::size_t k = 0; k < gammas.size(); ++k)
            r += weights[k] * std::log1p(gammas[k]);
        return r;
    }

    inline double rru_power(const BeamformerSet &f, std::size_t b)
    {
        double p = 0.0;
        for (std::size_t k = 0; k < f.cols(); ++k)
            p += f(b, k).squaredNorm();
        return p;
    }

    struct SinrReport
    {
        std::vector<double> full;                // design-channel SINR with all serving RRUs
        std::vector<std::vector<double>> subset; // [k][c]
        std::vector<double> pessimistic;         // min over c
        std::vector<double> assigned_rate;       // log2(1 + pessimistic) [bit/s/Hz]
        std::vector<double> supported_rate;      // log2(1 + SINR on the transmission channel)
    };

    inline SinrReport sinr_report(const Grid<cvec> &h_design, const Grid<cvec> &h_actual, const BeamformerSet &f,
                                  double sigma2, const SubsetFamily &family)
    {
        SinrReport r;
        const std::size_t K = h_design.cols();
        for (std::size_t k = 0; k < K; ++k)
        {
            r.full.push_back(sinr_full(k, h_design, f, sigma2));
            std::vector<double> s;
            for (std::size_t c = 0; c < family.at(k).size(); ++c)
                s.push_back(sinr_subset(k, c, h_design, f, sigma2, family));
            const double pess = *std::min_element(s.begin(), s.end());
            r.subset.push_back(std::move(s));
            r.pessimistic.push_back(pess);
            r.assigned_rate.push_back(std::log2(1.0 + pess));
            r.supported_rate.push_back(std::log2(1.0 + sinr_full(k, h_actual, f, sigma2)));
        }
        return r;
    }
}

#endif
