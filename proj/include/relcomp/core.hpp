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

#ifndef relcomp_core_H
#define relcomp_core_H

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace relcomp
{
    using cplx = std::complex<double>;
    using cvec = Eigen::VectorXcd;
    using cmat = Eigen::MatrixXcd;

    // Rejected configuration or malformed input file.
    class ConfigError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Numerical failure inside one of the solvers (bisection bracket, quadrature, ...).
    class SolverError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // A caller broke a documented precondition.
    class ContractViolation : public std::logic_error
    {
    public:
        using std::logic_error::logic_error;
    };

    // Dense row-major (rrus x users) container. Indexing is (b, k) throughout the library.
    template <class T>
    class Grid
    {
    public:
        Grid() = default;
        Grid(std::size_t rows, std::size_t cols, const T &init = T{})
            : rows_(rows), cols_(cols), data_(rows * cols, init) {}

        std::size_t rows() const noexcept { return rows_; }
        std::size_t cols() const noexcept { return cols_; }

        T &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
        const T &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

        T &at(std::size_t r, std::size_t c)
        {
            check(r, c);
            return data_[r * cols_ + c];
        }
        const T &at(std::size_t r, std::size_t c) const
        {
            check(r, c);
            return data_[r * cols_ + c];
        }

        auto begin() { return data_.begin(); }
        auto end() { return data_.end(); }
        auto begin() const { return data_.begin(); }
        auto end() const { return data_.end(); }

        bool operator==(const Grid &) const = default;

    private:
        void check(std::size_t r, std::size_t c) const
        {
            if (r >= rows_ || c >= cols_)
                throw std::out_of_range("Grid index (" + std::to_string(r) + ", " + std::to_string(c) +
                                        ") outside " + std::to_string(rows_) + " x " + std::to_string(cols_));
        }

        std::size_t rows_ = 0, cols_ = 0;
        std::vector<T> data_;
    };

    using Engine = std::mt19937_64;

    // Independent engine for a (seed, tag...) tuple. Used to split one master seed into
    // per-drop / per-link streams so results do not depend on evaluation order.
    inline Engine substream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags)
    {
        std::vector<std::uint32_t> words;
        words.reserve(2 + 2 * tags.size());
        auto push = [&](std::uint64_t v)
        {
            words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
            words.push_back(static_cast<std::uint32_t>(v >> 32));
        };
        push(seed);
        for (auto t : tags)
            push(t);
        std::seed_seq seq(words.begin(), words.end());
        return Engine(seq);
    }

    // Circularly symmetric complex Gaussian with unit variance.
    template <class Rng>
    cplx complex_normal(Rng &rng)
    {
        std::normal_distribution<double> n(0.0, std::sqrt(0.5));
        const double re = n(rng);
        const double im = n(rng);
        return {re, im};
    }

    inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
}

#endif
