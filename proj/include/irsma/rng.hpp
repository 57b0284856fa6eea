// SPDX-License-Identifier: Apache-2.0
//
// irsma - IRS-assisted movable-antenna downlink simulation library
// Copyright (C) 2026 The irsma authors
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

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "irsma/types.hpp"

namespace irsma
{
    using Rng = std::mt19937_64;

    inline std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    inline std::uint64_t fnv1a(std::string_view s)
    {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char c : s)
        {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        return h;
    }

    // Independent generator for one (master seed, realization, purpose) triple.
    // Every stochastic draw in the library goes through one of these so that results do not depend on
    // execution order or thread count.
    inline Rng substream(std::uint64_t master_seed, std::uint64_t realization, std::string_view purpose)
    {
        std::uint64_t s = splitmix64(master_seed);
        s = splitmix64(s ^ splitmix64(realization + 0x632BE59BD9B4E019ull));
        s = splitmix64(s ^ fnv1a(purpose));
        std::seed_seq seq{std::uint32_t(s), std::uint32_t(s >> 32)};
        return Rng(seq);
    }

    // CN(0, variance)
    inline cplx complex_gaussian(Rng &rng, double variance = 1.0)
    {
        std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * variance));
        const double re = nd(rng);
        const double im = nd(rng);
        return {re, im};
    }

    inline double uniform(Rng &rng, double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }

    inline cplx random_unit_phase(Rng &rng)
    {
        return std::polar(1.0, uniform(rng, 0.0, 2.0 * pi));
    }
}
