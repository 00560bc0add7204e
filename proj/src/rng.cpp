// SPDX-License-Identifier: Apache-2.0
//
// hybridfb: reduced-feedback hybrid precoding for wideband mmWave MIMO-OFDM
// Copyright (C) 2026 The hybridfb authors
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

#include "hybridfb/rng.hpp"

#include <cmath>

namespace hfb
{
    std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::uint64_t derive_seed(std::uint64_t master, SeedPurpose purpose, std::initializer_list<std::uint64_t> indices)
    {
        std::uint64_t h = splitmix64(master);
        h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
        for (auto i : indices)
            h = splitmix64(h ^ splitmix64(i + 0x632be59bd9b4e019ull));
        return h;
    }

    std::complex<double> complex_normal(Rng &rng, double variance)
    {
        std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
        double re = n(rng);
        double im = n(rng);
        return {re, im};
    }

    arma::cx_mat complex_normal(Rng &rng, arma::uword rows, arma::uword cols, double variance)
    {
        std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
        arma::cx_mat out(rows, cols);
        for (arma::uword i = 0; i < out.n_elem; ++i)
        {
            double re = n(rng);
            double im = n(rng);
            out[i] = {re, im};
        }
        return out;
    }
}
