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

#ifndef hybridfb_rng_H
#define hybridfb_rng_H

#include <armadillo>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace hfb
{
    using Rng = std::mt19937_64;

    // Purpose tags for child-seed derivation. New tags go at the end; existing values never change
    // so that adding a consumer does not perturb the streams of the others.
    enum class SeedPurpose : std::uint64_t
    {
        channel = 1,
        csi_error = 2,
        ber = 3,
        codebook = 4,
        codebook_init = 5,
    };

    std::uint64_t splitmix64(std::uint64_t x);

    // Counter-based derivation: the seed is a hash chain over (master, purpose, index...).
    std::uint64_t derive_seed(std::uint64_t master, SeedPurpose purpose, std::initializer_list<std::uint64_t> indices);

    // Circularly-symmetric CN(0, variance)
    std::complex<double> complex_normal(Rng &rng, double variance = 1.0);
    arma::cx_mat complex_normal(Rng &rng, arma::uword rows, arma::uword cols, double variance = 1.0);
}

#endif
