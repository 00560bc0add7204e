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

#ifndef hybridfb_channel_H
#define hybridfb_channel_H

#include "hybridfb/config.hpp"
#include "hybridfb/rng.hpp"

#include <armadillo>
#include <filesystem>
#include <vector>

namespace hfb
{
    // Geometric path parameters of one channel draw. Delays are in seconds; with the default
    // sampling_interval of 1 they are in sample units.
    struct PathSet
    {
        arma::cx_vec gains;
        arma::vec delays;
        arma::vec aod; // radians, [-pi/2, pi/2]
        arma::vec aoa;
        double pathloss = 1.0;
        double sampling_interval = 1.0;

        arma::uword size() const { return gains.n_elem; }
    };

    // taps:  N_r x N_t x D   delay-domain impulse response, slice d = H(d)
    // freq:  N_r x N_t x K   slice k-1 = H[k], k = 1..K
    struct ChannelRealization
    {
        arma::cx_cube taps;
        arma::cx_cube freq;
    };

    // CN(0,1) gains, uniform delays on [0, (D-1) T_s], uniform angles on [-pi/2, pi/2], beta = 1.
    PathSet draw_paths(const SystemConfig &config, Rng &rng);

    // (1/sqrt(N)) exp(j 2 pi s n sin(angle)), n = 0..N-1
    arma::cx_vec array_response(arma::uword num_antennas, double angle, double spacing_ratio);

    // Raised-cosine pulse evaluated at t (in units of the symbol period).
    // The removable singularities at |t| = 1/(2 rolloff) use the limit (pi/4) sinc(1/(2 rolloff)).
    double raised_cosine(double t, double rolloff);

    arma::cx_cube delay_taps(const PathSet &paths, const SystemConfig &config);

    // Direct DFT: H[k] = sum_d H(d) exp(-j 2 pi k d / K) for k = 1..K. Works on any cube whose
    // slices are delay taps (full channel or effective channel).
    arma::cx_cube to_frequency(const arma::cx_cube &taps, arma::uword num_subcarriers);

    // Same transform, evaluated only at the listed subcarriers (1-based).
    arma::cx_cube to_frequency_at(const arma::cx_cube &taps, arma::uword num_subcarriers,
                                  const std::vector<arma::uword> &subcarriers);

    ChannelRealization realize(const PathSet &paths, const SystemConfig &config);

    // H_est[k] = rho H[k] + sqrt(1 - rho^2) E[k], E entries i.i.d. CN(0,1), fresh per subcarrier.
    // rho == 1 returns the input untouched and draws nothing.
    arma::cx_cube corrupt_csi(const arma::cx_cube &true_eff, double rho, Rng &rng);

    double frobenius_energy(const arma::cx_cube &c);

    // Binary cache keyed by (config hash, seed).
    std::filesystem::path channel_cache_path(const std::filesystem::path &dir, const SystemConfig &config, std::uint64_t seed);
    void save_channel(const ChannelRealization &channel, const std::filesystem::path &file);
    ChannelRealization load_channel(const std::filesystem::path &file);
}

#endif
