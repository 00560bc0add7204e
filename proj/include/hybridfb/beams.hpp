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

#ifndef hybridfb_beams_H
#define hybridfb_beams_H

#include "hybridfb/channel.hpp"
#include "hybridfb/config.hpp"

#include <armadillo>
#include <vector>

namespace hfb
{
    // Per-path accumulated power and the greedy selection order derived from it.
    // `selected` holds 0-based path indices, strongest first.
    struct PathPowerRanking
    {
        arma::vec powers;
        std::vector<arma::uword> selected;
    };

    // Frequency-flat analog stages shared by every subcarrier.
    struct AnalogBeamformers
    {
        arma::cx_mat precoder; // F_RF, N_t x N_t_RF
        arma::cx_mat combiner; // W_RF, N_r x N_r_RF
        std::vector<arma::uword> tx_paths;
        std::vector<arma::uword> rx_paths;
    };

    // gamma_l = sum_d |alpha_l p_rc(d T_s - tau_l)|^2
    arma::vec path_powers(const PathSet &paths, const SystemConfig &config);

    // Greedy argmax without replacement, ties to the lowest index. Throws InvalidRequest if count > L.
    std::vector<arma::uword> select_paths(const arma::vec &powers, arma::uword count);

    // Ranks enough paths to serve both sides: max(N_t_RF, N_r_RF).
    PathPowerRanking rank_paths(const PathSet &paths, const SystemConfig &config);

    // Receive array gain per path direction, sum_d ||a_r(phi_l)^H H(d)||^2. Used by RxRanking::independent.
    arma::vec receive_direction_gains(const PathSet &paths, const arma::cx_cube &taps, const SystemConfig &config);

    // Constant-modulus entry with the phase optionally rounded to a multiple of 2 pi / 2^phase_bits.
    arma::cx_vec steering_column(arma::uword num_antennas, double angle, double spacing_ratio, unsigned phase_bits);

    // Column i of F_RF steers at the AoD of the i-th ranked path, column i of W_RF at the AoA of
    // the i-th receive path. `taps` is only consulted for RxRanking::independent.
    AnalogBeamformers build_analog(const PathSet &paths, const PathPowerRanking &ranking, const SystemConfig &config,
                                   const arma::cx_cube *taps = nullptr);

    // H_eff[k] = W_RF^H H[k] F_RF for every slice. Throws InvalidRequest on dimension mismatch.
    arma::cx_cube effective_channel(const arma::cx_cube &freq, const AnalogBeamformers &beams);
}

#endif
