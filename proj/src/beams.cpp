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

#include "hybridfb/beams.hpp"
#include "hybridfb/error.hpp"

#include <cmath>
#include <numbers>

namespace hfb
{
    arma::vec path_powers(const PathSet &paths, const SystemConfig &config)
    {
        arma::vec gamma(paths.size(), arma::fill::zeros);
        for (arma::uword l = 0; l < paths.size(); ++l)
        {
            const double g = std::norm(paths.gains(l));
            double acc = 0.0;
            for (arma::uword d = 0; d < config.max_delay_taps; ++d)
            {
                const double t = (double(d) * paths.sampling_interval - paths.delays(l)) / paths.sampling_interval;
                const double p = raised_cosine(t, config.rolloff);
                acc += g * p * p;
            }
            gamma(l) = acc;
        }
        return gamma;
    }

    std::vector<arma::uword> select_paths(const arma::vec &powers, arma::uword count)
    {
        if (count > powers.n_elem)
            throw InvalidRequest("select_paths: requested " + std::to_string(count) + " paths out of " +
                                 std::to_string(powers.n_elem));
        std::vector<bool> used(powers.n_elem, false);
        std::vector<arma::uword> out;
        out.reserve(count);
        for (arma::uword i = 0; i < count; ++i)
        {
            arma::uword best = powers.n_elem;
            for (arma::uword l = 0; l < powers.n_elem; ++l)
            {
                if (used[l])
                    continue;
                if (best == powers.n_elem || powers(l) > powers(best))
                    best = l;
            }
            used[best] = true;
            out.push_back(best);
        }
        return out;
    }

    PathPowerRanking rank_paths(const PathSet &paths, const SystemConfig &config)
    {
        PathPowerRanking r;
        r.powers = path_powers(paths, config);
        r.selected = select_paths(r.powers, std::max(config.num_tx_rf, config.num_rx_rf));
        return r;
    }

    arma::vec receive_direction_gains(const PathSet &paths, const arma::cx_cube &taps, const SystemConfig &config)
    {
        arma::vec g(paths.size(), arma::fill::zeros);
        for (arma::uword l = 0; l < paths.size(); ++l)
        {
            const arma::cx_rowvec ar = array_response(config.num_rx_antennas, paths.aoa(l), config.antenna_spacing).t();
            for (arma::uword d = 0; d < taps.n_slices; ++d)
                g(l) += std::pow(arma::norm(ar * taps.slice(d)), 2);
        }
        return g;
    }

    arma::cx_vec steering_column(arma::uword num_antennas, double angle, double spacing_ratio, unsigned phase_bits)
    {
        if (phase_bits == 0)
            return array_response(num_antennas, angle, spacing_ratio);

        const double two_pi = 2.0 * std::numbers::pi;
        const double levels = double(1u << phase_bits);
        const double step = two_pi * spacing_ratio * std::sin(angle);
        const double scale = 1.0 / std::sqrt(double(num_antennas));
        arma::cx_vec a(num_antennas);
        for (arma::uword n = 0; n < num_antennas; ++n)
        {
            double level = std::round(step * double(n) / two_pi * levels);
            level = std::fmod(level, levels);
            if (level < 0.0)
                level += levels;
            a(n) = std::polar(scale, two_pi * level / levels);
        }
        return a;
    }

    AnalogBeamformers build_analog(const PathSet &paths, const PathPowerRanking &ranking, const SystemConfig &config,
                                   const arma::cx_cube *taps)
    {
        const arma::uword NtRF = config.num_tx_rf, NrRF = config.num_rx_rf;
        if (ranking.selected.size() < NtRF)
            throw InvalidRequest("build_analog: ranking holds fewer paths than transmit RF chains");

        AnalogBeamformers b;
        b.tx_paths.assign(ranking.selected.begin(), ranking.selected.begin() + NtRF);

        if (config.rx_ranking == RxRanking::shared)
        {
            if (ranking.selected.size() < NrRF)
                throw InvalidRequest("build_analog: ranking holds fewer paths than receive RF chains");
            b.rx_paths.assign(ranking.selected.begin(), ranking.selected.begin() + NrRF);
        }
        else
        {
            if (taps == nullptr)
                throw InvalidRequest("build_analog: independent receive ranking needs the delay taps");
            b.rx_paths = select_paths(receive_direction_gains(paths, *taps, config), NrRF);
        }

        b.precoder.set_size(config.num_tx_antennas, NtRF);
        for (arma::uword i = 0; i < NtRF; ++i)
            b.precoder.col(i) = steering_column(config.num_tx_antennas, paths.aod(b.tx_paths[i]),
                                                config.antenna_spacing, config.phase_bits);
        b.combiner.set_size(config.num_rx_antennas, NrRF);
        for (arma::uword i = 0; i < NrRF; ++i)
            b.combiner.col(i) = steering_column(config.num_rx_antennas, paths.aoa(b.rx_paths[i]),
                                                config.antenna_spacing, config.phase_bits);
        return b;
    }

    arma::cx_cube effective_channel(const arma::cx_cube &freq, const AnalogBeamformers &beams)
    {
        if (freq.n_rows != beams.combiner.n_rows || freq.n_cols != beams.precoder.n_rows)
            throw InvalidRequest("effective_channel: channel is " + std::to_string(freq.n_rows) + "x" +
                                 std::to_string(freq.n_cols) + " but beamformers expect " +
                                 std::to_string(beams.combiner.n_rows) + "x" + std::to_string(beams.precoder.n_rows));
        const arma::cx_mat wh = beams.combiner.t();
        arma::cx_cube out(beams.combiner.n_cols, beams.precoder.n_cols, freq.n_slices);
        for (arma::uword k = 0; k < freq.n_slices; ++k)
            out.slice(k) = wh * freq.slice(k) * beams.precoder;
        return out;
    }
}
