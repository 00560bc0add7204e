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

#include "hybridfb/channel.hpp"
#include "hybridfb/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

namespace hfb
{
    PathSet draw_paths(const SystemConfig &config, Rng &rng)
    {
        const arma::uword L = config.num_paths;
        PathSet p;
        p.gains.set_size(L);
        p.delays.set_size(L);
        p.aod.set_size(L);
        p.aoa.set_size(L);

        const double max_delay = double(config.max_delay_taps - 1) * p.sampling_interval;
        std::uniform_real_distribution<double> delay(0.0, max_delay);
        std::uniform_real_distribution<double> angle(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);

        // Draw order is part of the reproducibility contract: per path gain, delay, aod, aoa.
        for (arma::uword l = 0; l < L; ++l)
        {
            p.gains(l) = complex_normal(rng);
            p.delays(l) = max_delay > 0.0 ? delay(rng) : 0.0;
            p.aod(l) = angle(rng);
            p.aoa(l) = angle(rng);
        }
        return p;
    }

    arma::cx_vec array_response(arma::uword num_antennas, double angle, double spacing_ratio)
    {
        if (num_antennas == 0)
            throw InvalidRequest("array_response: num_antennas must be positive");
        const double scale = 1.0 / std::sqrt(double(num_antennas));
        const double step = 2.0 * std::numbers::pi * spacing_ratio * std::sin(angle);
        arma::cx_vec a(num_antennas);
        for (arma::uword n = 0; n < num_antennas; ++n)
            a(n) = std::polar(scale, step * double(n));
        return a;
    }

    namespace
    {
        double sinc(double x)
        {
            if (x == 0.0)
                return 1.0;
            const double px = std::numbers::pi * x;
            return std::sin(px) / px;
        }
    }

    double raised_cosine(double t, double rolloff)
    {
        if (rolloff == 0.0)
            return sinc(t);
        const double x = 2.0 * rolloff * t;
        const double denom = 1.0 - x * x;
        if (std::abs(denom) < 1e-10)
            return (std::numbers::pi / 4.0) * sinc(1.0 / (2.0 * rolloff));
        return sinc(t) * std::cos(std::numbers::pi * rolloff * t) / denom;
    }

    arma::cx_cube delay_taps(const PathSet &paths, const SystemConfig &config)
    {
        const arma::uword Nt = config.num_tx_antennas, Nr = config.num_rx_antennas, D = config.max_delay_taps;
        const double L = double(paths.size());
        const double scale = std::sqrt(paths.pathloss * double(Nt) * double(Nr) / L);

        arma::cx_cube taps(Nr, Nt, D, arma::fill::zeros);
        for (arma::uword l = 0; l < paths.size(); ++l)
        {
            const arma::cx_mat outer = array_response(Nr, paths.aoa(l), config.antenna_spacing) *
                                       array_response(Nt, paths.aod(l), config.antenna_spacing).t();
            for (arma::uword d = 0; d < D; ++d)
            {
                const double t = (double(d) * paths.sampling_interval - paths.delays(l)) / paths.sampling_interval;
                const std::complex<double> w = scale * paths.gains(l) * raised_cosine(t, config.rolloff);
                taps.slice(d) += w * outer;
            }
        }
        return taps;
    }

    namespace
    {
        // D x n twiddle matrix for the requested subcarriers; phases reduced mod K before scaling
        arma::cx_mat twiddles(arma::uword D, arma::uword K, const std::vector<arma::uword> &subcarriers)
        {
            arma::cx_mat T(D, subcarriers.size());
            for (arma::uword c = 0; c < subcarriers.size(); ++c)
            {
                const arma::uword k = subcarriers[c];
                for (arma::uword d = 0; d < D; ++d)
                {
                    const arma::uword r = (k * d) % K;
                    T(d, c) = std::polar(1.0, -2.0 * std::numbers::pi * double(r) / double(K));
                }
            }
            return T;
        }
    }

    arma::cx_cube to_frequency_at(const arma::cx_cube &taps, arma::uword num_subcarriers,
                                  const std::vector<arma::uword> &subcarriers)
    {
        if (taps.n_slices > num_subcarriers)
            throw InvalidRequest("to_frequency: number of taps exceeds number of subcarriers");
        for (auto k : subcarriers)
            if (k < 1 || k > num_subcarriers)
                throw InvalidRequest("to_frequency: subcarrier index out of range");

        const arma::uword rows = taps.n_rows, cols = taps.n_cols, D = taps.n_slices;
        // Cube memory is slice-major, so the taps form a (rows*cols) x D matrix without copying.
        const arma::cx_mat flat(const_cast<std::complex<double> *>(taps.memptr()), rows * cols, D, false, true);
        arma::cx_mat out = flat * twiddles(D, num_subcarriers, subcarriers);
        return arma::cx_cube(out.memptr(), rows, cols, subcarriers.size());
    }

    arma::cx_cube to_frequency(const arma::cx_cube &taps, arma::uword num_subcarriers)
    {
        std::vector<arma::uword> all(num_subcarriers);
        for (arma::uword k = 0; k < num_subcarriers; ++k)
            all[k] = k + 1;
        return to_frequency_at(taps, num_subcarriers, all);
    }

    ChannelRealization realize(const PathSet &paths, const SystemConfig &config)
    {
        ChannelRealization ch;
        ch.taps = delay_taps(paths, config);
        ch.freq = to_frequency(ch.taps, config.num_subcarriers);
        return ch;
    }

    arma::cx_cube corrupt_csi(const arma::cx_cube &true_eff, double rho, Rng &rng)
    {
        if (!(rho >= 0.0 && rho <= 1.0))
            throw InvalidRequest("corrupt_csi: rho must lie in [0, 1]");
        if (rho == 1.0)
            return true_eff;
        const double err_scale = std::sqrt(1.0 - rho * rho);
        arma::cx_cube out(arma::size(true_eff));
        for (arma::uword k = 0; k < true_eff.n_slices; ++k)
            out.slice(k) = rho * true_eff.slice(k) + err_scale * complex_normal(rng, true_eff.n_rows, true_eff.n_cols);
        return out;
    }

    double frobenius_energy(const arma::cx_cube &c)
    {
        double e = 0.0;
        for (arma::uword i = 0; i < c.n_elem; ++i)
            e += std::norm(c[i]);
        return e;
    }

    std::filesystem::path channel_cache_path(const std::filesystem::path &dir, const SystemConfig &config, std::uint64_t seed)
    {
        char name[64];
        std::snprintf(name, sizeof(name), "channel_%016llx_%llu.bin",
                      static_cast<unsigned long long>(config_hash(config)), static_cast<unsigned long long>(seed));
        return dir / name;
    }

    void save_channel(const ChannelRealization &channel, const std::filesystem::path &file)
    {
        std::ofstream out(file, std::ios::binary);
        if (!out)
            throw IoError("cannot write channel cache " + file.string());
        if (!channel.taps.save(out, arma::arma_binary) || !channel.freq.save(out, arma::arma_binary))
            throw IoError("failed writing channel cache " + file.string());
    }

    ChannelRealization load_channel(const std::filesystem::path &file)
    {
        std::ifstream in(file, std::ios::binary);
        if (!in)
            throw IoError("cannot read channel cache " + file.string());
        ChannelRealization ch;
        if (!ch.taps.load(in, arma::arma_binary) || !ch.freq.load(in, arma::arma_binary))
            throw IoError("corrupt channel cache " + file.string());
        return ch;
    }
}
