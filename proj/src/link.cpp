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

#include "hybridfb/link.hpp"
#include "hybridfb/error.hpp"

#include <cmath>
#include <numbers>

namespace hfb
{
    EqualizerSpec EqualizerSpec::make(Equalizer kind, double total_power, arma::uword num_subcarriers,
                                      arma::uword num_streams, double noise_variance, const arma::cx_mat &rf_combiner,
                                      NoiseModel noise)
    {
        EqualizerSpec s;
        s.kind = kind;
        s.signal_cov = arma::cx_mat(num_streams, num_streams, arma::fill::eye) *
                       (total_power / (double(num_subcarriers) * double(num_streams)));
        if (noise == NoiseModel::colored)
            s.noise_cov = noise_variance * (rf_combiner.t() * rf_combiner);
        else
            s.noise_cov = noise_variance * arma::cx_mat(rf_combiner.n_cols, rf_combiner.n_cols, arma::fill::eye);
        return s;
    }

    double total_power_for_snr(double snr_db, arma::uword num_subcarriers, double noise_variance)
    {
        return double(num_subcarriers) * noise_variance * std::pow(10.0, snr_db / 10.0);
    }

    double transmit_power(const PrecoderAssignment &assignment, const arma::cx_mat &rf_precoder)
    {
        double total = 0.0;
        for (arma::uword k = 0; k < assignment.F.n_slices; ++k)
            total += std::pow(arma::norm(rf_precoder * assignment.F.slice(k), "fro"), 2);
        return total;
    }

    PrecoderAssignment normalize_power(PrecoderAssignment assignment, const arma::cx_mat &rf_precoder)
    {
        const double current = transmit_power(assignment, rf_precoder);
        if (!(current > 0.0))
            throw DegenerateInput("normalize_power: assignment carries no transmit power");
        const double target = double(assignment.num_subcarriers()) * double(assignment.num_streams());
        assignment.F *= std::sqrt(target / current);
        return assignment;
    }

    arma::cx_mat combiner(const arma::cx_mat &h_eff_k, const arma::cx_mat &f_k, const EqualizerSpec &spec)
    {
        const arma::cx_mat G = h_eff_k * f_k;
        if (spec.kind == Equalizer::zf)
        {
            const double c = arma::cond(G);
            if (!(c <= kZfConditionLimit))
                throw SingularityError("zero-forcing combiner: equivalent channel is rank deficient", c);
            const arma::cx_mat gh = G.t();
            return arma::solve(arma::cx_mat(gh * G), gh);
        }
        const arma::cx_mat A = G * spec.signal_cov * G.t() + spec.noise_cov;
        // W = R_s G^H A^{-1}  <=>  W^H = A^{-1} G R_s (A Hermitian)
        return arma::cx_mat(arma::solve(A, arma::cx_mat(G * spec.signal_cov))).t();
    }

    CombinerSet combiners(const arma::cx_cube &h_eff, const PrecoderAssignment &assignment, const EqualizerSpec &spec)
    {
        CombinerSet out;
        out.W.set_size(assignment.num_streams(), h_eff.n_rows, h_eff.n_slices);
        for (arma::uword k = 0; k < h_eff.n_slices; ++k)
        {
            try
            {
                out.W.slice(k) = combiner(h_eff.slice(k), assignment.F.slice(k), spec);
            }
            catch (const SingularityError &)
            {
                out.W.slice(k) = arma::pinv(arma::cx_mat(h_eff.slice(k) * assignment.F.slice(k)));
                out.flagged.push_back(k + 1);
            }
        }
        return out;
    }

    double log_det_rate(const arma::cx_mat &h_eq, double snr_scale)
    {
        const arma::cx_mat M = arma::cx_mat(h_eq.n_rows, h_eq.n_rows, arma::fill::eye) + snr_scale * (h_eq * h_eq.t());
        std::complex<double> val;
        double sign;
        arma::log_det(val, sign, M);
        return std::max(0.0, val.real() / std::numbers::ln2);
    }

    namespace
    {
        template <typename Equivalent>
        LinkMetrics rates(const PrecoderAssignment &assignment, double total_power, double noise_variance, Equivalent eq)
        {
            const arma::uword K = assignment.num_subcarriers();
            const double scale = total_power / (double(K) * double(assignment.num_streams()) * noise_variance);
            LinkMetrics m;
            m.per_subcarrier_rate.set_size(K);
            for (arma::uword k = 0; k < K; ++k)
                m.per_subcarrier_rate(k) = log_det_rate(eq(k), scale);
            m.spectral_efficiency = K ? arma::mean(m.per_subcarrier_rate) : 0.0;
            return m;
        }
    }

    LinkMetrics spectral_efficiency(const arma::cx_cube &h_eff, const PrecoderAssignment &assignment,
                                    const arma::cx_cube &combiners, double total_power, double noise_variance)
    {
        return rates(assignment, total_power, noise_variance, [&](arma::uword k)
                     { return arma::cx_mat(combiners.slice(k) * h_eff.slice(k) * assignment.F.slice(k)); });
    }

    LinkMetrics spectral_efficiency_direct(const arma::cx_cube &h_eff, const PrecoderAssignment &assignment,
                                           double total_power, double noise_variance)
    {
        return rates(assignment, total_power, noise_variance, [&](arma::uword k)
                     { return arma::cx_mat(h_eff.slice(k) * assignment.F.slice(k)); });
    }

    std::complex<double> Qpsk::map(const std::uint8_t *bits) const
    {
        const double s = 1.0 / std::numbers::sqrt2;
        return {bits[0] ? -s : s, bits[1] ? -s : s};
    }

    void Qpsk::demap(std::complex<double> symbol, std::uint8_t *bits) const
    {
        bits[0] = symbol.real() < 0.0 ? 1 : 0;
        bits[1] = symbol.imag() < 0.0 ? 1 : 0;
    }

    BerResult simulate_ber(const arma::cx_cube &h_eff, const arma::cx_mat &rf_combiner,
                           const PrecoderAssignment &assignment, const arma::cx_cube &combiners, double total_power,
                           double noise_variance, arma::uword num_symbols, Rng &rng)
    {
        static const Qpsk qpsk;
        return simulate_ber(h_eff, rf_combiner, assignment, combiners, total_power, noise_variance, num_symbols, rng,
                            qpsk);
    }

    BerResult simulate_ber(const arma::cx_cube &h_eff, const arma::cx_mat &rf_combiner,
                           const PrecoderAssignment &assignment, const arma::cx_cube &combiners, double total_power,
                           double noise_variance, arma::uword num_symbols, Rng &rng, const Modulation &modulation)
    {
        const arma::uword K = assignment.num_subcarriers(), Ns = assignment.num_streams();
        const unsigned bps = modulation.bits_per_symbol();
        const double amp = std::sqrt(total_power / (double(K) * double(Ns)));
        const arma::cx_mat rf_h = rf_combiner.t();

        BerResult r;
        if (amp == 0.0 || num_symbols == 0)
            return r;

        std::vector<std::uint8_t> tx(Ns * num_symbols * bps), rx(bps);
        std::uint64_t pool = 0;
        unsigned pool_left = 0;
        auto next_bit = [&]() -> std::uint8_t
        {
            if (pool_left == 0)
            {
                pool = rng();
                pool_left = 64;
            }
            --pool_left;
            const auto b = static_cast<std::uint8_t>(pool & 1u);
            pool >>= 1;
            return b;
        };

        arma::cx_mat S(Ns, num_symbols);
        for (arma::uword k = 0; k < K; ++k)
        {
            for (auto &b : tx)
                b = next_bit();
            for (arma::uword n = 0; n < num_symbols; ++n)
                for (arma::uword s = 0; s < Ns; ++s)
                    S(s, n) = modulation.map(&tx[(n * Ns + s) * bps]);

            const arma::cx_mat noise = complex_normal(rng, rf_combiner.n_rows, num_symbols, noise_variance);
            const arma::cx_mat G = h_eff.slice(k) * assignment.F.slice(k);
            const arma::cx_mat Y = combiners.slice(k) * (amp * (G * S) + rf_h * noise) / amp;

            for (arma::uword n = 0; n < num_symbols; ++n)
                for (arma::uword s = 0; s < Ns; ++s)
                {
                    modulation.demap(Y(s, n), rx.data());
                    const std::uint8_t *sent = &tx[(n * Ns + s) * bps];
                    for (unsigned i = 0; i < bps; ++i)
                        r.bit_errors += rx[i] != sent[i] ? 1 : 0;
                }
            r.bits += std::uint64_t(num_symbols) * Ns * bps;
        }
        r.ber = double(r.bit_errors) / double(r.bits);
        return r;
    }
}
