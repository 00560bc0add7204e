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

#ifndef hybridfb_link_H
#define hybridfb_link_H

#include "hybridfb/assignment.hpp"
#include "hybridfb/rng.hpp"

#include <armadillo>
#include <complex>
#include <cstdint>
#include <vector>

namespace hfb
{
    enum class Equalizer
    {
        zf,
        mmse
    };

    // Noise covariance assumed by the MMSE combiner after analog combining:
    //  colored : sigma^2 W_RF^H W_RF   (the actual post-combining covariance)
    //  white   : sigma^2 I             (idealized, for ablation)
    enum class NoiseModel
    {
        colored,
        white
    };

    struct EqualizerSpec
    {
        Equalizer kind = Equalizer::mmse;
        arma::cx_mat signal_cov; // R_s, N_s x N_s
        arma::cx_mat noise_cov;  // R,   N_r_RF x N_r_RF

        // R_s = P/(K N_s) I and R per the noise model.
        static EqualizerSpec make(Equalizer kind, double total_power, arma::uword num_subcarriers,
                                  arma::uword num_streams, double noise_variance, const arma::cx_mat &rf_combiner,
                                  NoiseModel noise = NoiseModel::colored);
    };

    inline constexpr double kZfConditionLimit = 1e12;

    // P = K sigma^2 10^(snr/10), i.e. snr is the per-subcarrier P/(K sigma^2) in dB.
    double total_power_for_snr(double snr_db, arma::uword num_subcarriers, double noise_variance);

    // sum_k ||F_RF F[k]||_F^2
    double transmit_power(const PrecoderAssignment &assignment, const arma::cx_mat &rf_precoder);

    // Scales every F[k] by the one positive factor that makes transmit_power equal K N_s.
    // Throws DegenerateInput if the assignment carries no power.
    PrecoderAssignment normalize_power(PrecoderAssignment assignment, const arma::cx_mat &rf_precoder);

    // Digital combiner W (N_s x N_r_RF), applied as W * y_RF.
    //  ZF:   (G^H G)^{-1} G^H with G = H_eff F; throws SingularityError if cond(G) > kZfConditionLimit
    //  MMSE: R_s G^H (G R_s G^H + R)^{-1}
    arma::cx_mat combiner(const arma::cx_mat &h_eff_k, const arma::cx_mat &f_k, const EqualizerSpec &spec);

    // All subcarriers. ZF singularities fall back to the pseudo-inverse and are listed in `flagged` (1-based).
    struct CombinerSet
    {
        arma::cx_cube W;
        std::vector<arma::uword> flagged;
    };
    CombinerSet combiners(const arma::cx_cube &h_eff, const PrecoderAssignment &assignment, const EqualizerSpec &spec);

    struct LinkMetrics
    {
        double spectral_efficiency = 0.0;
        arma::vec per_subcarrier_rate;
    };

    // log2 det(I + P/(K N_s sigma^2) H_eq H_eq^H) per subcarrier.
    double log_det_rate(const arma::cx_mat &h_eq, double snr_scale);

    // H_eq[k] = W[k] H_eff[k] F[k] with the given combiners.
    LinkMetrics spectral_efficiency(const arma::cx_cube &h_eff, const PrecoderAssignment &assignment,
                                    const arma::cx_cube &combiners, double total_power, double noise_variance);

    // H_eq[k] = H_eff[k] F[k], no digital combining.
    LinkMetrics spectral_efficiency_direct(const arma::cx_cube &h_eff, const PrecoderAssignment &assignment,
                                           double total_power, double noise_variance);

    // Unit average energy constellation with a bit labelling.
    class Modulation
    {
    public:
        virtual ~Modulation() = default;
        virtual unsigned bits_per_symbol() const = 0;
        virtual std::complex<double> map(const std::uint8_t *bits) const = 0;
        virtual void demap(std::complex<double> symbol, std::uint8_t *bits) const = 0;
    };

    // Gray-labelled QPSK, ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)
    class Qpsk final : public Modulation
    {
    public:
        unsigned bits_per_symbol() const override { return 2; }
        std::complex<double> map(const std::uint8_t *bits) const override;
        void demap(std::complex<double> symbol, std::uint8_t *bits) const override;
    };

    struct BerResult
    {
        double ber = 0.0;
        std::uint64_t bit_errors = 0;
        std::uint64_t bits = 0;
    };

    // Monte-Carlo symbol transmission over num_symbols OFDM symbols:
    //   y = W (H_eff F sqrt(P/(K N_s)) s + W_RF^H n),  n ~ CN(0, sigma^2 I_Nr)
    // then hard detection on y / sqrt(P/(K N_s)).
    BerResult simulate_ber(const arma::cx_cube &h_eff, const arma::cx_mat &rf_combiner,
                           const PrecoderAssignment &assignment, const arma::cx_cube &combiners, double total_power,
                           double noise_variance, arma::uword num_symbols, Rng &rng);
    BerResult simulate_ber(const arma::cx_cube &h_eff, const arma::cx_mat &rf_combiner,
                           const PrecoderAssignment &assignment, const arma::cx_cube &combiners, double total_power,
                           double noise_variance, arma::uword num_symbols, Rng &rng, const Modulation &modulation);
}

#endif
