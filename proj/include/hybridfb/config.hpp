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

#ifndef hybridfb_config_H
#define hybridfb_config_H

#include <armadillo>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hfb
{
    // How the receive-side RF chains pick their paths when building W_RF.
    //  shared      : the top-N_r_RF entries of the transmit power ranking (AoA/AoD come in pairs)
    //  independent : rank paths by the receive array gain sum_d ||a_r(phi_l)^H H(d)||^2
    enum class RxRanking
    {
        shared,
        independent
    };

    struct SystemConfig
    {
        arma::uword num_tx_antennas = 128;
        arma::uword num_rx_antennas = 32;
        arma::uword num_tx_rf = 16;
        arma::uword num_rx_rf = 12;
        arma::uword num_streams = 2;
        arma::uword num_subcarriers = 2048;
        arma::uword pilot_spacing = 128;
        arma::uword num_paths = 24;
        arma::uword max_delay_taps = 32;
        double total_power = 2048.0; // linear; 0 dB per-subcarrier SNR at unit noise
        double noise_variance = 1.0;
        double antenna_spacing = 0.5; // d_ant / lambda
        double rolloff = 1.0;
        unsigned codebook_bits = 5;
        double csi_quality = 1.0;
        unsigned phase_bits = 0; // 0 = unquantized analog phases
        RxRanking rx_ranking = RxRanking::shared;

        // Throws InvalidRequest naming the first violated constraint.
        void validate() const;

        arma::uword num_pilot_intervals() const { return num_subcarriers / pilot_spacing; }
        arma::uword codebook_size() const { return arma::uword(1) << codebook_bits; }
    };

    // Plain-text "key = value" file. '#' starts a comment, blank lines are ignored.
    // Keys are tracked as they are consumed so that typos can be reported.
    class KeyValueConfig
    {
    public:
        static KeyValueConfig parse(std::istream &in, const std::string &source_name = "<stream>");
        static KeyValueConfig load(const std::filesystem::path &file);

        bool has(const std::string &key) const { return values_.count(key) != 0; }
        std::optional<std::string> take(const std::string &key);
        void set(const std::string &key, const std::string &value) { values_[key] = value; }

        std::vector<std::string> unconsumed() const;
        // Throws InvalidRequest listing every key nobody consumed.
        void require_all_consumed() const;
        const std::string &source() const { return source_; }

    private:
        std::map<std::string, std::string> values_;
        std::set<std::string> consumed_;
        std::string source_;
    };

    // Reads every SystemConfig key present, leaves defaults for the rest, then validates.
    SystemConfig system_config_from(KeyValueConfig &kv);

    // One "key = value" line per field, in declaration order, full precision.
    std::string canonical_text(const SystemConfig &config);
    std::uint64_t fnv1a64(const std::string &bytes);
    std::uint64_t config_hash(const SystemConfig &config);

    std::string to_string(RxRanking r);
}

#endif
