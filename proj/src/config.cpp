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

#include "hybridfb/config.hpp"
#include "hybridfb/error.hpp"
#include "hybridfb/numfmt.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace hfb
{
    void SystemConfig::validate() const
    {
        auto fail = [](const std::string &msg)
        { throw InvalidRequest("invalid system config: " + msg); };

        if (num_tx_antennas == 0 || num_rx_antennas == 0 || num_tx_rf == 0 || num_rx_rf == 0 ||
            num_streams == 0 || num_subcarriers == 0 || pilot_spacing == 0 || num_paths == 0 ||
            max_delay_taps == 0 || codebook_bits == 0)
            fail("all counts must be positive");
        if (num_streams > std::min(num_tx_rf, num_rx_rf))
            fail("num_streams must not exceed min(num_tx_rf, num_rx_rf)");
        if (num_tx_rf > num_tx_antennas)
            fail("num_tx_rf must not exceed num_tx_antennas");
        if (num_rx_rf > num_rx_antennas)
            fail("num_rx_rf must not exceed num_rx_antennas");
        if (num_subcarriers % pilot_spacing != 0)
            fail("pilot_spacing must divide num_subcarriers");
        if (num_paths < std::max(num_tx_rf, num_rx_rf))
            fail("num_paths must be at least max(num_tx_rf, num_rx_rf)");
        if (max_delay_taps > num_subcarriers)
            fail("max_delay_taps must not exceed num_subcarriers");
        if (codebook_bits > 20)
            fail("codebook_bits above 20 is not supported");
        if (num_streams > codebook_size())
            fail("num_streams must not exceed the codebook size");
        if (!(total_power > 0.0) || !(noise_variance > 0.0) || !(antenna_spacing > 0.0))
            fail("total_power, noise_variance and antenna_spacing must be positive");
        if (!(rolloff >= 0.0 && rolloff <= 1.0))
            fail("rolloff must lie in [0, 1]");
        if (!(csi_quality >= 0.0 && csi_quality <= 1.0))
            fail("csi_quality must lie in [0, 1]");
        if (phase_bits > 16)
            fail("phase_bits above 16 is not supported");
    }

    KeyValueConfig KeyValueConfig::parse(std::istream &in, const std::string &source_name)
    {
        KeyValueConfig kv;
        kv.source_ = source_name;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line))
        {
            ++line_no;
            auto hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            auto body = trim(line);
            if (body.empty())
                continue;
            auto eq = body.find('=');
            if (eq == std::string_view::npos)
                throw InvalidRequest(source_name + ":" + std::to_string(line_no) + ": expected 'key = value'");
            std::string key(trim(body.substr(0, eq)));
            std::string value(trim(body.substr(eq + 1)));
            if (key.empty())
                throw InvalidRequest(source_name + ":" + std::to_string(line_no) + ": empty key");
            if (kv.values_.count(key))
                throw InvalidRequest(source_name + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
            kv.values_[key] = value;
        }
        return kv;
    }

    KeyValueConfig KeyValueConfig::load(const std::filesystem::path &file)
    {
        std::ifstream in(file);
        if (!in)
            throw IoError("cannot open config file " + file.string());
        return parse(in, file.string());
    }

    std::optional<std::string> KeyValueConfig::take(const std::string &key)
    {
        auto it = values_.find(key);
        if (it == values_.end())
            return std::nullopt;
        consumed_.insert(key);
        return it->second;
    }

    std::vector<std::string> KeyValueConfig::unconsumed() const
    {
        std::vector<std::string> out;
        for (const auto &[k, v] : values_)
            if (!consumed_.count(k))
                out.push_back(k);
        return out;
    }

    void KeyValueConfig::require_all_consumed() const
    {
        auto rest = unconsumed();
        if (rest.empty())
            return;
        std::string msg = source_ + ": unknown key(s):";
        for (const auto &k : rest)
            msg += " " + k;
        throw InvalidRequest(msg);
    }

    namespace
    {
        void read_count(KeyValueConfig &kv, const char *key, arma::uword &field)
        {
            if (auto v = kv.take(key))
                field = static_cast<arma::uword>(parse_unsigned(*v, key));
        }
        void read_real(KeyValueConfig &kv, const char *key, double &field)
        {
            if (auto v = kv.take(key))
                field = parse_real(*v, key);
        }
        void read_small(KeyValueConfig &kv, const char *key, unsigned &field)
        {
            if (auto v = kv.take(key))
                field = static_cast<unsigned>(parse_unsigned(*v, key));
        }
    }

    SystemConfig system_config_from(KeyValueConfig &kv)
    {
        SystemConfig c;
        read_count(kv, "num_tx_antennas", c.num_tx_antennas);
        read_count(kv, "num_rx_antennas", c.num_rx_antennas);
        read_count(kv, "num_tx_rf", c.num_tx_rf);
        read_count(kv, "num_rx_rf", c.num_rx_rf);
        read_count(kv, "num_streams", c.num_streams);
        read_count(kv, "num_subcarriers", c.num_subcarriers);
        read_count(kv, "pilot_spacing", c.pilot_spacing);
        read_count(kv, "num_paths", c.num_paths);
        read_count(kv, "max_delay_taps", c.max_delay_taps);
        read_real(kv, "total_power", c.total_power);
        read_real(kv, "noise_variance", c.noise_variance);
        read_real(kv, "antenna_spacing", c.antenna_spacing);
        read_real(kv, "rolloff", c.rolloff);
        read_small(kv, "codebook_bits", c.codebook_bits);
        read_real(kv, "csi_quality", c.csi_quality);
        read_small(kv, "phase_bits", c.phase_bits);
        if (auto v = kv.take("rx_ranking"))
        {
            if (*v == "shared")
                c.rx_ranking = RxRanking::shared;
            else if (*v == "independent")
                c.rx_ranking = RxRanking::independent;
            else
                throw InvalidRequest("rx_ranking must be 'shared' or 'independent', got '" + *v + "'");
        }
        c.validate();
        return c;
    }

    std::string to_string(RxRanking r)
    {
        return r == RxRanking::shared ? "shared" : "independent";
    }

    std::string canonical_text(const SystemConfig &c)
    {
        std::ostringstream os;
        os << "num_tx_antennas = " << c.num_tx_antennas << "\n"
           << "num_rx_antennas = " << c.num_rx_antennas << "\n"
           << "num_tx_rf = " << c.num_tx_rf << "\n"
           << "num_rx_rf = " << c.num_rx_rf << "\n"
           << "num_streams = " << c.num_streams << "\n"
           << "num_subcarriers = " << c.num_subcarriers << "\n"
           << "pilot_spacing = " << c.pilot_spacing << "\n"
           << "num_paths = " << c.num_paths << "\n"
           << "max_delay_taps = " << c.max_delay_taps << "\n"
           << "total_power = " << format_real(c.total_power) << "\n"
           << "noise_variance = " << format_real(c.noise_variance) << "\n"
           << "antenna_spacing = " << format_real(c.antenna_spacing) << "\n"
           << "rolloff = " << format_real(c.rolloff) << "\n"
           << "codebook_bits = " << c.codebook_bits << "\n"
           << "csi_quality = " << format_real(c.csi_quality) << "\n"
           << "phase_bits = " << c.phase_bits << "\n"
           << "rx_ranking = " << to_string(c.rx_ranking) << "\n";
        return os.str();
    }

    std::uint64_t fnv1a64(const std::string &bytes)
    {
        std::uint64_t h = 14695981039346656037ull;
        for (unsigned char ch : bytes)
        {
            h ^= ch;
            h *= 1099511628211ull;
        }
        return h;
    }

    std::uint64_t config_hash(const SystemConfig &config)
    {
        return fnv1a64(canonical_text(config));
    }
}
