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

#include "hybridfb/numfmt.hpp"
#include "hybridfb/error.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace hfb
{
    std::string format_real(double value)
    {
        char buf[64];
        auto res = std::to_chars(buf, buf + sizeof(buf), value);
        return std::string(buf, res.ptr);
    }

    std::string format_integer(std::uint64_t value)
    {
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof(buf), value);
        return std::string(buf, res.ptr);
    }

    std::string_view trim(std::string_view text)
    {
        const char *ws = " \t\r\n";
        auto first = text.find_first_not_of(ws);
        if (first == std::string_view::npos)
            return {};
        auto last = text.find_last_not_of(ws);
        return text.substr(first, last - first + 1);
    }

    std::vector<std::string> split(std::string_view text, char sep)
    {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (true)
        {
            auto pos = text.find(sep, start);
            out.emplace_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
            if (pos == std::string_view::npos)
                break;
            start = pos + 1;
        }
        return out;
    }

    namespace
    {
        [[noreturn]] void bad_number(std::string_view text, std::string_view what)
        {
            throw InvalidRequest("cannot parse '" + std::string(text) + "' as a number for " + std::string(what));
        }

        template <typename T>
        T parse_number(std::string_view text, std::string_view what)
        {
            auto t = trim(text);
            if (!t.empty() && t.front() == '+')
                t.remove_prefix(1);
            T value{};
            auto res = std::from_chars(t.data(), t.data() + t.size(), value);
            if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
                bad_number(text, what);
            return value;
        }
    }

    double parse_real(std::string_view text, std::string_view what)
    {
        double v = parse_number<double>(text, what);
        if (!std::isfinite(v))
            bad_number(text, what);
        return v;
    }

    std::uint64_t parse_unsigned(std::string_view text, std::string_view what)
    {
        return parse_number<std::uint64_t>(text, what);
    }

    std::int64_t parse_signed(std::string_view text, std::string_view what)
    {
        return parse_number<std::int64_t>(text, what);
    }

    std::vector<double> parse_real_grid(std::string_view text, std::string_view what)
    {
        std::vector<double> out;
        auto t = trim(text);
        if (t.find(':') != std::string_view::npos)
        {
            auto parts = split(t, ':');
            if (parts.size() != 3)
                throw InvalidRequest("range for " + std::string(what) + " must be lo:step:hi");
            double lo = parse_real(parts[0], what), step = parse_real(parts[1], what), hi = parse_real(parts[2], what);
            if (step <= 0.0 || hi < lo)
                throw InvalidRequest("range for " + std::string(what) + " needs step > 0 and hi >= lo");
            auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
            for (std::size_t i = 0; i <= n; ++i)
                out.push_back(lo + static_cast<double>(i) * step);
        }
        else
        {
            for (const auto &p : split(t, ','))
                out.push_back(parse_real(p, what));
        }
        if (out.empty())
            throw InvalidRequest("empty grid for " + std::string(what));
        return out;
    }
}
