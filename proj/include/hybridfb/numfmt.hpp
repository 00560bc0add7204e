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

#ifndef hybridfb_numfmt_H
#define hybridfb_numfmt_H

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace hfb
{
    // Shortest decimal text that parses back to the identical double.
    std::string format_real(double value);
    std::string format_integer(std::uint64_t value);

    // Strict parsers: the whole token must be consumed. `what` names the field in error messages.
    double parse_real(std::string_view text, std::string_view what);
    std::uint64_t parse_unsigned(std::string_view text, std::string_view what);
    std::int64_t parse_signed(std::string_view text, std::string_view what);

    std::string_view trim(std::string_view text);
    std::vector<std::string> split(std::string_view text, char sep);

    // "lo:step:hi" (inclusive, tolerant to accumulated rounding) or a comma list "a,b,c"
    std::vector<double> parse_real_grid(std::string_view text, std::string_view what);
}

#endif
