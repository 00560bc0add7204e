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

#ifndef hybridfb_error_H
#define hybridfb_error_H

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hfb
{
    // Caller asked for something the contract does not allow (bad sizes, bad config values, ...)
    class InvalidRequest : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Input is well-formed but carries no usable signal (e.g. an all-zero precoder set)
    class DegenerateInput : public std::domain_error
    {
    public:
        using std::domain_error::domain_error;
    };

    // Zero-forcing on a rank-deficient equivalent channel
    class SingularityError : public std::runtime_error
    {
    public:
        SingularityError(const std::string &what, double condition_number)
            : std::runtime_error(what), condition_number_(condition_number) {}
        double condition_number() const noexcept { return condition_number_; }

    private:
        double condition_number_;
    };

    // File system failures, always carrying the offending path in the message
    class IoError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };
}

#endif
