// SPDX-License-Identifier: Apache-2.0
//
// hmnoma: downlink NOMA and massive MIMO comparison toolkit
// Copyright (C) 2026 The hmnoma authors
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

#ifndef HMNOMA_RNG_HPP
#define HMNOMA_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace hmnoma
{
    // Independent stream for a tuple of tags, e.g. (seed, drop, K). Worker count never
    // changes which stream a drop sees.
    inline std::mt19937_64 make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags = {})
    {
        std::vector<std::uint32_t> words;
        words.reserve(2 * (tags.size() + 1));
        auto push = [&](std::uint64_t v)
        {
            words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
            words.push_back(static_cast<std::uint32_t>(v >> 32));
        };
        push(seed);
        for (auto t : tags)
            push(t);
        std::seed_seq seq(words.begin(), words.end());
        return std::mt19937_64(seq);
    }
} // namespace hmnoma

#endif
