// SPDX-License-Identifier: Apache-2.0
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

#ifndef UAVSEC_RNG_HPP
#define UAVSEC_RNG_HPP

#include <cstdint>
#include <random>

namespace uavsec
{

// Independent random substreams keyed by (seed, slot, index, tag). Every draw in the
// library goes through a substream so results do not depend on evaluation order.
enum class StreamTag : std::uint64_t
{
    UserPosition = 1,
    UavPosition = 2,
    FadingBob = 3,
    FadingEve = 4,
    Baseline = 5,
    Generic = 6,
};

struct StreamKey
{
    std::uint64_t seed = 0;
    std::uint64_t slot = 0;
    std::uint64_t index = 0;
    StreamTag tag = StreamTag::Generic;
};

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 make_substream(const StreamKey &key)
{
    std::uint64_t h = splitmix64(key.seed);
    h = splitmix64(h ^ key.slot);
    h = splitmix64(h ^ key.index);
    h = splitmix64(h ^ static_cast<std::uint64_t>(key.tag));
    return std::mt19937_64(h);
}

} // namespace uavsec

#endif
