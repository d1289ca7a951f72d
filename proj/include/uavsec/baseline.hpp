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

#ifndef UAVSEC_BASELINE_HPP
#define UAVSEC_BASELINE_HPP

#include "uavsec/rates.hpp"
#include "uavsec/scenario.hpp"

#include <cstdint>

namespace uavsec
{

// Share of the swarm budget given to the signal by default, N_B / (N_B + N_E).
double default_signal_fraction(int n_bob, int n_eve);

// Secrecy throughput of null-space artificial noise with instantaneous CSI.
//
// Per fading draw the swarm budget L * P_max is split: the signal fraction phi goes uniformly
// over the N_B right-singular directions of H_B, the rest uniformly over the L - N_B directions
// of its null space. Per-slot ergodic secrecy rates are clipped at zero and weighted by tau / T_U.
// Draws use the same substreams as secrecy_throughput_mc. A negative signal_fraction selects the
// default. Requires L > N_B.
RateEstimate baseline_null_space(const Scenario &scenario, const DurationVector &tau, std::size_t samples,
                                 std::uint64_t seed, double signal_fraction = -1.0);

} // namespace uavsec

#endif
