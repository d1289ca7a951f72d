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

#ifndef UAVSEC_TOPOLOGY_HPP
#define UAVSEC_TOPOLOGY_HPP

#include "uavsec/config.hpp"
#include "uavsec/scenario.hpp"

#include <cstdint>

namespace uavsec
{

// Random instance: users uniform in the square cell, UAVs uniform in the hover cylinder above
// the scheduled user, eavesdropper at the worst-case point of the safety circle.
//
// Each node draws from its own substream of seed, so UAV l sits at the same place for every
// swarm size L > l. The result is a pure function of (config, seed).
Scenario generate_topology(const ScenarioConfig &config, std::uint64_t seed);

// Same node placement with a different loss environment. The eavesdropper is re-placed
// because the worst-case point depends on the environment.
Scenario with_environment(const Scenario &scenario, const EnvironmentParams &env, double r_e, int eve_grid_points);

} // namespace uavsec

#endif
