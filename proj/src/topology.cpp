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

#include "uavsec/topology.hpp"

#include "uavsec/rng.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace uavsec
{

Scenario generate_topology(const ScenarioConfig &config, std::uint64_t seed)
{
    config.validate();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<SlotGeometry> slots;
    slots.reserve(static_cast<std::size_t>(config.num_slots));
    for (int n = 0; n < config.num_slots; ++n)
    {
        const auto slot_key = static_cast<std::uint64_t>(n);
        SlotGeometry sg;
        sg.slot_index = n + 1;

        auto user_rng = make_substream({seed, slot_key, 0, StreamTag::UserPosition});
        sg.bob_position = {config.cell_size_m * unit(user_rng), config.cell_size_m * unit(user_rng), 0.0};

        for (int l = 0; l < config.num_uavs; ++l)
        {
            auto rng = make_substream({seed, slot_key, static_cast<std::uint64_t>(l), StreamTag::UavPosition});
            // sqrt gives a uniform density over the disc
            const double r = config.hover_radius_m * std::sqrt(unit(rng));
            const double phi = 2.0 * std::numbers::pi * unit(rng);
            const double h = config.altitude_min_m + (config.altitude_max_m - config.altitude_min_m) * unit(rng);
            sg.uav_positions.push_back(
                {sg.bob_position.x + r * std::cos(phi), sg.bob_position.y + r * std::sin(phi), h});
        }
        sg.eve_position =
            worst_case_eve_position(sg.bob_position, config.r_e_m, sg.uav_positions, config.env, config.eve_grid_points);
        slots.push_back(std::move(sg));
    }
    return Scenario::from_geometry(config.env, std::move(slots), config.n_bob, config.n_eve, config.budgets(),
                                   config.noise_w());
}

Scenario with_environment(const Scenario &scenario, const EnvironmentParams &env, double r_e, int eve_grid_points)
{
    std::vector<SlotGeometry> slots = scenario.slots;
    for (auto &sg : slots)
        sg.eve_position = worst_case_eve_position(sg.bob_position, r_e, sg.uav_positions, env, eve_grid_points);
    return Scenario::from_geometry(env, std::move(slots), scenario.n_bob, scenario.n_eve, scenario.budgets,
                                   scenario.noise_w);
}

} // namespace uavsec
