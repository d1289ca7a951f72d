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

#ifndef UAVSEC_GEOMETRY_HPP
#define UAVSEC_GEOMETRY_HPP

#include <span>
#include <vector>

namespace uavsec
{

struct EnvironmentParams;

// Cartesian position in meters; z is the altitude (0 for ground nodes).
struct Position3D
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Position3D &) const = default;
};

// Node placement during one transmission slot.
struct SlotGeometry
{
    std::vector<Position3D> uav_positions;
    Position3D bob_position;
    Position3D eve_position;
    int slot_index = 1; // 1-based

    bool operator==(const SlotGeometry &) const = default;
};

// Slant range between an airborne node and a ground node (meters).
double distance(const Position3D &uav, const Position3D &ground);

// Elevation angle seen from the ground node, in degrees, in (0, 90].
double elevation_angle_deg(const Position3D &uav, const Position3D &ground);

// Worst-case eavesdropper location on the circle of radius r_e around Bob.
//
// The angle is chosen on a uniform grid of grid_points angles in [0, 2*pi) to minimise the
// mean absolute power loss from the swarm, i.e. the point where the swarm is received most
// strongly. Ties go to the smallest angle. The result depends on geometry only.
Position3D worst_case_eve_position(const Position3D &bob, double r_e, std::span<const Position3D> uav_positions,
                                   const EnvironmentParams &env, int grid_points = 360);

// Mean linear power loss from the swarm to a ground point. Objective of the search above.
double mean_power_loss(std::span<const Position3D> uav_positions, const Position3D &ground,
                       const EnvironmentParams &env);

} // namespace uavsec

#endif
