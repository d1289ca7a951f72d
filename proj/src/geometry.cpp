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

#include "uavsec/geometry.hpp"

#include "uavsec/channel.hpp"
#include "uavsec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace uavsec
{

namespace
{

void check_finite(const Position3D &p, const char *what)
{
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
        throw InvalidInputError(std::string(what) + ": non-finite coordinate");
}

void check_link(const Position3D &uav, const Position3D &ground)
{
    check_finite(uav, "uav");
    check_finite(ground, "ground");
    if (!(uav.z > 0.0))
        throw InvalidInputError("uav altitude must be positive");
    if (ground.z != 0.0)
        throw InvalidInputError("ground node must have z = 0");
}

} // namespace

double distance(const Position3D &uav, const Position3D &ground)
{
    check_link(uav, ground);
    const double dx = uav.x - ground.x;
    const double dy = uav.y - ground.y;
    return std::sqrt(uav.z * uav.z + dx * dx + dy * dy);
}

double elevation_angle_deg(const Position3D &uav, const Position3D &ground)
{
    const double d = distance(uav, ground);
    // h <= d always; clamp guards the last ulp when the offset is zero
    return 180.0 / std::numbers::pi * std::asin(std::min(1.0, uav.z / d));
}

double mean_power_loss(std::span<const Position3D> uav_positions, const Position3D &ground,
                       const EnvironmentParams &env)
{
    if (uav_positions.empty())
        throw InvalidInputError("empty swarm");
    double sum = 0.0;
    for (const auto &u : uav_positions)
        sum += power_loss_linear(env, u, ground);
    return sum / static_cast<double>(uav_positions.size());
}

Position3D worst_case_eve_position(const Position3D &bob, double r_e, std::span<const Position3D> uav_positions,
                                   const EnvironmentParams &env, int grid_points)
{
    if (uav_positions.empty())
        throw InvalidInputError("worst_case_eve_position: no UAVs");
    if (!(r_e > 0.0) || !std::isfinite(r_e))
        throw InvalidInputError("worst_case_eve_position: r_e must be positive");
    if (grid_points < 8)
        throw InvalidInputError("worst_case_eve_position: need at least 8 grid points");
    check_finite(bob, "bob");

    Position3D best{bob.x + r_e, bob.y, 0.0};
    double best_loss = std::numeric_limits<double>::infinity();
    for (int k = 0; k < grid_points; ++k)
    {
        const double theta = 2.0 * std::numbers::pi * k / grid_points;
        const Position3D cand{bob.x + r_e * std::cos(theta), bob.y + r_e * std::sin(theta), 0.0};
        const double loss = mean_power_loss(uav_positions, cand, env);
        if (loss < best_loss) // strict: first (smallest) angle wins ties
        {
            best_loss = loss;
            best = cand;
        }
    }
    return best;
}

} // namespace uavsec
