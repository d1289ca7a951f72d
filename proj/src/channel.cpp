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

#include "uavsec/channel.hpp"

#include "uavsec/errors.hpp"

#include <cmath>
#include <numbers>

namespace uavsec
{

void EnvironmentParams::validate() const
{
    if (!(a > 0.0) || !(b > 0.0) || !(carrier_hz > 0.0) || !(light_speed > 0.0))
        throw InvalidInputError("environment: a, b, carrier frequency and light speed must be positive");
    if (!std::isfinite(eta_los_db) || !std::isfinite(eta_nlos_db))
        throw InvalidInputError("environment: excess losses must be finite");
}

const std::vector<std::string> &environment_preset_names()
{
    static const std::vector<std::string> names{"suburban", "urban", "dense-urban", "highrise-urban"};
    return names;
}

std::optional<EnvironmentParams> environment_preset(std::string_view name)
{
    EnvironmentParams env;
    if (name == "suburban")
    {
        env.eta_los_db = 0.1;
        env.eta_nlos_db = 21.0;
    }
    else if (name == "urban")
    {
        env.eta_los_db = 1.0;
        env.eta_nlos_db = 20.0;
    }
    else if (name == "dense-urban")
    {
        env.eta_los_db = 1.6;
        env.eta_nlos_db = 23.0;
    }
    else if (name == "highrise-urban")
    {
        env.eta_los_db = 2.3;
        env.eta_nlos_db = 34.0;
    }
    else
        return std::nullopt;
    return env;
}

double path_loss_db(const EnvironmentParams &env, const Position3D &uav, const Position3D &ground)
{
    const double d = distance(uav, ground);
    const double rho = elevation_angle_deg(uav, ground);
    const double excess = env.eta_los_db - env.eta_nlos_db;
    const double los_term = excess / (1.0 + env.a * std::exp(-env.b * (rho - env.a)));
    const double free_space =
        20.0 * std::log10(d) + 20.0 * std::log10(4.0 * std::numbers::pi * env.carrier_hz / env.light_speed);
    return los_term + free_space + env.eta_nlos_db;
}

double power_loss_linear(const EnvironmentParams &env, const Position3D &uav, const Position3D &ground)
{
    return std::pow(10.0, path_loss_db(env, uav, ground) / 10.0);
}

LossVector loss_vector(const EnvironmentParams &env, const SlotGeometry &slot, Receiver receiver, int n_antennas)
{
    if (n_antennas < 1)
        throw InvalidInputError("loss_vector: n_antennas must be >= 1");
    const Position3D &rx = receiver == Receiver::Bob ? slot.bob_position : slot.eve_position;
    LossVector out;
    out.receiver_antennas = n_antennas;
    out.q.set_size(slot.uav_positions.size());
    for (std::size_t l = 0; l < slot.uav_positions.size(); ++l)
        out.q(l) = power_loss_linear(env, slot.uav_positions[l], rx);
    return out;
}

arma::cx_mat sample_small_scale(std::mt19937_64 &rng, int n_antennas, int num_uavs)
{
    if (n_antennas < 1 || num_uavs < 1)
        throw InvalidInputError("sample_small_scale: dimensions must be positive");
    std::normal_distribution<double> half_var(0.0, std::sqrt(0.5));
    arma::cx_mat s(n_antennas, num_uavs);
    // column-major fill keeps the draw order fixed: UAV by UAV, antenna by antenna
    for (arma::uword c = 0; c < s.n_cols; ++c)
        for (arma::uword r = 0; r < s.n_rows; ++r)
        {
            const double re = half_var(rng);
            const double im = half_var(rng);
            s(r, c) = {re, im};
        }
    return s;
}

arma::cx_mat composite_channel(const arma::cx_mat &small_scale, const LossVector &loss)
{
    if (small_scale.n_cols != loss.q.n_elem)
        throw InvalidInputError("composite_channel: dimension mismatch");
    arma::cx_mat h = small_scale;
    for (arma::uword l = 0; l < h.n_cols; ++l)
        h.col(l) *= 1.0 / std::sqrt(loss.q(l));
    return h;
}

} // namespace uavsec
