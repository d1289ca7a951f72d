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

#ifndef UAVSEC_CHANNEL_HPP
#define UAVSEC_CHANNEL_HPP

#include "uavsec/geometry.hpp"
#include "uavsec/rng.hpp"

#include <armadillo>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uavsec
{

// Constants of the elevation-dependent LoS/NLoS air-to-ground loss model.
struct EnvironmentParams
{
    double eta_los_db = 0.1;   // excess loss for LoS links
    double eta_nlos_db = 21.0; // excess loss for NLoS links
    double a = 5.0188;
    double b = 0.3511;
    double carrier_hz = 2.4e9;
    double light_speed = 3.0e8;

    bool operator==(const EnvironmentParams &) const = default;

    void validate() const;
};

// Built-in presets: "suburban", "urban", "dense-urban", "highrise-urban".
std::optional<EnvironmentParams> environment_preset(std::string_view name);
const std::vector<std::string> &environment_preset_names();

double path_loss_db(const EnvironmentParams &env, const Position3D &uav, const Position3D &ground);

// Absolute (linear) power loss, 10^(PL/10).
double power_loss_linear(const EnvironmentParams &env, const Position3D &uav, const Position3D &ground);

enum class Receiver
{
    Bob,
    Eve
};

// Per-UAV linear losses towards one receiver during one slot.
struct LossVector
{
    arma::vec q;                // length L, all > 0
    int receiver_antennas = 1;  // N_B or N_E

    arma::uword size() const { return q.n_elem; }
};

LossVector loss_vector(const EnvironmentParams &env, const SlotGeometry &slot, Receiver receiver, int n_antennas);

// n_antennas x L matrix with i.i.d. CN(0,1) entries.
arma::cx_mat sample_small_scale(std::mt19937_64 &rng, int n_antennas, int num_uavs);

// Composite channel S * diag(q^{-1/2}).
arma::cx_mat composite_channel(const arma::cx_mat &small_scale, const LossVector &loss);

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

} // namespace uavsec

#endif
