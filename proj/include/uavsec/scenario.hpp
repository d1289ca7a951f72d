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

#ifndef UAVSEC_SCENARIO_HPP
#define UAVSEC_SCENARIO_HPP

#include "uavsec/channel.hpp"
#include "uavsec/geometry.hpp"

#include <armadillo>
#include <vector>

namespace uavsec
{

// Power, energy and timing budgets. Watts, joules and seconds.
struct Budgets
{
    double p_max = 1.0;      // per-UAV transmit power budget
    double e_max = 300.0;    // per-UAV transmit energy budget over the mission
    double t_total = 100.0;  // total transmission time T_t
    double tau_max = 8.0;    // per-user duration cap
    double t_period = 210.0; // mission period T_U

    bool operator==(const Budgets &) const = default;

    void validate() const;
};

using DurationVector = arma::vec;

// One problem instance: losses per slot, antenna counts, budgets and noise power.
//
// Losses are the only channel knowledge the optimizer uses. When the instance is built from
// geometry the slot positions are kept for reporting and Monte Carlo validation.
struct Scenario
{
    EnvironmentParams env;
    std::vector<SlotGeometry> slots; // empty when built directly from losses
    std::vector<LossVector> q_bob;   // one per slot
    std::vector<LossVector> q_eve;   // one per slot
    int n_bob = 5;
    int n_eve = 3;
    Budgets budgets;
    double noise_w = 1e-13; // delta^2, same for every receiver and slot

    int num_uavs() const { return q_bob.empty() ? 0 : static_cast<int>(q_bob.front().size()); }
    int num_slots() const { return static_cast<int>(q_bob.size()); }

    void validate() const;

    static Scenario from_geometry(const EnvironmentParams &env, std::vector<SlotGeometry> slots, int n_bob, int n_eve,
                                  const Budgets &budgets, double noise_w);

    static Scenario from_losses(const std::vector<arma::vec> &q_bob, const std::vector<arma::vec> &q_eve, int n_bob,
                                int n_eve, const Budgets &budgets, double noise_w);
};

// Per-UAV, per-slot powers in watts. Both matrices are L x N. Signal power is p_u - p_a.
struct PowerSchedule
{
    arma::mat p_u;
    arma::mat p_a;

    arma::mat p_s() const { return p_u - p_a; }

    static PowerSchedule uniform(int num_uavs, int num_slots, double p_u, double p_a);
};

// Largest violation of 0 <= p_a <= p_u <= P_max, the energy rows and the duration constraints.
// Zero when feasible.
double constraint_violation(const Scenario &scenario, const PowerSchedule &schedule, const DurationVector &tau);

} // namespace uavsec

#endif
