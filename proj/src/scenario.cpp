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

#include "uavsec/scenario.hpp"

#include "uavsec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace uavsec
{

void Budgets::validate() const
{
    if (!(p_max > 0.0) || !(e_max > 0.0) || !(t_total > 0.0) || !(tau_max > 0.0) || !(t_period > 0.0))
        throw InvalidInputError("budgets must all be positive");
    if (tau_max > t_total)
        throw InvalidInputError("tau_max must not exceed the total transmission time");
}

void Scenario::validate() const
{
    budgets.validate();
    if (n_bob < 1 || n_eve < 1)
        throw InvalidInputError("antenna counts must be positive");
    if (!(noise_w > 0.0))
        throw InvalidInputError("noise power must be positive");
    if (q_bob.empty() || q_bob.size() != q_eve.size())
        throw InvalidInputError("scenario needs the same positive number of Bob and Eve slots");
    const auto l = q_bob.front().size();
    if (l == 0)
        throw InvalidInputError("scenario needs at least one UAV");
    for (std::size_t n = 0; n < q_bob.size(); ++n)
    {
        for (const LossVector *lv : {&q_bob[n], &q_eve[n]})
        {
            if (lv->size() != l)
                throw InvalidInputError("every slot must have the same number of UAVs");
            if (!lv->q.is_finite() || arma::any(lv->q <= 0.0))
                throw InvalidInputError("losses must be positive and finite");
        }
    }
}

Scenario Scenario::from_geometry(const EnvironmentParams &env, std::vector<SlotGeometry> slots, int n_bob, int n_eve,
                                 const Budgets &budgets, double noise_w)
{
    env.validate();
    Scenario s;
    s.env = env;
    s.n_bob = n_bob;
    s.n_eve = n_eve;
    s.budgets = budgets;
    s.noise_w = noise_w;
    for (const auto &slot : slots)
    {
        s.q_bob.push_back(loss_vector(env, slot, Receiver::Bob, n_bob));
        s.q_eve.push_back(loss_vector(env, slot, Receiver::Eve, n_eve));
    }
    s.slots = std::move(slots);
    s.validate();
    return s;
}

Scenario Scenario::from_losses(const std::vector<arma::vec> &q_bob, const std::vector<arma::vec> &q_eve, int n_bob,
                               int n_eve, const Budgets &budgets, double noise_w)
{
    Scenario s;
    s.n_bob = n_bob;
    s.n_eve = n_eve;
    s.budgets = budgets;
    s.noise_w = noise_w;
    for (const auto &q : q_bob)
        s.q_bob.push_back({q, n_bob});
    for (const auto &q : q_eve)
        s.q_eve.push_back({q, n_eve});
    s.validate();
    return s;
}

PowerSchedule PowerSchedule::uniform(int num_uavs, int num_slots, double p_u, double p_a)
{
    if (p_a < 0.0 || p_a > p_u)
        throw InvalidInputError("uniform schedule needs 0 <= p_a <= p_u");
    PowerSchedule s;
    s.p_u.set_size(num_uavs, num_slots);
    s.p_u.fill(p_u);
    s.p_a.set_size(num_uavs, num_slots);
    s.p_a.fill(p_a);
    return s;
}

double constraint_violation(const Scenario &scenario, const PowerSchedule &schedule, const DurationVector &tau)
{
    const auto &b = scenario.budgets;
    const auto l = static_cast<arma::uword>(scenario.num_uavs());
    const auto n = static_cast<arma::uword>(scenario.num_slots());
    if (schedule.p_u.n_rows != l || schedule.p_u.n_cols != n || schedule.p_a.n_rows != l ||
        schedule.p_a.n_cols != n || tau.n_elem != n)
        throw InvalidInputError("schedule or duration dimensions do not match the scenario");

    double worst = 0.0;
    worst = std::max(worst, -schedule.p_a.min());
    worst = std::max(worst, (schedule.p_a - schedule.p_u).max());
    worst = std::max(worst, schedule.p_u.max() - b.p_max);
    worst = std::max(worst, -tau.min());
    worst = std::max(worst, tau.max() - b.tau_max);
    worst = std::max(worst, arma::accu(tau) - b.t_total);
    const arma::vec energy = schedule.p_u * tau;
    worst = std::max(worst, energy.max() - b.e_max);
    return worst;
}

} // namespace uavsec
