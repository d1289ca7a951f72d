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

#include "uavsec/baseline.hpp"

#include "uavsec/channel.hpp"
#include "uavsec/errors.hpp"
#include "uavsec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace uavsec
{

double default_signal_fraction(int n_bob, int n_eve)
{
    if (n_bob < 1 || n_eve < 1)
        throw InvalidInputError("antenna counts must be positive");
    return static_cast<double>(n_bob) / static_cast<double>(n_bob + n_eve);
}

RateEstimate baseline_null_space(const Scenario &scenario, const DurationVector &tau, std::size_t samples,
                                 std::uint64_t seed, double signal_fraction)
{
    scenario.validate();
    const int num_uavs = scenario.num_uavs();
    const int slots = scenario.num_slots();
    if (num_uavs <= scenario.n_bob)
        throw InvalidInputError(
            fmt::format("null-space baseline needs more UAVs than Bob antennas (L = {}, N_B = {})", num_uavs,
                        scenario.n_bob));
    if (tau.n_elem != static_cast<arma::uword>(slots) || arma::any(tau < 0.0))
        throw InvalidInputError("baseline_null_space: invalid durations");
    if (samples < 1)
        throw InvalidInputError("baseline_null_space: need at least one sample");
    const double phi =
        signal_fraction < 0.0 ? default_signal_fraction(scenario.n_bob, scenario.n_eve) : signal_fraction;
    if (phi > 1.0)
        throw InvalidInputError("baseline_null_space: signal fraction above one");

    const double total = num_uavs * scenario.budgets.p_max;
    const auto nb = static_cast<arma::uword>(scenario.n_bob);
    const auto l = static_cast<arma::uword>(num_uavs);
    const double per_signal_dir = phi * total / static_cast<double>(nb);
    const double per_noise_dir = (1.0 - phi) * total / static_cast<double>(l - nb);
    const double noise = scenario.noise_w;

    RateEstimate est;
    est.samples = samples;
    double var = 0.0;
    for (int n = 0; n < slots; ++n)
    {
        const auto c = static_cast<arma::uword>(n);
        const auto slot = static_cast<std::uint64_t>(n);
        double mean = 0.0;
        double m2 = 0.0;
        for (std::size_t k = 0; k < samples; ++k)
        {
            auto rng_b = make_substream({seed, slot, k, StreamTag::FadingBob});
            auto rng_e = make_substream({seed, slot, k, StreamTag::FadingEve});
            const arma::cx_mat hb =
                composite_channel(sample_small_scale(rng_b, scenario.n_bob, num_uavs), scenario.q_bob[c]);
            const arma::cx_mat he =
                composite_channel(sample_small_scale(rng_e, scenario.n_eve, num_uavs), scenario.q_eve[c]);

            arma::cx_mat u;
            arma::vec s;
            arma::cx_mat v;
            if (!arma::svd(u, s, v, hb))
                throw NumericalFailureError("baseline_null_space: SVD failed");
            const arma::cx_mat v_sig = v.cols(0, nb - 1);
            const arma::cx_mat v_null = v.cols(nb, l - 1);
            const arma::cx_mat k_sig = per_signal_dir * v_sig * v_sig.t();
            const arma::cx_mat k_an = per_noise_dir * v_null * v_null.t();

            const double rb = log2det_covariance(hb, k_sig, noise);
            const double re = log2det_covariance(he, k_sig + k_an, noise) - log2det_covariance(he, k_an, noise);
            const double r = rb - re;
            const double delta = r - mean;
            mean += delta / static_cast<double>(k + 1);
            m2 += delta * (r - mean);
        }
        const double w = tau(c) / scenario.budgets.t_period;
        const double se =
            samples > 1 ? std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples)) : 0.0;
        est.mean += w * std::max(0.0, mean);
        var += w * w * se * se;
    }
    est.std_error = std::sqrt(var);
    return est;
}

} // namespace uavsec
