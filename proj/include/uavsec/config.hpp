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

#ifndef UAVSEC_CONFIG_HPP
#define UAVSEC_CONFIG_HPP

#include "uavsec/channel.hpp"
#include "uavsec/optimizer.hpp"
#include "uavsec/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace uavsec
{

// Experiment configuration. On disk this is a flat JSON object; every key carries its unit
// suffix (_dbm, _m, _s, _j, _hz, _db) and unknown keys are rejected. See README for the schema.
struct ScenarioConfig
{
    // "suburban", "urban", "dense-urban", "highrise-urban" or "custom" (uses env as given)
    std::string environment = "suburban";
    EnvironmentParams env;

    int num_uavs = 7;
    int num_slots = 10;
    int n_bob = 5;
    int n_eve = 3;

    double cell_size_m = 1000.0;
    double hover_radius_m = 50.0;
    double altitude_min_m = 100.0;
    double altitude_max_m = 200.0;
    double r_e_m = 100.0;
    int eve_grid_points = 360;

    double p_max_dbm = 30.0;
    double e_max_j = 300.0;
    double t_total_s = 100.0;
    double tau_max_s = 8.0;
    double t_period_s = 210.0;
    double noise_dbm = -107.0;

    // uniform starting point of the iterative algorithm; clipped into the feasible set
    double init_p_u_dbm = 30.0;
    double init_p_a_dbm = 0.0;
    double init_tau_s = 1.0;

    double epsilon = 1e-3;
    int max_iterations = 50;
    int sca_max_rounds = 50;
    double sca_inner_tol = 1e-9;

    std::uint64_t seed = 1;
    int mc_samples = 10000;
    int replicates = 1;

    // sweep experiment: one of p_max_dbm, e_max_j, num_uavs, environment
    std::string sweep_variable = "e_max_j";
    std::vector<double> sweep_values{50.0, 100.0, 150.0, 200.0, 250.0, 300.0};
    std::vector<std::string> sweep_environments{"suburban", "urban", "dense-urban", "highrise-urban"};
    bool sweep_warm_start = true;

    // durations the baseline is evaluated with: "init" (the starting durations) or "matched"
    // (the durations chosen by the optimizer)
    std::string baseline_tau = "init";

    // validate experiment: AN power levels and signal power sweep, per environment listed
    std::vector<double> validate_pa_dbm{5.0, 10.0, 15.0, 20.0};
    std::vector<double> validate_ps_dbm{0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
    std::vector<std::string> validate_environments{"suburban", "urban", "dense-urban", "highrise-urban"};

    bool operator==(const ScenarioConfig &) const = default;

    // Throws InvalidInputError naming the offending key.
    void validate() const;

    Budgets budgets() const;
    double noise_w() const;
    BcdOptions bcd_options() const;
};

// Parsing throws UsageError on malformed text, wrong types or unknown keys, and
// InvalidInputError when the values violate the invariants.
ScenarioConfig parse_config(const std::string &text);
ScenarioConfig load_config(const std::filesystem::path &path);
std::string serialize_config(const ScenarioConfig &config);

// Hex SHA-256 of the canonical serialization.
std::string config_hash(const ScenarioConfig &config);

} // namespace uavsec

#endif
