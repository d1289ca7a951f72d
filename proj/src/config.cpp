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

#include "uavsec/config.hpp"

#include "uavsec/errors.hpp"

#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <openssl/evp.h>
#include <set>
#include <sstream>

namespace uavsec
{

namespace
{

using Json = nlohmann::ordered_json;

constexpr const char *kEnvKeys[] = {"eta_los_db", "eta_nlos_db", "los_a", "los_b", "carrier_hz", "light_speed_m_per_s"};

// Calls f(key, field) for every scalar and list key except the environment block.
template <typename Config, typename F>
void visit_fields(Config &c, F &&f)
{
    f("environment", c.environment);
    f("num_uavs", c.num_uavs);
    f("num_slots", c.num_slots);
    f("n_bob", c.n_bob);
    f("n_eve", c.n_eve);
    f("cell_size_m", c.cell_size_m);
    f("hover_radius_m", c.hover_radius_m);
    f("altitude_min_m", c.altitude_min_m);
    f("altitude_max_m", c.altitude_max_m);
    f("r_e_m", c.r_e_m);
    f("eve_grid_points", c.eve_grid_points);
    f("p_max_dbm", c.p_max_dbm);
    f("e_max_j", c.e_max_j);
    f("t_total_s", c.t_total_s);
    f("tau_max_s", c.tau_max_s);
    f("t_period_s", c.t_period_s);
    f("noise_dbm", c.noise_dbm);
    f("init_p_u_dbm", c.init_p_u_dbm);
    f("init_p_a_dbm", c.init_p_a_dbm);
    f("init_tau_s", c.init_tau_s);
    f("epsilon", c.epsilon);
    f("max_iterations", c.max_iterations);
    f("sca_max_rounds", c.sca_max_rounds);
    f("sca_inner_tol", c.sca_inner_tol);
    f("seed", c.seed);
    f("mc_samples", c.mc_samples);
    f("replicates", c.replicates);
    f("sweep_variable", c.sweep_variable);
    f("sweep_values", c.sweep_values);
    f("sweep_environments", c.sweep_environments);
    f("sweep_warm_start", c.sweep_warm_start);
    f("baseline_tau", c.baseline_tau);
    f("validate_pa_dbm", c.validate_pa_dbm);
    f("validate_ps_dbm", c.validate_ps_dbm);
    f("validate_environments", c.validate_environments);
}

template <typename Config, typename F>
void visit_env(Config &c, F &&f)
{
    f(kEnvKeys[0], c.env.eta_los_db);
    f(kEnvKeys[1], c.env.eta_nlos_db);
    f(kEnvKeys[2], c.env.a);
    f(kEnvKeys[3], c.env.b);
    f(kEnvKeys[4], c.env.carrier_hz);
    f(kEnvKeys[5], c.env.light_speed);
}

template <typename T>
void read_value(const Json &node, const std::string &key, T &out)
{
    try
    {
        if constexpr (std::is_same_v<T, bool>)
        {
            if (!node.is_boolean())
                throw UsageError("");
        }
        else if constexpr (std::is_integral_v<T>)
        {
            if (!node.is_number_integer())
                throw UsageError("");
            if constexpr (std::is_unsigned_v<T>)
                if (node.is_number_integer() && !node.is_number_unsigned() && node.get<std::int64_t>() < 0)
                    throw UsageError("");
        }
        else if constexpr (std::is_floating_point_v<T>)
        {
            if (!node.is_number())
                throw UsageError("");
        }
        out = node.get<T>();
    }
    catch (const std::exception &)
    {
        throw UsageError(fmt::format("config key '{}' has the wrong type", key));
    }
}

void require_positive(bool ok, const char *key)
{
    if (!ok)
        throw InvalidInputError(fmt::format("config key '{}' is out of range", key));
}

} // namespace

void ScenarioConfig::validate() const
{
    if (environment == "custom")
        env.validate();
    else
    {
        const auto preset = environment_preset(environment);
        if (!preset)
            throw InvalidInputError(fmt::format("config key 'environment': unknown preset '{}'", environment));
        if (!(*preset == env))
            throw InvalidInputError("environment parameters differ from the named preset; use \"custom\"");
    }
    require_positive(num_uavs > 0, "num_uavs");
    require_positive(num_slots > 0, "num_slots");
    require_positive(n_bob > 0, "n_bob");
    require_positive(n_eve > 0, "n_eve");
    require_positive(cell_size_m > 0.0, "cell_size_m");
    require_positive(hover_radius_m >= 0.0, "hover_radius_m");
    require_positive(altitude_min_m > 0.0, "altitude_min_m");
    require_positive(altitude_max_m >= altitude_min_m, "altitude_max_m");
    require_positive(r_e_m > 0.0, "r_e_m");
    require_positive(eve_grid_points >= 8, "eve_grid_points");
    require_positive(std::isfinite(p_max_dbm), "p_max_dbm");
    require_positive(std::isfinite(noise_dbm), "noise_dbm");
    require_positive(std::isfinite(init_p_u_dbm), "init_p_u_dbm");
    require_positive(std::isfinite(init_p_a_dbm), "init_p_a_dbm");
    require_positive(init_tau_s >= 0.0, "init_tau_s");
    require_positive(epsilon > 0.0, "epsilon");
    require_positive(max_iterations > 0, "max_iterations");
    require_positive(sca_max_rounds > 0, "sca_max_rounds");
    require_positive(sca_inner_tol >= 0.0, "sca_inner_tol");
    require_positive(mc_samples > 0, "mc_samples");
    require_positive(replicates > 0, "replicates");
    budgets().validate();

    static const std::set<std::string> sweep_vars{"p_max_dbm", "e_max_j", "num_uavs", "environment"};
    if (!sweep_vars.contains(sweep_variable))
        throw InvalidInputError(fmt::format("config key 'sweep_variable': unknown variable '{}'", sweep_variable));
    if (sweep_variable == "environment")
        require_positive(!sweep_environments.empty(), "sweep_environments");
    else
        require_positive(!sweep_values.empty(), "sweep_values");
    if (sweep_variable == "num_uavs")
        for (double v : sweep_values)
            require_positive(v >= 1.0 && v == std::floor(v), "sweep_values");
    for (const auto &name : sweep_environments)
        require_positive(environment_preset(name).has_value(), "sweep_environments");
    for (const auto &name : validate_environments)
        require_positive(environment_preset(name).has_value(), "validate_environments");
    require_positive(baseline_tau == "init" || baseline_tau == "matched", "baseline_tau");
}

Budgets ScenarioConfig::budgets() const
{
    Budgets b;
    b.p_max = dbm_to_watt(p_max_dbm);
    b.e_max = e_max_j;
    b.t_total = t_total_s;
    b.tau_max = tau_max_s;
    b.t_period = t_period_s;
    return b;
}

double ScenarioConfig::noise_w() const { return dbm_to_watt(noise_dbm); }

BcdOptions ScenarioConfig::bcd_options() const
{
    BcdOptions o;
    o.epsilon = epsilon;
    o.max_iter = max_iterations;
    o.sca_max_rounds = sca_max_rounds;
    o.sca_inner_tol = sca_inner_tol;
    return o;
}

ScenarioConfig parse_config(const std::string &text)
{
    Json root;
    try
    {
        root = Json::parse(text);
    }
    catch (const nlohmann::json::exception &e)
    {
        throw UsageError(fmt::format("config is not valid JSON: {}", e.what()));
    }
    if (!root.is_object())
        throw UsageError("config must be a JSON object");

    ScenarioConfig cfg;
    std::set<std::string> known;
    visit_fields(cfg, [&](const char *key, auto &field) {
        known.insert(key);
        if (root.contains(key))
            read_value(root.at(key), key, field);
    });

    bool env_given = false;
    visit_env(cfg, [&](const char *key, auto &field) {
        known.insert(key);
        if (root.contains(key))
        {
            env_given = true;
            read_value(root.at(key), key, field);
        }
    });
    for (const auto &item : root.items())
        if (!known.contains(item.key()))
            throw UsageError(fmt::format("unknown config key '{}'", item.key()));

    if (cfg.environment != "custom")
    {
        if (env_given)
            throw UsageError("environment parameters require \"environment\": \"custom\"");
        const auto preset = environment_preset(cfg.environment);
        if (!preset)
            throw InvalidInputError(fmt::format("config key 'environment': unknown preset '{}'", cfg.environment));
        cfg.env = *preset;
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError(fmt::format("cannot open config file '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ScenarioConfig &config)
{
    Json root = Json::object();
    visit_fields(config, [&](const char *key, const auto &field) { root[key] = field; });
    if (config.environment == "custom")
        visit_env(config, [&](const char *key, const auto &field) { root[key] = field; });
    return root.dump(2) + "\n";
}

std::string config_hash(const ScenarioConfig &config)
{
    const std::string text = serialize_config(config);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw NumericalFailureError("SHA-256 digest failed");
    std::string hex;
    for (unsigned int i = 0; i < len; ++i)
        hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

} // namespace uavsec
