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

#include <catch_amalgamated.hpp>

#include "uavsec/baseline.hpp"
#include "uavsec/config.hpp"
#include "uavsec/errors.hpp"
#include "uavsec/experiment.hpp"
#include "uavsec/rng.hpp"
#include "uavsec/topology.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace uavsec;
using Catch::Approx;

namespace
{

ScenarioConfig small_config()
{
    ScenarioConfig c = parse_config("{}");
    c.num_slots = 4;
    c.mc_samples = 50;
    c.replicates = 3;
    return c;
}

std::string slurp(const std::filesystem::path &p)
{
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("config - defaults reproduce the reference parameter set")
{
    const ScenarioConfig c = parse_config("{}");
    CHECK(c.environment == "suburban");
    CHECK(c.num_slots == 10);
    CHECK(c.n_bob == 5);
    CHECK(c.n_eve == 3);
    CHECK(c.tau_max_s == 8.0);
    CHECK(c.t_total_s == 100.0);
    CHECK(c.t_period_s == 210.0);
    CHECK(c.noise_dbm == -107.0);
    CHECK(c.epsilon == 1e-3);
    CHECK(c.env.carrier_hz == 2.4e9);
    CHECK(c.budgets().p_max == Approx(1.0));
    CHECK(c.noise_w() == Approx(std::pow(10.0, -13.7)));
}

TEST_CASE("config - parse, serialize, parse round trip")
{
    ScenarioConfig c = parse_config(R"({"environment": "dense-urban", "num_uavs": 9, "p_max_dbm": 33.5,
        "sweep_variable": "num_uavs", "sweep_values": [5, 7, 9], "seed": 18446744073709551615,
        "baseline_tau": "matched", "validate_environments": ["urban"]})");
    CHECK(c.env == *environment_preset("dense-urban"));
    CHECK(c.seed == 18446744073709551615ull);
    const ScenarioConfig again = parse_config(serialize_config(c));
    CHECK(again == c);
    CHECK(serialize_config(again) == serialize_config(c));
    CHECK(config_hash(again) == config_hash(c));
    CHECK(config_hash(c).size() == 64);

    ScenarioConfig other = c;
    other.p_max_dbm = 33.6;
    CHECK(config_hash(other) != config_hash(c));

    const ScenarioConfig custom = parse_config(R"({"environment": "custom", "eta_los_db": 0.5, "eta_nlos_db": 25,
        "los_a": 9.61, "los_b": 0.16})");
    CHECK(custom.env.eta_nlos_db == 25.0);
    CHECK(custom.env.a == 9.61);
    CHECK(parse_config(serialize_config(custom)) == custom);
}

TEST_CASE("config - malformed input")
{
    CHECK_THROWS_AS(parse_config("{not json"), UsageError);
    CHECK_THROWS_AS(parse_config("[1, 2]"), UsageError);
    CHECK_THROWS_AS(parse_config(R"({"num_uav": 7})"), UsageError);
    CHECK_THROWS_AS(parse_config(R"({"num_uavs": "seven"})"), UsageError);
    CHECK_THROWS_AS(parse_config(R"({"num_uavs": 7.5})"), UsageError);
    CHECK_THROWS_AS(parse_config(R"({"seed": -1})"), UsageError);
    CHECK_THROWS_AS(parse_config(R"({"eta_los_db": 1.0})"), UsageError);
    CHECK_THROWS_AS(parse_config(R"({"num_uavs": 0})"), InvalidInputError);
    CHECK_THROWS_AS(parse_config(R"({"altitude_min_m": 0})"), InvalidInputError);
    CHECK_THROWS_AS(parse_config(R"({"altitude_min_m": 300})"), InvalidInputError);
    CHECK_THROWS_AS(parse_config(R"({"environment": "rural"})"), InvalidInputError);
    CHECK_THROWS_AS(parse_config(R"({"sweep_variable": "noise_dbm"})"), InvalidInputError);
    CHECK_THROWS_AS(parse_config(R"({"tau_max_s": 200})"), InvalidInputError);
    CHECK_THROWS_AS(parse_config(R"({"baseline_tau": "longest"})"), InvalidInputError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), UsageError);
}

TEST_CASE("generate_topology - placement bounds and determinism")
{
    const ScenarioConfig c = parse_config("{}");
    for (std::uint64_t seed : {1ull, 2ull, 99ull})
    {
        const Scenario a = generate_topology(c, seed);
        const Scenario b = generate_topology(c, seed);
        REQUIRE(a.slots.size() == 10);
        CHECK(a.slots == b.slots);
        for (std::size_t n = 0; n < a.slots.size(); ++n)
        {
            CHECK(arma::all(a.q_bob[n].q == b.q_bob[n].q));
            const SlotGeometry &sg = a.slots[n];
            CHECK(sg.slot_index == static_cast<int>(n) + 1);
            CHECK(sg.bob_position.x >= 0.0);
            CHECK(sg.bob_position.x <= 1000.0);
            CHECK(sg.bob_position.y >= 0.0);
            CHECK(sg.bob_position.y <= 1000.0);
            CHECK(sg.bob_position.z == 0.0);
            REQUIRE(sg.uav_positions.size() == 7);
            for (const auto &u : sg.uav_positions)
            {
                CHECK(std::hypot(u.x - sg.bob_position.x, u.y - sg.bob_position.y) <= 50.0);
                CHECK(u.z >= 100.0);
                CHECK(u.z <= 200.0);
            }
            CHECK(std::hypot(sg.eve_position.x - sg.bob_position.x, sg.eve_position.y - sg.bob_position.y) ==
                  Approx(100.0).epsilon(1e-12));
        }
    }
    CHECK_FALSE(generate_topology(c, 1).slots == generate_topology(c, 2).slots);
}

TEST_CASE("generate_topology - growing the swarm keeps the existing UAVs in place")
{
    ScenarioConfig c = parse_config("{}");
    c.num_uavs = 5;
    const Scenario small = generate_topology(c, 4);
    c.num_uavs = 9;
    const Scenario big = generate_topology(c, 4);
    for (std::size_t n = 0; n < small.slots.size(); ++n)
    {
        CHECK(small.slots[n].bob_position == big.slots[n].bob_position);
        for (std::size_t l = 0; l < 5; ++l)
            CHECK(small.slots[n].uav_positions[l] == big.slots[n].uav_positions[l]);
    }
}

TEST_CASE("baseline_null_space - signal share and preconditions")
{
    CHECK(default_signal_fraction(5, 3) == Approx(5.0 / 8.0));
    ScenarioConfig c = small_config();
    c.num_uavs = 5;
    const Scenario too_small = generate_topology(c, 1);
    CHECK_THROWS_AS(baseline_null_space(too_small, arma::vec(4, arma::fill::ones), 10, 1), InvalidInputError);
}

TEST_CASE("baseline_null_space - no artificial noise reduces to a signal-only secrecy rate")
{
    ScenarioConfig c = small_config();
    c.num_slots = 2;
    const Scenario sc = generate_topology(c, 3);
    const arma::vec tau{2.0, 5.0};
    const std::size_t samples = 200;
    const RateEstimate got = baseline_null_space(sc, tau, samples, 11, 1.0);

    // independent evaluation: equal power on the N_B strongest right-singular directions, no AN
    double expected = 0.0;
    const double total = sc.num_uavs() * sc.budgets.p_max;
    for (int n = 0; n < 2; ++n)
    {
        const auto col = static_cast<arma::uword>(n);
        double mean = 0.0;
        for (std::size_t k = 0; k < samples; ++k)
        {
            auto rb = make_substream({11, static_cast<std::uint64_t>(n), k, StreamTag::FadingBob});
            auto re = make_substream({11, static_cast<std::uint64_t>(n), k, StreamTag::FadingEve});
            const arma::cx_mat hb = composite_channel(sample_small_scale(rb, 5, 7), sc.q_bob[col]);
            const arma::cx_mat he = composite_channel(sample_small_scale(re, 3, 7), sc.q_eve[col]);
            arma::cx_mat u;
            arma::vec s;
            arma::cx_mat v;
            REQUIRE(arma::svd(u, s, v, hb));
            const arma::cx_mat v1 = v.cols(0, 4);
            const arma::cx_mat k_sig = (total / 5.0) * v1 * v1.t();
            const arma::cx_mat mb = arma::eye<arma::cx_mat>(5, 5) + hb * k_sig * hb.t() / sc.noise_w;
            const arma::cx_mat me = arma::eye<arma::cx_mat>(3, 3) + he * k_sig * he.t() / sc.noise_w;
            mean += (std::real(arma::log_det(mb)) - std::real(arma::log_det(me))) / std::log(2.0);
        }
        mean /= static_cast<double>(samples);
        expected += tau(col) / sc.budgets.t_period * std::max(0.0, mean);
    }
    CHECK(got.mean == Approx(expected).epsilon(1e-9));
}

TEST_CASE("baseline_null_space - artificial noise never reaches Bob")
{
    ScenarioConfig c = small_config();
    c.num_slots = 1;
    const Scenario sc = generate_topology(c, 8);
    // with everything on AN, Bob receives nothing and the clipped throughput is zero
    CHECK(baseline_null_space(sc, arma::vec{4.0}, 50, 2, 0.0).mean == 0.0);
}

TEST_CASE("initial point is pulled inside the feasible set")
{
    ScenarioConfig c = parse_config(R"({"init_p_u_dbm": 36, "init_p_a_dbm": 40, "init_tau_s": 20, "e_max_j": 6})");
    const Scenario sc = generate_topology(c, 1);
    const PowerSchedule s = initial_schedule(c, sc);
    const arma::vec tau = initial_durations(c, sc, s);
    CHECK(s.p_u.max() == Approx(1.0));
    CHECK(arma::all(arma::vectorise(s.p_a <= s.p_u)));
    CHECK(constraint_violation(sc, s, tau) <= 1e-12);
    CHECK(tau.max() <= 8.0);
}

TEST_CASE("format_number - shortest round-trip text")
{
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5e17})
        CHECK(std::stod(format_number(v)) == v);
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(2.0) == "2");
}

TEST_CASE("run_experiment - identical reruns and thread counts give identical tables")
{
    const ScenarioConfig c = small_config();
    for (const char *name : {"optimize", "convergence", "baseline"})
    {
        const ExperimentResult a = run_experiment(c, name, RunOptions{1});
        const ExperimentResult b = run_experiment(c, name, RunOptions{1});
        const ExperimentResult t = run_experiment(c, name, RunOptions{3});
        REQUIRE(a.tables.size() == b.tables.size());
        for (std::size_t i = 0; i < a.tables.size(); ++i)
        {
            CHECK(a.tables[i].first == b.tables[i].first);
            CHECK(a.tables[i].second.to_csv() == b.tables[i].second.to_csv());
            CHECK(a.tables[i].second.to_csv() == t.tables[i].second.to_csv());
        }
        CHECK(a.seeds == t.seeds);
    }
    CHECK_THROWS_AS(run_experiment(c, "plot"), UsageError);
}

TEST_CASE("run_experiment - energy sweep is nondecreasing")
{
    ScenarioConfig c = small_config();
    c.replicates = 2;
    c.mc_samples = 20;
    c.sweep_variable = "e_max_j";
    c.sweep_values = {50, 100, 150, 200, 250, 300};
    const ExperimentResult r = run_experiment(c, "sweep");
    const Table &t = r.tables.front().second;
    REQUIRE(t.rows.size() == 12);
    const auto col = static_cast<std::size_t>(std::find(t.header.begin(), t.header.end(), "r_as") - t.header.begin());
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t j = 1; j < 6; ++j)
            CHECK(std::stod(t.rows[k * 6 + j][col]) >= std::stod(t.rows[k * 6 + j - 1][col]) - 1e-9);
}

TEST_CASE("write_experiment - files, manifest and reproducible numeric output")
{
    const ScenarioConfig c = small_config();
    const auto dir = std::filesystem::temp_directory_path() / "uavsec_harness_test";
    std::filesystem::remove_all(dir);
    const ExperimentResult r = run_experiment(c, "optimize");
    write_experiment(r, c, dir / "a");
    write_experiment(run_experiment(c, "optimize"), c, dir / "b");
    for (const char *f : {"optimize_summary.csv", "optimize_trace.csv", "optimize_schedule.csv"})
    {
        REQUIRE(std::filesystem::exists(dir / "a" / f));
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
    CHECK(std::filesystem::exists(dir / "a" / "timing.csv"));
    const std::string manifest = slurp(dir / "a" / "manifest.json");
    CHECK(manifest.find(config_hash(c)) != std::string::npos);
    CHECK(manifest.find("\"replicate_seeds\"") != std::string::npos);
    std::filesystem::remove_all(dir);
}
