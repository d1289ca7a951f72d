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
#include "uavsec/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <cstdio>
#include <optional>

int main(int argc, char **argv)
{
    CLI::App app{"Secrecy throughput optimisation for a UAV swarm with artificial noise"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> samples;
    std::optional<int> replicates;
    int threads = 1;

    app.add_option("-c,--config", config_path, "Scenario config (JSON)")->required();
    app.add_option("-o,--out", out_dir, "Output directory for CSV files and the run manifest");
    app.add_option("--seed", seed, "Override the base seed");
    app.add_option("--samples", samples, "Override the Monte Carlo sample count")->check(CLI::PositiveNumber);
    app.add_option("--replicates", replicates, "Override the number of topologies")->check(CLI::PositiveNumber);
    app.add_option("-j,--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    app.fallthrough();

    const char *experiments[][2] = {
        {"validate", "Closed-form vs Monte Carlo secrecy throughput"},
        {"optimize", "Run the iterative allocation and dump its trace"},
        {"baseline", "Compare against null-space artificial noise"},
        {"sweep", "Throughput versus P_max, E_max, swarm size or environment"},
        {"convergence", "Iteration-count histogram over random topologies"},
    };
    for (const auto &e : experiments)
        app.add_subcommand(e[0], e[1]);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        return app.exit(e);
    }

    try
    {
        uavsec::ScenarioConfig config = uavsec::load_config(config_path);
        if (seed)
            config.seed = *seed;
        if (samples)
            config.mc_samples = *samples;
        if (replicates)
            config.replicates = *replicates;
        config.validate();

        const std::string experiment = app.get_subcommands().front()->get_name();
        const uavsec::RunOptions options{threads};
        const uavsec::ExperimentResult result = uavsec::run_experiment(config, experiment, options);
        uavsec::write_experiment(result, config, out_dir, options);
        fmt::print("{}: wrote {} table(s) to {}\n", experiment, result.tables.size(), out_dir);
        return 0;
    }
    catch (const uavsec::UsageError &e)
    {
        fmt::print(stderr, "usage error: {}\n", e.what());
        return 2;
    }
    catch (const std::exception &e)
    {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
