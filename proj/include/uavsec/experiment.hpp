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

#ifndef UAVSEC_EXPERIMENT_HPP
#define UAVSEC_EXPERIMENT_HPP

#include "uavsec/config.hpp"
#include "uavsec/optimizer.hpp"
#include "uavsec/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

namespace uavsec
{

inline constexpr int kCsvSchemaVersion = 1;

// A CSV file: header plus rows of preformatted cells.
struct Table
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const;
};

struct TimingRow
{
    std::string item;
    double wall_seconds = 0.0;
};

struct ExperimentResult
{
    std::string experiment;
    std::vector<std::pair<std::string, Table>> tables; // file name, table; emission order
    std::vector<TimingRow> timing;                     // kept apart so the tables stay reproducible
    std::vector<std::uint64_t> seeds;                  // topology seed per replicate
};

struct RunOptions
{
    int threads = 1;
};

// Topology seed of replicate k. Fading draws reuse it under their own stream tags.
std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate);

// Uniform starting point from the config, pulled inside the feasible set: powers clipped to
// P_max and p_a <= p_u, durations clipped to tau_max and scaled down to meet T_t and E_max.
PowerSchedule initial_schedule(const ScenarioConfig &config, const Scenario &scenario);
DurationVector initial_durations(const ScenarioConfig &config, const Scenario &scenario, const PowerSchedule &schedule);

struct CaseResult
{
    SolutionTrace trace;
    PowerSchedule schedule;
    DurationVector tau;
    double r_as = 0.0;
    double r_as_clipped = 0.0;
    bool warm_started = false;
};

// Runs the iterative algorithm from the config starting point. With a warm start (a solution
// of a smaller or equally constrained instance) a second run starts there, missing UAV rows
// padded with zero power, and the better of the two is kept. An infeasible warm start is ignored.
CaseResult optimize_case(const ScenarioConfig &config, const Scenario &scenario, const CaseResult *warm = nullptr);

// experiment is one of validate, optimize, baseline, sweep, convergence. Unknown names throw
// UsageError. Output rows are ordered by (replicate, sweep key) whatever the thread count.
ExperimentResult run_experiment(const ScenarioConfig &config, std::string_view experiment,
                                const RunOptions &options = {});

// Writes every table, timing.csv and manifest.json into out_dir (created if needed).
void write_experiment(const ExperimentResult &result, const ScenarioConfig &config, const std::filesystem::path &out_dir,
                      const RunOptions &options = {});

// Shortest text that reads back to the same double; "nan" and "inf" spelled out.
std::string format_number(double value);

// Runs fn(i) for i in [0, count) on up to `threads` workers. fn must write only to slot i of
// its output. The exception of the lowest failing index is rethrown.
template <typename F>
void parallel_for(std::size_t count, int threads, F &&fn)
{
    const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
    std::vector<std::exception_ptr> errors(count);
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    else
    {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++)
                {
                    try
                    {
                        fn(i);
                    }
                    catch (...)
                    {
                        errors[i] = std::current_exception();
                    }
                }
            });
        for (auto &t : pool)
            t.join();
    }
    for (const auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace uavsec

#endif
