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

#include "uavsec/experiment.hpp"

#include "uavsec/baseline.hpp"
#include "uavsec/errors.hpp"
#include "uavsec/rates.hpp"
#include "uavsec/rng.hpp"
#include "uavsec/topology.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <map>
#include <optional>

namespace uavsec
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string flag(bool b) { return b ? "1" : "0"; }

ScenarioConfig with_environment_name(ScenarioConfig config, const std::string &name)
{
    config.environment = name;
    config.env = *environment_preset(name);
    return config;
}

struct McSummary
{
    double unclipped = 0.0;
    double clipped = 0.0;
    double std_error = 0.0;
};

McSummary monte_carlo(const Scenario &scenario, const PowerSchedule &schedule, const DurationVector &tau,
                      std::size_t samples, std::uint64_t seed)
{
    const auto per_slot = secrecy_rate_mc_per_slot(scenario, schedule, samples, seed);
    McSummary out;
    double var = 0.0;
    for (std::size_t n = 0; n < per_slot.size(); ++n)
    {
        const double w = tau(n) / scenario.budgets.t_period;
        out.unclipped += w * per_slot[n].mean;
        out.clipped += w * std::max(0.0, per_slot[n].mean);
        var += w * w * per_slot[n].std_error * per_slot[n].std_error;
    }
    out.std_error = std::sqrt(var);
    return out;
}

double clipped_closed_form(const Scenario &scenario, const ClosedFormResult &cf, const DurationVector &tau)
{
    return arma::dot(tau, arma::clamp(cf.per_slot, 0.0, arma::datum::inf)) / scenario.budgets.t_period;
}

std::vector<std::uint64_t> replicate_seeds(const ScenarioConfig &config)
{
    std::vector<std::uint64_t> seeds;
    for (int k = 0; k < config.replicates; ++k)
        seeds.push_back(replicate_seed(config.seed, k));
    return seeds;
}

ExperimentResult run_validate(const ScenarioConfig &config, const RunOptions &options)
{
    ExperimentResult res;
    res.experiment = "validate";
    res.seeds = replicate_seeds(config);

    struct Item
    {
        int replicate;
        std::size_t env;
        double pa_dbm;
        double ps_dbm;
    };
    std::vector<Item> items;
    for (int k = 0; k < config.replicates; ++k)
        for (std::size_t e = 0; e < config.validate_environments.size(); ++e)
            for (double pa : config.validate_pa_dbm)
                for (double ps : config.validate_ps_dbm)
                    items.push_back({k, e, pa, ps});

    std::map<std::pair<int, std::size_t>, Scenario> scenarios;
    for (int k = 0; k < config.replicates; ++k)
        for (std::size_t e = 0; e < config.validate_environments.size(); ++e)
            scenarios.emplace(std::make_pair(k, e),
                              generate_topology(with_environment_name(config, config.validate_environments[e]),
                                                res.seeds[static_cast<std::size_t>(k)]));

    std::vector<std::vector<std::string>> rows(items.size());
    std::vector<double> times(items.size());
    parallel_for(items.size(), options.threads, [&](std::size_t i) {
        const auto start = Clock::now();
        const Item &it = items[i];
        const Scenario &sc = scenarios.at({it.replicate, it.env});
        const std::uint64_t seed = res.seeds[static_cast<std::size_t>(it.replicate)];
        const double pa = dbm_to_watt(it.pa_dbm);
        const PowerSchedule schedule =
            PowerSchedule::uniform(sc.num_uavs(), sc.num_slots(), dbm_to_watt(it.ps_dbm) + pa, pa);
        const DurationVector tau(static_cast<arma::uword>(sc.num_slots()),
                                 arma::fill::value(std::min(config.init_tau_s, config.tau_max_s)));
        const ClosedFormResult cf = secrecy_throughput_closed_form(sc, schedule, tau);
        const double cf_clipped = clipped_closed_form(sc, cf, tau);
        const McSummary mc = monte_carlo(sc, schedule, tau, static_cast<std::size_t>(config.mc_samples), seed);
        const double gap = std::abs(cf_clipped - mc.clipped) / std::max(mc.clipped, 0.01);
        rows[i] = {std::to_string(it.replicate),
                   std::to_string(seed),
                   config.validate_environments[it.env],
                   format_number(it.pa_dbm),
                   format_number(it.ps_dbm),
                   format_number(cf.r_as),
                   format_number(mc.unclipped),
                   format_number(cf_clipped),
                   format_number(mc.clipped),
                   format_number(mc.std_error),
                   format_number(gap)};
        times[i] = seconds_since(start);
    });

    Table t{{"replicate", "seed", "environment", "p_a_dbm", "p_s_dbm", "r_as", "r_mc", "r_as_clipped",
             "r_mc_clipped", "r_mc_stderr", "rel_gap"},
            std::move(rows)};
    res.tables.emplace_back("validate.csv", std::move(t));
    for (std::size_t i = 0; i < items.size(); ++i)
        res.timing.push_back({fmt::format("replicate={};env={};pa={};ps={}", items[i].replicate,
                                          config.validate_environments[items[i].env], items[i].pa_dbm,
                                          items[i].ps_dbm),
                              times[i]});
    return res;
}

ExperimentResult run_optimize(const ScenarioConfig &config, const RunOptions &options)
{
    ExperimentResult res;
    res.experiment = "optimize";
    res.seeds = replicate_seeds(config);
    const std::size_t count = res.seeds.size();

    std::vector<CaseResult> cases(count);
    std::vector<McSummary> mcs(count);
    std::vector<Scenario> scenarios(count);
    std::vector<double> times(count);
    parallel_for(count, options.threads, [&](std::size_t k) {
        const auto start = Clock::now();
        scenarios[k] = generate_topology(config, res.seeds[k]);
        cases[k] = optimize_case(config, scenarios[k]);
        mcs[k] = monte_carlo(scenarios[k], cases[k].schedule, cases[k].tau,
                             static_cast<std::size_t>(config.mc_samples), res.seeds[k]);
        times[k] = seconds_since(start);
    });

    Table summary{{"replicate", "seed", "iterations", "converged", "non_monotone_steps", "initial_r_as", "r_as",
                   "r_as_clipped", "r_mc_clipped", "r_mc_stderr"},
                  {}};
    Table trace{{"replicate", "iteration", "r_as", "r_as_clipped", "power_kkt_residual", "sca_rounds", "lp_status",
                 "lp_pivots", "monotone"},
                {}};
    Table schedule{{"replicate", "slot", "uav", "p_u_w", "p_a_w", "tau_s"}, {}};
    for (std::size_t k = 0; k < count; ++k)
    {
        const CaseResult &c = cases[k];
        summary.rows.push_back({std::to_string(k), std::to_string(res.seeds[k]),
                                std::to_string(c.trace.iteration_count()), flag(c.trace.converged),
                                std::to_string(c.trace.non_monotone_steps), format_number(c.trace.initial_r_as),
                                format_number(c.r_as), format_number(c.r_as_clipped), format_number(mcs[k].clipped),
                                format_number(mcs[k].std_error)});
        for (const auto &rec : c.trace.iterations)
            trace.rows.push_back({std::to_string(k), std::to_string(rec.iteration), format_number(rec.r_as),
                                  format_number(rec.r_as_clipped), format_number(rec.power_kkt_residual),
                                  std::to_string(rec.sca_rounds), to_string(rec.lp_status),
                                  std::to_string(rec.lp_pivots), flag(rec.monotone)});
        for (arma::uword n = 0; n < c.tau.n_elem; ++n)
            for (arma::uword l = 0; l < c.schedule.p_u.n_rows; ++l)
                schedule.rows.push_back({std::to_string(k), std::to_string(n + 1), std::to_string(l + 1),
                                         format_number(c.schedule.p_u(l, n)), format_number(c.schedule.p_a(l, n)),
                                         format_number(c.tau(n))});
        res.timing.push_back({fmt::format("replicate={}", k), times[k]});
    }
    res.tables.emplace_back("optimize_summary.csv", std::move(summary));
    res.tables.emplace_back("optimize_trace.csv", std::move(trace));
    res.tables.emplace_back("optimize_schedule.csv", std::move(schedule));
    return res;
}

ExperimentResult run_baseline(const ScenarioConfig &config, const RunOptions &options)
{
    ExperimentResult res;
    res.experiment = "baseline";
    res.seeds = replicate_seeds(config);
    const std::size_t count = res.seeds.size();
    const auto samples = static_cast<std::size_t>(config.mc_samples);

    std::vector<std::vector<std::string>> rows(count);
    std::vector<double> times(count);
    parallel_for(count, options.threads, [&](std::size_t k) {
        const auto start = Clock::now();
        const Scenario sc = generate_topology(config, res.seeds[k]);
        const CaseResult c = optimize_case(config, sc);
        const McSummary mc = monte_carlo(sc, c.schedule, c.tau, samples, res.seeds[k]);
        const DurationVector tau = config.baseline_tau == "matched"
                                       ? c.tau
                                       : initial_durations(config, sc, initial_schedule(config, sc));
        const RateEstimate base = baseline_null_space(sc, tau, samples, res.seeds[k]);
        rows[k] = {std::to_string(k),
                   std::to_string(res.seeds[k]),
                   std::to_string(sc.num_uavs()),
                   std::to_string(c.trace.iteration_count()),
                   format_number(c.r_as),
                   format_number(c.r_as_clipped),
                   format_number(mc.clipped),
                   format_number(mc.std_error),
                   config.baseline_tau,
                   format_number(base.mean),
                   format_number(base.std_error)};
        times[k] = seconds_since(start);
    });
    res.tables.emplace_back("baseline.csv",
                            Table{{"replicate", "seed", "num_uavs", "iterations", "proposed_r_as",
                                   "proposed_r_as_clipped", "proposed_r_mc_clipped", "proposed_r_mc_stderr",
                                   "baseline_tau", "baseline_r_mc", "baseline_r_mc_stderr"},
                                  std::move(rows)});
    for (std::size_t k = 0; k < count; ++k)
        res.timing.push_back({fmt::format("replicate={}", k), times[k]});
    return res;
}

ExperimentResult run_sweep(const ScenarioConfig &config, const RunOptions &options)
{
    ExperimentResult res;
    res.experiment = "sweep";
    res.seeds = replicate_seeds(config);
    const std::size_t count = res.seeds.size();
    const auto samples = static_cast<std::size_t>(config.mc_samples);
    const bool by_env = config.sweep_variable == "environment";
    const std::size_t points = by_env ? config.sweep_environments.size() : config.sweep_values.size();

    auto point_config = [&](std::size_t j) {
        ScenarioConfig c = config;
        if (by_env)
            return with_environment_name(c, config.sweep_environments[j]);
        const double v = config.sweep_values[j];
        if (config.sweep_variable == "p_max_dbm")
            c.p_max_dbm = v;
        else if (config.sweep_variable == "e_max_j")
            c.e_max_j = v;
        else
            c.num_uavs = static_cast<int>(v);
        c.validate();
        return c;
    };
    auto point_label = [&](std::size_t j) {
        return by_env ? config.sweep_environments[j] : format_number(config.sweep_values[j]);
    };

    // warm starts chain along the sweep within one replicate, so replicates are the parallel unit
    std::vector<std::vector<std::vector<std::string>>> rows(count);
    std::vector<std::vector<double>> times(count);
    parallel_for(count, options.threads, [&](std::size_t k) {
        std::optional<CaseResult> previous;
        std::optional<double> previous_value;
        for (std::size_t j = 0; j < points; ++j)
        {
            const auto start = Clock::now();
            const ScenarioConfig pc = point_config(j);
            const Scenario sc = generate_topology(pc, res.seeds[k]);
            const bool relaxes = !by_env && config.sweep_warm_start && previous &&
                                 config.sweep_values[j] >= *previous_value;
            CaseResult c = optimize_case(pc, sc, relaxes ? &*previous : nullptr);
            const McSummary mc = monte_carlo(sc, c.schedule, c.tau, samples, res.seeds[k]);
            double base = std::nan("");
            double base_se = std::nan("");
            if (sc.num_uavs() > sc.n_bob)
            {
                const DurationVector tau =
                    pc.baseline_tau == "matched" ? c.tau : initial_durations(pc, sc, initial_schedule(pc, sc));
                const RateEstimate b = baseline_null_space(sc, tau, samples, res.seeds[k]);
                base = b.mean;
                base_se = b.std_error;
            }
            rows[k].push_back({config.sweep_variable, point_label(j), std::to_string(k), std::to_string(res.seeds[k]),
                               std::to_string(c.trace.iteration_count()), flag(c.warm_started), format_number(c.r_as),
                               format_number(c.r_as_clipped), format_number(mc.clipped), format_number(mc.std_error),
                               format_number(base), format_number(base_se)});
            times[k].push_back(seconds_since(start));
            if (!by_env)
                previous_value = config.sweep_values[j];
            previous = std::move(c);
        }
    });

    Table t{{"sweep_variable", "value", "replicate", "seed", "iterations", "warm_started", "r_as", "r_as_clipped",
             "r_mc_clipped", "r_mc_stderr", "baseline_r_mc", "baseline_r_mc_stderr"},
            {}};
    for (std::size_t k = 0; k < count; ++k)
        for (std::size_t j = 0; j < points; ++j)
        {
            t.rows.push_back(rows[k][j]);
            res.timing.push_back({fmt::format("replicate={};value={}", k, point_label(j)), times[k][j]});
        }
    res.tables.emplace_back("sweep.csv", std::move(t));
    return res;
}

ExperimentResult run_convergence(const ScenarioConfig &config, const RunOptions &options)
{
    ExperimentResult res;
    res.experiment = "convergence";
    res.seeds = replicate_seeds(config);
    const std::size_t count = res.seeds.size();

    std::vector<CaseResult> cases(count);
    std::vector<double> times(count);
    parallel_for(count, options.threads, [&](std::size_t k) {
        const auto start = Clock::now();
        cases[k] = optimize_case(config, generate_topology(config, res.seeds[k]));
        times[k] = seconds_since(start);
    });

    Table runs{{"replicate", "seed", "iterations", "converged", "non_monotone_steps", "initial_r_as", "final_r_as"},
               {}};
    std::map<int, int> histogram;
    for (std::size_t k = 0; k < count; ++k)
    {
        const SolutionTrace &tr = cases[k].trace;
        runs.rows.push_back({std::to_string(k), std::to_string(res.seeds[k]), std::to_string(tr.iteration_count()),
                             flag(tr.converged), std::to_string(tr.non_monotone_steps),
                             format_number(tr.initial_r_as), format_number(cases[k].r_as)});
        ++histogram[tr.iteration_count()];
        res.timing.push_back({fmt::format("replicate={}", k), times[k]});
    }
    Table hist{{"iterations", "count", "fraction"}, {}};
    for (const auto &[iters, n] : histogram)
        hist.rows.push_back({std::to_string(iters), std::to_string(n),
                             format_number(static_cast<double>(n) / static_cast<double>(count))});
    res.tables.emplace_back("convergence.csv", std::move(runs));
    res.tables.emplace_back("convergence_histogram.csv", std::move(hist));
    return res;
}

} // namespace

std::string Table::to_csv() const
{
    std::string out;
    auto line = [&](const std::vector<std::string> &cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
        {
            if (i > 0)
                out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header);
    for (const auto &r : rows)
    {
        if (r.size() != header.size())
            throw NumericalFailureError("CSV row width does not match its header");
        line(r);
    }
    return out;
}

std::string format_number(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    return fmt::format("{}", value);
}

std::uint64_t replicate_seed(std::uint64_t base_seed, int replicate)
{
    return splitmix64(base_seed ^ splitmix64(static_cast<std::uint64_t>(replicate) + 1));
}

PowerSchedule initial_schedule(const ScenarioConfig &config, const Scenario &scenario)
{
    const double p_u = std::min(dbm_to_watt(config.init_p_u_dbm), scenario.budgets.p_max);
    const double p_a = std::min(dbm_to_watt(config.init_p_a_dbm), p_u);
    return PowerSchedule::uniform(scenario.num_uavs(), scenario.num_slots(), p_u, p_a);
}

DurationVector initial_durations(const ScenarioConfig &config, const Scenario &scenario, const PowerSchedule &schedule)
{
    const auto &b = scenario.budgets;
    DurationVector tau(static_cast<arma::uword>(scenario.num_slots()),
                       arma::fill::value(std::min(config.init_tau_s, b.tau_max)));
    double shrink = 1.0;
    const double total = arma::accu(tau);
    if (total > b.t_total)
        shrink = b.t_total / total;
    const arma::vec energy = schedule.p_u * tau;
    for (arma::uword l = 0; l < energy.n_elem; ++l)
        if (energy(l) > b.e_max)
            shrink = std::min(shrink, b.e_max / energy(l));
    return tau * shrink;
}

CaseResult optimize_case(const ScenarioConfig &config, const Scenario &scenario, const CaseResult *warm)
{
    const BcdOptions options = config.bcd_options();
    const PowerSchedule init = initial_schedule(config, scenario);
    const DurationVector init_tau = initial_durations(config, scenario, init);

    auto finish = [&](SolutionTrace trace, const PowerSchedule &s0, const DurationVector &t0, bool warm_started) {
        CaseResult c;
        c.warm_started = warm_started;
        if (trace.iterations.empty())
        {
            c.schedule = s0;
            c.tau = t0;
            c.r_as = trace.initial_r_as;
        }
        else
        {
            const IterationRecord &last = trace.final_iterate();
            c.schedule = last.schedule;
            c.tau = last.tau;
            c.r_as = last.r_as;
        }
        const ClosedFormResult cf = secrecy_throughput_closed_form(scenario, c.schedule, c.tau);
        c.r_as_clipped = clipped_closed_form(scenario, cf, c.tau);
        c.trace = std::move(trace);
        return c;
    };

    CaseResult best = finish(run_bcd(scenario, init, init_tau, options), init, init_tau, false);
    if (warm == nullptr)
        return best;

    const auto rows = static_cast<arma::uword>(scenario.num_uavs());
    const auto cols = static_cast<arma::uword>(scenario.num_slots());
    if (warm->schedule.p_u.n_rows > rows || warm->schedule.p_u.n_cols != cols || warm->tau.n_elem != cols)
        return best;
    PowerSchedule ws{arma::mat(rows, cols, arma::fill::zeros), arma::mat(rows, cols, arma::fill::zeros)};
    ws.p_u.rows(0, warm->schedule.p_u.n_rows - 1) = warm->schedule.p_u;
    ws.p_a.rows(0, warm->schedule.p_a.n_rows - 1) = warm->schedule.p_a;
    const auto &b = scenario.budgets;
    if (constraint_violation(scenario, ws, warm->tau) > 1e-9 * (1.0 + std::max({b.p_max, b.e_max, b.t_total})))
        return best;

    CaseResult other = finish(run_bcd(scenario, ws, warm->tau, options), ws, warm->tau, true);
    return other.r_as > best.r_as ? other : best;
}

ExperimentResult run_experiment(const ScenarioConfig &config, std::string_view experiment, const RunOptions &options)
{
    config.validate();
    if (experiment == "validate")
        return run_validate(config, options);
    if (experiment == "optimize")
        return run_optimize(config, options);
    if (experiment == "baseline")
        return run_baseline(config, options);
    if (experiment == "sweep")
        return run_sweep(config, options);
    if (experiment == "convergence")
        return run_convergence(config, options);
    throw UsageError(fmt::format("unknown experiment '{}'", experiment));
}

void write_experiment(const ExperimentResult &result, const ScenarioConfig &config,
                      const std::filesystem::path &out_dir, const RunOptions &options)
{
    std::filesystem::create_directories(out_dir);
    auto write_file = [&](const std::string &name, const std::string &text) {
        std::ofstream out(out_dir / name, std::ios::binary | std::ios::trunc);
        out << text;
        if (!out)
            throw UsageError(fmt::format("cannot write '{}'", (out_dir / name).string()));
    };

    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto &[name, table] : result.tables)
    {
        write_file(name, table.to_csv());
        files.push_back(name);
    }

    Table timing{{"experiment", "item", "wall_seconds"}, {}};
    double total = 0.0;
    for (const auto &t : result.timing)
    {
        timing.rows.push_back({result.experiment, t.item, format_number(t.wall_seconds)});
        total += t.wall_seconds;
    }
    write_file("timing.csv", timing.to_csv());

    nlohmann::ordered_json manifest;
    manifest["experiment"] = result.experiment;
    manifest["csv_schema_version"] = kCsvSchemaVersion;
    manifest["config_sha256"] = config_hash(config);
    manifest["base_seed"] = config.seed;
    manifest["replicate_seeds"] = result.seeds;
    manifest["threads"] = options.threads;
    manifest["files"] = files;
    manifest["summed_item_wall_seconds"] = total;
    manifest["config"] = nlohmann::ordered_json::parse(serialize_config(config));
    write_file("manifest.json", manifest.dump(2) + "\n");
}

} // namespace uavsec
