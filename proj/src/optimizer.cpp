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

#include "uavsec/optimizer.hpp"

#include "uavsec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace uavsec
{

namespace
{

constexpr double kLog2e = std::numbers::log2e;

void check_dims(const Scenario &scenario, const PowerSchedule &schedule, const DurationVector &tau)
{
    const auto l = static_cast<arma::uword>(scenario.num_uavs());
    const auto n = static_cast<arma::uword>(scenario.num_slots());
    if (schedule.p_u.n_rows != l || schedule.p_u.n_cols != n || schedule.p_a.n_rows != l ||
        schedule.p_a.n_cols != n || tau.n_elem != n)
        throw InvalidInputError("schedule or duration dimensions do not match the scenario");
}

double feasibility_slack(const Scenario &scenario)
{
    const auto &b = scenario.budgets;
    return 1e-9 * (1.0 + std::max({b.p_max, b.e_max, b.t_total}));
}

struct SlotPoint
{
    double p_u = 0.0;
    double p_a = 0.0;
};

// Maximiser of log2(1 + alpha u) - c_u u + log2(1 + kappa a) - beta a over 0 <= a <= u <= p_max.
SlotPoint slot_argmax(double alpha, double kappa, double beta, double c_u, double p_max)
{
    double u = 0.0;
    if (alpha > 0.0)
        u = c_u <= 0.0 ? p_max : std::clamp(kLog2e / c_u - 1.0 / alpha, 0.0, p_max);
    double a = 0.0;
    if (kappa > 0.0)
        a = beta <= 0.0 ? p_max : std::clamp(kLog2e / beta - 1.0 / kappa, 0.0, p_max);
    if (a <= u)
        return {u, a};

    // The box maximiser violates a <= u, so the optimum sits on a = u = p. The derivative
    // log2(e) (alpha/(1+alpha p) + kappa/(1+kappa p)) - c is decreasing; its root solves
    // c alpha kappa p^2 + (c (alpha + kappa) - 2 log2(e) alpha kappa) p + c - log2(e) (alpha + kappa) = 0.
    const double c = c_u + beta;
    if (c <= 0.0)
        return {p_max, p_max};
    const double cc = c - kLog2e * (alpha + kappa);
    if (cc >= 0.0)
        return {0.0, 0.0};
    const double qa = c * alpha * kappa;
    const double qb = c * (alpha + kappa) - 2.0 * kLog2e * alpha * kappa;
    double p = 0.0;
    if (qa == 0.0)
        p = -cc / qb;
    else
    {
        const double disc = std::sqrt(qb * qb - 4.0 * qa * cc);
        p = qb > 0.0 ? -2.0 * cc / (qb + disc) : (-qb + disc) / (2.0 * qa);
    }
    p = std::clamp(p, 0.0, p_max);
    return {p, p};
}

// Euclidean projection onto {(u, a) : 0 <= a <= u <= p_max}.
SlotPoint project_triangle(double u, double a, double p_max)
{
    if (a >= 0.0 && a <= u && u <= p_max)
        return {u, a};
    const SlotPoint cands[3] = {
        {std::clamp(u, 0.0, p_max), 0.0},
        {p_max, std::clamp(a, 0.0, p_max)},
        {std::clamp(0.5 * (u + a), 0.0, p_max), std::clamp(0.5 * (u + a), 0.0, p_max)},
    };
    SlotPoint best = cands[0];
    double best_d = std::hypot(u - best.p_u, a - best.p_a);
    for (const auto &cand : cands)
    {
        const double d = std::hypot(u - cand.p_u, a - cand.p_a);
        if (d < best_d)
        {
            best_d = d;
            best = cand;
        }
    }
    return best;
}

} // namespace

AuxPair solve_aux_block_min(const PowerSchedule &schedule, const DurationVector &tau, const Scenario &scenario)
{
    check_dims(scenario, schedule, tau);
    const int slots = scenario.num_slots();
    AuxPair out{arma::vec(slots), arma::vec(slots)};
    for (int n = 0; n < slots; ++n)
    {
        const auto c = static_cast<arma::uword>(n);
        out.first(c) = solve_fixed_point(schedule.p_u.col(c), scenario.n_bob, scenario.q_bob[c].q, scenario.noise_w);
        out.second(c) = solve_fixed_point(schedule.p_a.col(c), scenario.n_eve, scenario.q_eve[c].q, scenario.noise_w);
    }
    return out;
}

AuxPair solve_aux_block_max(const PowerSchedule &schedule, const DurationVector &tau, const Scenario &scenario)
{
    check_dims(scenario, schedule, tau);
    const int slots = scenario.num_slots();
    AuxPair out{arma::vec(slots), arma::vec(slots)};
    for (int n = 0; n < slots; ++n)
    {
        const auto c = static_cast<arma::uword>(n);
        out.first(c) = solve_fixed_point(schedule.p_a.col(c), scenario.n_bob, scenario.q_bob[c].q, scenario.noise_w);
        out.second(c) = solve_fixed_point(schedule.p_u.col(c), scenario.n_eve, scenario.q_eve[c].q, scenario.noise_w);
    }
    return out;
}

arma::vec gradient_g_wrt_power(const arma::vec &p, int n_antennas, const arma::vec &q, double t, double noise)
{
    if (p.n_elem != q.n_elem || n_antennas < 1 || !(noise > 0.0) || !(t >= 0.0))
        throw InvalidInputError("gradient_g_wrt_power: invalid input");
    // unit-power SNR N / (Q noise e^t); the log2(e) factor multiplies only the numerator
    const arma::vec unit_snr = static_cast<double>(n_antennas) * std::exp(-t) / (q * noise);
    return kLog2e * unit_snr / (1.0 + unit_snr % p);
}

double linearized_g(const arma::vec &p, int n_antennas, const arma::vec &q, double t, double noise,
                    const arma::vec &anchor_p)
{
    if (anchor_p.n_elem != p.n_elem)
        throw InvalidInputError("linearized_g: anchor dimension mismatch");
    return g_term(anchor_p, n_antennas, q, t, noise) +
           arma::dot(gradient_g_wrt_power(anchor_p, n_antennas, q, t, noise), p - anchor_p);
}

double uav_program_objective(const UavPowerProgram &pr, const arma::vec &p_u, const arma::vec &p_a)
{
    double total = 0.0;
    for (arma::uword n = 0; n < pr.weight.n_elem; ++n)
    {
        const double f = kLog2e * std::log1p(pr.alpha(n) * p_u(n)) - pr.gamma(n) * p_u(n) +
                         kLog2e * std::log1p(pr.kappa(n) * p_a(n)) - pr.beta(n) * p_a(n);
        total += pr.weight(n) * f;
    }
    return total;
}

UavPowerSolution solve_uav_power_program(const UavPowerProgram &pr, const arma::vec &fallback_p_u,
                                         const arma::vec &fallback_p_a)
{
    const arma::uword slots = pr.weight.n_elem;
    if (pr.alpha.n_elem != slots || pr.kappa.n_elem != slots || pr.beta.n_elem != slots ||
        pr.gamma.n_elem != slots || fallback_p_u.n_elem != slots || fallback_p_a.n_elem != slots)
        throw InvalidInputError("solve_uav_power_program: dimension mismatch");
    if (!(pr.p_max > 0.0) || !(pr.e_max > 0.0))
        throw InvalidInputError("solve_uav_power_program: budgets must be positive");
    if (arma::any(pr.weight < 0.0) || arma::any(pr.alpha < 0.0) || arma::any(pr.kappa < 0.0) ||
        arma::any(pr.beta < 0.0) || arma::any(pr.gamma < 0.0))
        throw InvalidInputError("solve_uav_power_program: coefficients must be nonnegative");

    UavPowerSolution sol;
    sol.p_u = fallback_p_u;
    sol.p_a = fallback_p_a;

    auto evaluate = [&](double lambda) {
        double energy = 0.0;
        for (arma::uword n = 0; n < slots; ++n)
        {
            if (pr.weight(n) <= 0.0)
                continue;
            const SlotPoint pt = slot_argmax(pr.alpha(n), pr.kappa(n), pr.beta(n), pr.gamma(n) + lambda, pr.p_max);
            sol.p_u(n) = pt.p_u;
            sol.p_a(n) = pt.p_a;
            energy += pr.weight(n) * pt.p_u;
        }
        return energy;
    };

    double lambda = 0.0;
    if (evaluate(0.0) > pr.e_max)
    {
        // at lambda >= log2(e) (alpha + kappa) every slot switches its total power off
        double hi = 0.0;
        for (arma::uword n = 0; n < slots; ++n)
            if (pr.weight(n) > 0.0)
                hi = std::max(hi, kLog2e * (pr.alpha(n) + pr.kappa(n)));
        hi = hi * (1.0 + 1e-12) + 1e-300;
        double lo = 0.0;
        for (int it = 0; it < 2000; ++it)
        {
            const double mid = lo + 0.5 * (hi - lo);
            if (mid <= lo || mid >= hi)
                break;
            if (evaluate(mid) > pr.e_max)
                lo = mid;
            else
                hi = mid;
        }
        lambda = hi;
        evaluate(lambda); // leave the feasible side in sol
    }
    sol.multiplier = lambda;

    // KKT audit: gradient mapping of the Lagrangian with one step size per program, relative to
    // the coefficient scale, plus complementary slackness
    double scale = 0.0;
    for (arma::uword n = 0; n < slots; ++n)
        if (pr.weight(n) > 0.0)
            scale = std::max({scale, kLog2e * pr.alpha(n), kLog2e * pr.kappa(n), pr.beta(n), pr.gamma(n) + lambda});
    double residual = 0.0;
    double energy = 0.0;
    const double step = scale > 0.0 ? 1e-3 * pr.p_max / scale : 0.0;
    for (arma::uword n = 0; n < slots; ++n)
    {
        if (pr.weight(n) <= 0.0)
            continue;
        energy += pr.weight(n) * sol.p_u(n);
        if (step == 0.0)
            continue;
        const double gu = kLog2e * pr.alpha(n) / (1.0 + pr.alpha(n) * sol.p_u(n)) - pr.gamma(n) - lambda;
        const double ga = kLog2e * pr.kappa(n) / (1.0 + pr.kappa(n) * sol.p_a(n)) - pr.beta(n);
        const SlotPoint y = project_triangle(sol.p_u(n) + step * gu, sol.p_a(n) + step * ga, pr.p_max);
        const double moved = std::max(std::abs(y.p_u - sol.p_u(n)), std::abs(y.p_a - sol.p_a(n)));
        residual = std::max(residual, moved / (step * scale));
    }
    if (lambda > 0.0)
        residual = std::max(residual, std::abs(pr.e_max - energy) / pr.e_max);
    sol.kkt_residual = residual;
    return sol;
}

double power_block_objective(const AuxVariables &aux, const DurationVector &tau, const PowerSchedule &schedule,
                             const Scenario &scenario)
{
    return saddle_objective(scenario, schedule, tau, aux);
}

PowerSchedule solve_power_subproblem(const AuxVariables &aux, const DurationVector &tau_prev,
                                     const PowerSchedule &schedule_prev, const Scenario &scenario, double tol,
                                     PowerBlockReport *report)
{
    check_dims(scenario, schedule_prev, tau_prev);
    if (constraint_violation(scenario, schedule_prev, tau_prev) > feasibility_slack(scenario))
        throw InvalidInputError("solve_power_subproblem: anchor schedule is infeasible");

    const int num_uavs = scenario.num_uavs();
    const int slots = scenario.num_slots();
    const double noise = scenario.noise_w;

    // gradients of the two linearised terms, one column per slot
    arma::mat beta(num_uavs, slots);
    arma::mat gamma(num_uavs, slots);
    for (int n = 0; n < slots; ++n)
    {
        const auto c = static_cast<arma::uword>(n);
        beta.col(c) = gradient_g_wrt_power(schedule_prev.p_a.col(c), scenario.n_bob, scenario.q_bob[c].q, aux.t_ba(c),
                                           noise);
        gamma.col(c) = gradient_g_wrt_power(schedule_prev.p_u.col(c), scenario.n_eve, scenario.q_eve[c].q,
                                            aux.t_eu(c), noise);
    }

    PowerSchedule out = schedule_prev;
    double worst = 0.0;
    for (int l = 0; l < num_uavs; ++l)
    {
        const auto r = static_cast<arma::uword>(l);
        UavPowerProgram pr;
        pr.weight = tau_prev;
        pr.alpha.set_size(slots);
        pr.kappa.set_size(slots);
        for (int n = 0; n < slots; ++n)
        {
            const auto c = static_cast<arma::uword>(n);
            pr.alpha(c) = scenario.n_bob * std::exp(-aux.t_bu(c)) / (scenario.q_bob[c].q(r) * noise);
            pr.kappa(c) = scenario.n_eve * std::exp(-aux.t_ea(c)) / (scenario.q_eve[c].q(r) * noise);
        }
        pr.beta = beta.row(r).t();
        pr.gamma = gamma.row(r).t();
        pr.p_max = scenario.budgets.p_max;
        pr.e_max = scenario.budgets.e_max;

        const UavPowerSolution sol =
            solve_uav_power_program(pr, schedule_prev.p_u.row(r).t(), schedule_prev.p_a.row(r).t());
        out.p_u.row(r) = sol.p_u.t();
        out.p_a.row(r) = sol.p_a.t();
        worst = std::max(worst, sol.kkt_residual);
    }

    if (worst > tol)
        throw NumericalFailureError(
            fmt::format("solve_power_subproblem: KKT residual {:.3e} exceeds tolerance {:.3e}", worst, tol));
    if (report != nullptr)
    {
        report->kkt_residual = worst;
        report->sca_rounds = 1;
        report->surrogate_gain = power_block_objective(aux, tau_prev, out, scenario) -
                                 power_block_objective(aux, tau_prev, schedule_prev, scenario);
    }
    return out;
}

PowerSchedule refine_power_sca(const AuxVariables &aux, const DurationVector &tau_prev,
                               const PowerSchedule &schedule_prev, const Scenario &scenario, double tol,
                               int max_rounds, double inner_tol, PowerBlockReport *report)
{
    if (max_rounds < 1)
        throw InvalidInputError("refine_power_sca: need at least one round");
    PowerSchedule current = schedule_prev;
    const double start = power_block_objective(aux, tau_prev, current, scenario);
    double value = start;
    PowerBlockReport round_report;
    double worst_kkt = 0.0;
    int rounds = 0;
    for (int r = 0; r < max_rounds; ++r)
    {
        PowerSchedule next = solve_power_subproblem(aux, tau_prev, current, scenario, tol, &round_report);
        ++rounds;
        worst_kkt = std::max(worst_kkt, round_report.kkt_residual);
        const double next_value = power_block_objective(aux, tau_prev, next, scenario);
        // the surrogate is tight at the anchor, so an exact solve never loses ground; a drop
        // here is round-off and the anchor is kept
        if (next_value < value - 1e-12 * (1.0 + std::abs(value)))
            break;
        const double gain = next_value - value;
        current = std::move(next);
        value = next_value;
        if (gain <= inner_tol * (1.0 + std::abs(value)))
            break;
    }
    if (report != nullptr)
    {
        report->kkt_residual = worst_kkt;
        report->sca_rounds = rounds;
        report->surrogate_gain = value - start;
    }
    return current;
}

arma::vec duration_coefficients(const AuxVariables &aux, const PowerSchedule &schedule, const Scenario &scenario)
{
    arma::vec c(scenario.num_slots());
    for (int n = 0; n < scenario.num_slots(); ++n)
        c(n) = slot_saddle_value(scenario, schedule, aux, n);
    return c;
}

DurationVector solve_duration_lp(const AuxVariables &aux, const PowerSchedule &schedule, const Scenario &scenario,
                                 DurationReport *report)
{
    const auto num_uavs = static_cast<arma::uword>(scenario.num_uavs());
    const auto slots = static_cast<arma::uword>(scenario.num_slots());
    check_dims(scenario, schedule, arma::vec(slots, arma::fill::zeros));
    const auto &b = scenario.budgets;

    const arma::vec c = duration_coefficients(aux, schedule, scenario);

    // rows: per-UAV energy, total time, per-slot cap
    arma::mat a(num_uavs + 1 + slots, slots, arma::fill::zeros);
    arma::vec rhs(num_uavs + 1 + slots);
    a.rows(0, num_uavs - 1) = schedule.p_u;
    rhs.subvec(0, num_uavs - 1).fill(b.e_max);
    a.row(num_uavs).ones();
    rhs(num_uavs) = b.t_total;
    a.rows(num_uavs + 1, num_uavs + slots) = arma::eye(slots, slots);
    rhs.subvec(num_uavs + 1, num_uavs + slots).fill(b.tau_max);

    const LpResult lp = maximize_lp(c, a, rhs);
    if (lp.status != LpStatus::Optimal)
        throw NumericalFailureError(fmt::format("solve_duration_lp: simplex ended with status {} after {} pivots",
                                                to_string(lp.status), lp.pivots));

    // snap round-off back inside the polytope
    arma::vec tau = arma::clamp(lp.x, 0.0, b.tau_max);
    double shrink = 1.0;
    const double total = arma::accu(tau);
    if (total > b.t_total)
        shrink = std::min(shrink, b.t_total / total);
    const arma::vec energy = schedule.p_u * tau;
    for (arma::uword l = 0; l < num_uavs; ++l)
        if (energy(l) > b.e_max)
            shrink = std::min(shrink, b.e_max / energy(l));
    if (shrink < 1.0)
        tau *= shrink;

    if (report != nullptr)
    {
        report->status = lp.status;
        report->pivots = lp.pivots;
        report->objective = arma::dot(c, tau);
    }
    return tau;
}

SolutionTrace run_bcd(const Scenario &scenario, const PowerSchedule &init_schedule, const DurationVector &init_tau,
                      const BcdOptions &options)
{
    scenario.validate();
    if (!(options.epsilon > 0.0) || options.max_iter < 1)
        throw InvalidInputError("run_bcd: epsilon must be positive and max_iter at least 1");
    check_dims(scenario, init_schedule, init_tau);
    if (constraint_violation(scenario, init_schedule, init_tau) > feasibility_slack(scenario))
        throw InvalidInputError("run_bcd: initial point is infeasible");

    SolutionTrace trace;
    PowerSchedule schedule = init_schedule;
    DurationVector tau = init_tau;
    double previous = secrecy_throughput_closed_form(scenario, schedule, tau).r_as;
    trace.initial_r_as = previous;

    for (int m = 1; m <= options.max_iter; ++m)
    {
        IterationRecord rec;
        rec.iteration = m;

        const AuxPair lower = solve_aux_block_min(schedule, tau, scenario);
        const AuxPair upper = solve_aux_block_max(schedule, tau, scenario);
        rec.aux = AuxVariables{lower.first, upper.first, upper.second, lower.second};

        PowerBlockReport power_report;
        schedule = refine_power_sca(rec.aux, tau, schedule, scenario, options.power_tol, options.sca_max_rounds,
                                    options.sca_inner_tol, &power_report);
        rec.power_kkt_residual = power_report.kkt_residual;
        rec.sca_rounds = power_report.sca_rounds;

        DurationReport lp_report;
        tau = solve_duration_lp(rec.aux, schedule, scenario, &lp_report);
        rec.lp_status = lp_report.status;
        rec.lp_pivots = lp_report.pivots;

        const ClosedFormResult cf = secrecy_throughput_closed_form(scenario, schedule, tau);
        rec.r_as = cf.r_as;
        rec.r_as_clipped = arma::dot(tau, arma::clamp(cf.per_slot, 0.0, arma::datum::inf)) / scenario.budgets.t_period;
        rec.schedule = schedule;
        rec.tau = tau;
        rec.monotone = cf.r_as >= previous - options.monotone_tol * (1.0 + std::abs(previous));
        if (!rec.monotone)
            ++trace.non_monotone_steps;
        trace.iterations.push_back(rec);

        const double increase = (cf.r_as - previous) / std::max(previous, options.objective_floor);
        previous = cf.r_as;
        if (increase < options.epsilon)
        {
            trace.converged = true;
            break;
        }
    }
    return trace;
}

} // namespace uavsec
