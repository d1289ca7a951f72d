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

#include "oracles.hpp"
#include "uavsec/channel.hpp"
#include "uavsec/config.hpp"
#include "uavsec/errors.hpp"
#include "uavsec/experiment.hpp"
#include "uavsec/optimizer.hpp"
#include "uavsec/rates.hpp"
#include "uavsec/topology.hpp"

#include <cmath>
#include <random>

using namespace uavsec;
using Catch::Approx;

namespace
{

const double kNoise = dbm_to_watt(-107.0);

Scenario random_losses(std::mt19937_64 &rng, int num_uavs, int slots, const Budgets &b, int nb = 5, int ne = 3)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<arma::vec> qb;
    std::vector<arma::vec> qe;
    for (int n = 0; n < slots; ++n)
    {
        arma::vec vb(num_uavs);
        arma::vec ve(num_uavs);
        for (int l = 0; l < num_uavs; ++l)
        {
            vb(l) = std::pow(10.0, 8.0 + 1.5 * u(rng));
            ve(l) = std::pow(10.0, 8.0 + 1.5 * u(rng));
        }
        qb.push_back(vb);
        qe.push_back(ve);
    }
    return Scenario::from_losses(qb, qe, nb, ne, b, kNoise);
}

PowerSchedule random_schedule(std::mt19937_64 &rng, int num_uavs, int slots, double p_max)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PowerSchedule s{arma::mat(num_uavs, slots), arma::mat(num_uavs, slots)};
    for (int l = 0; l < num_uavs; ++l)
        for (int n = 0; n < slots; ++n)
        {
            s.p_u(l, n) = p_max * u(rng);
            s.p_a(l, n) = s.p_u(l, n) * u(rng);
        }
    return s;
}

AuxVariables aux_at(const Scenario &sc, const PowerSchedule &s)
{
    const arma::vec tau(static_cast<arma::uword>(sc.num_slots()), arma::fill::ones);
    const AuxPair lo = solve_aux_block_min(s, tau, sc);
    const AuxPair hi = solve_aux_block_max(s, tau, sc);
    return {lo.first, hi.first, hi.second, lo.second};
}

// d g / d p_l written out from the definition of g.
double oracle_gradient(double p, int n, double q, double t, double noise)
{
    const double snr_unit = n / (q * noise * std::exp(t));
    return oracle::kLog2e * snr_unit / (1.0 + snr_unit * p);
}

// Power-block surrogate evaluated term by term.
double oracle_surrogate(const Scenario &sc, const AuxVariables &aux, const arma::vec &tau, const PowerSchedule &anchor,
                        const PowerSchedule &s)
{
    double total = 0.0;
    for (int n = 0; n < sc.num_slots(); ++n)
    {
        const auto c = static_cast<arma::uword>(n);
        const arma::vec &qb = sc.q_bob[c].q;
        const arma::vec &qe = sc.q_eve[c].q;
        double lin_a = g_term(anchor.p_a.col(c), sc.n_bob, qb, aux.t_ba(c), kNoise);
        double lin_u = g_term(anchor.p_u.col(c), sc.n_eve, qe, aux.t_eu(c), kNoise);
        for (int l = 0; l < sc.num_uavs(); ++l)
        {
            const auto r = static_cast<arma::uword>(l);
            lin_a += oracle_gradient(anchor.p_a(r, c), sc.n_bob, qb(r), aux.t_ba(c), kNoise) *
                     (s.p_a(r, c) - anchor.p_a(r, c));
            lin_u += oracle_gradient(anchor.p_u(r, c), sc.n_eve, qe(r), aux.t_eu(c), kNoise) *
                     (s.p_u(r, c) - anchor.p_u(r, c));
        }
        total += tau(c) * (g_term(s.p_u.col(c), sc.n_bob, qb, aux.t_bu(c), kNoise) - lin_a - lin_u +
                           g_term(s.p_a.col(c), sc.n_eve, qe, aux.t_ea(c), kNoise));
    }
    return total;
}

ScenarioConfig suburban_defaults()
{
    return parse_config("{}");
}

} // namespace

TEST_CASE("aux blocks - zero power gives zero")
{
    std::mt19937_64 rng(1);
    const Scenario sc = random_losses(rng, 4, 3, Budgets{});
    const PowerSchedule zero = PowerSchedule::uniform(4, 3, 0.0, 0.0);
    const arma::vec tau(3, arma::fill::ones);
    const AuxPair lo = solve_aux_block_min(zero, tau, sc);
    const AuxPair hi = solve_aux_block_max(zero, tau, sc);
    CHECK(arma::all(lo.first == 0.0));
    CHECK(arma::all(lo.second == 0.0));
    CHECK(arma::all(hi.first == 0.0));
    CHECK(arma::all(hi.second == 0.0));
}

TEST_CASE("aux blocks - fixed-point residuals and oracle agreement")
{
    std::mt19937_64 rng(2);
    const Scenario sc = random_losses(rng, 6, 5, Budgets{});
    const PowerSchedule s = random_schedule(rng, 6, 5, 1.0);
    const arma::vec tau{0.0, 1.0, 2.0, 0.0, 8.0};
    const AuxPair lo = solve_aux_block_min(s, tau, sc);
    const AuxPair hi = solve_aux_block_max(s, tau, sc);
    for (arma::uword n = 0; n < 5; ++n)
    {
        const arma::vec &qb = sc.q_bob[n].q;
        const arma::vec &qe = sc.q_eve[n].q;
        CHECK(std::abs(fixed_point_residual(s.p_u.col(n), 5, qb, lo.first(n), kNoise)) <= 1e-12);
        CHECK(std::abs(fixed_point_residual(s.p_a.col(n), 3, qe, lo.second(n), kNoise)) <= 1e-12);
        CHECK(std::abs(fixed_point_residual(s.p_a.col(n), 5, qb, hi.first(n), kNoise)) <= 1e-12);
        CHECK(std::abs(fixed_point_residual(s.p_u.col(n), 3, qe, hi.second(n), kNoise)) <= 1e-12);
        CHECK(lo.first(n) == Approx(oracle::fixed_point_t(s.p_u.col(n), 5, qb, kNoise)).epsilon(1e-9));
        CHECK(hi.second(n) == Approx(oracle::fixed_point_t(s.p_u.col(n), 3, qe, kNoise)).epsilon(1e-9));
    }
}

TEST_CASE("aux blocks - swapping identical receivers swaps the blocks")
{
    std::mt19937_64 rng(3);
    const Scenario base = random_losses(rng, 5, 4, Budgets{}, 4, 4);
    std::vector<arma::vec> q;
    for (const auto &lv : base.q_bob)
        q.push_back(lv.q);
    const Scenario sc = Scenario::from_losses(q, q, 4, 4, Budgets{}, kNoise);
    const PowerSchedule s = random_schedule(rng, 5, 4, 1.0);
    const arma::vec tau(4, arma::fill::ones);
    const AuxPair lo = solve_aux_block_min(s, tau, sc);
    const AuxPair hi = solve_aux_block_max(s, tau, sc);
    CHECK(arma::approx_equal(hi.first, lo.second, "absdiff", 0.0));
    CHECK(arma::approx_equal(hi.second, lo.first, "absdiff", 0.0));
}

TEST_CASE("gradient_g_wrt_power - value at zero power")
{
    const arma::vec q{1e9, 3e9, 2e8};
    const arma::vec grad = gradient_g_wrt_power(arma::zeros(3), 5, q, 0.7, kNoise);
    const double phi = 5.0 * oracle::kLog2e / (kNoise * std::exp(0.7));
    for (arma::uword l = 0; l < 3; ++l)
        CHECK(grad(l) == Approx(phi / q(l)).epsilon(1e-14));
}

TEST_CASE("gradient_g_wrt_power - centered finite differences")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i)
    {
        const int num_uavs = 1 + i % 7;
        const int n = 1 + i % 5;
        arma::vec p(num_uavs);
        arma::vec q(num_uavs);
        for (int l = 0; l < num_uavs; ++l)
        {
            p(l) = std::pow(10.0, -3.0 + 3.0 * u(rng));
            q(l) = std::pow(10.0, 8.0 + 2.0 * u(rng));
        }
        const double t = solve_fixed_point(p, n, q, kNoise) * (0.5 + u(rng));
        const arma::vec grad = gradient_g_wrt_power(p, n, q, t, kNoise);
        for (int l = 0; l < num_uavs; ++l)
        {
            const double h = 1e-5 * p(l);
            arma::vec up = p;
            arma::vec dn = p;
            up(l) += h;
            dn(l) -= h;
            const double fd = (g_term(up, n, q, t, kNoise) - g_term(dn, n, q, t, kNoise)) / (2.0 * h);
            worst = std::max(worst, std::abs(grad(l) - fd) / std::abs(fd));
            CHECK(grad(l) == Approx(oracle_gradient(p(l), n, q(l), t, kNoise)).epsilon(1e-13));
        }
    }
    INFO("worst relative error " << worst);
    CHECK(worst <= 1e-6);
}

TEST_CASE("gradient_g_wrt_power - decreasing in its own power")
{
    const arma::vec q{1e9};
    double previous = std::numeric_limits<double>::infinity();
    for (double p = 0.0; p <= 1.0; p += 0.05)
    {
        const double g = gradient_g_wrt_power(arma::vec{p}, 3, q, 2.0, kNoise)(0);
        CHECK(g < previous);
        previous = g;
    }
}

TEST_CASE("linearized_g - tangent upper bound")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i)
    {
        arma::vec anchor(4);
        arma::vec p(4);
        arma::vec q(4);
        for (int l = 0; l < 4; ++l)
        {
            anchor(l) = u(rng);
            p(l) = u(rng);
            q(l) = std::pow(10.0, 8.0 + 2.0 * u(rng));
        }
        const double t = 3.0 * u(rng);
        CHECK(linearized_g(anchor, 5, q, t, kNoise, anchor) == g_term(anchor, 5, q, t, kNoise));
        const double g = g_term(p, 5, q, t, kNoise);
        CHECK(linearized_g(p, 5, q, t, kNoise, anchor) >= g - 1e-12 * std::abs(g));
    }
    const arma::vec q{1e9, 2e9};
    const arma::vec p{0.3, 0.6};
    const double phi = 3.0 * oracle::kLog2e / (kNoise * std::exp(1.5));
    CHECK(linearized_g(p, 3, q, 1.5, kNoise, arma::zeros(2)) ==
          Approx(g_term(arma::zeros(2), 3, q, 1.5, kNoise) + phi * (0.3 / 1e9 + 0.6 / 2e9)));
}

TEST_CASE("solve_uav_power_program - no eavesdropper terms saturates the budget")
{
    for (double e_max : {0.5, 3.0, 100.0})
    {
        UavPowerProgram pr;
        pr.weight = arma::vec{2.0};
        pr.alpha = arma::vec{50.0};
        pr.kappa = arma::vec{0.0};
        pr.beta = arma::vec{0.0};
        pr.gamma = arma::vec{0.0};
        pr.p_max = 1.0;
        pr.e_max = e_max;
        const UavPowerSolution sol = solve_uav_power_program(pr, arma::vec{0.2}, arma::vec{0.1});
        CHECK(sol.p_u(0) == Approx(std::min(1.0, e_max / 2.0)).epsilon(1e-9));
        CHECK(sol.p_a(0) == 0.0);
        CHECK(sol.kkt_residual <= 1e-9);
    }
}

TEST_CASE("solve_uav_power_program - zero weight slots keep their fallback powers")
{
    UavPowerProgram pr;
    pr.weight = arma::vec{0.0, 1.0};
    pr.alpha = arma::vec{10.0, 10.0};
    pr.kappa = arma::vec{5.0, 5.0};
    pr.beta = arma::vec{1.0, 1.0};
    pr.gamma = arma::vec{1.0, 1.0};
    pr.p_max = 1.0;
    pr.e_max = 10.0;
    const UavPowerSolution sol = solve_uav_power_program(pr, arma::vec{0.7, 0.1}, arma::vec{0.3, 0.1});
    CHECK(sol.p_u(0) == 0.7);
    CHECK(sol.p_a(0) == 0.3);
}

TEST_CASE("solve_power_subproblem - matches exhaustive grid search on one UAV and two slots")
{
    std::mt19937_64 rng(6);
    const double step = 0.05;
    int checked = 0;
    for (int trial = 0; trial < 30; ++trial)
    {
        Budgets b;
        b.p_max = 1.0;
        b.e_max = trial % 2 == 0 ? 2.0 : 100.0; // binding and slack energy rows
        // weaker links than the defaults so interior optima are common
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<arma::vec> qb{arma::vec{std::pow(10.0, 11.5 + u(rng))}, arma::vec{std::pow(10.0, 11.5 + u(rng))}};
        std::vector<arma::vec> qe{arma::vec{std::pow(10.0, 11.0 + 1.5 * u(rng))},
                                  arma::vec{std::pow(10.0, 11.0 + 1.5 * u(rng))}};
        const Scenario sc = Scenario::from_losses(qb, qe, 5, 3, b, kNoise);
        const arma::vec tau{1.0 + 2.0 * u(rng), 1.0 + 2.0 * u(rng)};
        PowerSchedule anchor = random_schedule(rng, 1, 2, 0.5);
        const AuxVariables aux = aux_at(sc, anchor);

        PowerBlockReport rep;
        const PowerSchedule sol = solve_power_subproblem(aux, tau, anchor, sc, 1e-6, &rep);
        CHECK(rep.kkt_residual <= 1e-6);
        CHECK(constraint_violation(sc, sol, tau) <= 1e-12);
        const double got = oracle_surrogate(sc, aux, tau, anchor, sol);
        CHECK(got >= oracle_surrogate(sc, aux, tau, anchor, anchor) - 1e-12 * std::abs(got));

        // grid over 0 <= p_a <= p_u <= P_max in both slots with the energy row
        double best = -std::numeric_limits<double>::infinity();
        PowerSchedule best_s = anchor;
        PowerSchedule s = anchor;
        const int k = static_cast<int>(std::lround(b.p_max / step));
        for (int u0 = 0; u0 <= k; ++u0)
            for (int a0 = 0; a0 <= u0; ++a0)
                for (int u1 = 0; u1 <= k; ++u1)
                {
                    if (tau(0) * u0 * step + tau(1) * u1 * step > b.e_max + 1e-12)
                        break;
                    for (int a1 = 0; a1 <= u1; ++a1)
                    {
                        s.p_u(0, 0) = u0 * step;
                        s.p_a(0, 0) = a0 * step;
                        s.p_u(0, 1) = u1 * step;
                        s.p_a(0, 1) = a1 * step;
                        const double v = oracle_surrogate(sc, aux, tau, anchor, s);
                        if (v > best)
                        {
                            best = v;
                            best_s = s;
                        }
                    }
                }
        INFO("trial " << trial << " solver " << got << " grid " << best);
        CHECK(got >= best - 1e-9 * std::abs(best));
        CHECK(arma::abs(sol.p_u - best_s.p_u).max() <= step + 1e-9);
        CHECK(arma::abs(sol.p_a - best_s.p_a).max() <= step + 1e-9);
        ++checked;
    }
    CHECK(checked == 30);
}

TEST_CASE("solve_power_subproblem - separates across UAVs")
{
    std::mt19937_64 rng(7);
    Budgets b;
    b.e_max = 3.0;
    const Scenario joint = random_losses(rng, 3, 4, b);
    const PowerSchedule anchor = random_schedule(rng, 3, 4, 0.5);
    const arma::vec tau{1.0, 2.0, 0.5, 1.5};
    const AuxVariables aux = aux_at(joint, anchor);
    const PowerSchedule all = solve_power_subproblem(aux, tau, anchor, joint, 1e-6);
    for (int l = 0; l < 3; ++l)
    {
        const auto r = static_cast<arma::uword>(l);
        std::vector<arma::vec> qb;
        std::vector<arma::vec> qe;
        for (int n = 0; n < 4; ++n)
        {
            qb.push_back(arma::vec{joint.q_bob[static_cast<std::size_t>(n)].q(r)});
            qe.push_back(arma::vec{joint.q_eve[static_cast<std::size_t>(n)].q(r)});
        }
        const Scenario single = Scenario::from_losses(qb, qe, 5, 3, b, kNoise);
        const PowerSchedule a1{anchor.p_u.row(r), anchor.p_a.row(r)};
        const PowerSchedule one = solve_power_subproblem(aux, tau, a1, single, 1e-6);
        CHECK(arma::approx_equal(one.p_u, all.p_u.row(r), "absdiff", 1e-12));
        CHECK(arma::approx_equal(one.p_a, all.p_a.row(r), "absdiff", 1e-12));
    }
}

TEST_CASE("solve_power_subproblem - infeasible anchor is rejected")
{
    std::mt19937_64 rng(8);
    const Scenario sc = random_losses(rng, 2, 2, Budgets{});
    PowerSchedule bad = PowerSchedule::uniform(2, 2, 0.5, 0.1);
    bad.p_u(1, 1) = 2.0; // above P_max
    const AuxVariables aux = aux_at(sc, PowerSchedule::uniform(2, 2, 0.5, 0.1));
    CHECK_THROWS_AS(solve_power_subproblem(aux, arma::vec{1.0, 1.0}, bad, sc, 1e-6), InvalidInputError);
}

TEST_CASE("solve_duration_lp - single slot")
{
    std::mt19937_64 rng(9);
    Budgets b;
    b.e_max = 5.0;
    // Bob's links far stronger than Eve's, so the slot coefficient is positive
    std::vector<arma::vec> qb{arma::vec{1e8, 2e8}};
    std::vector<arma::vec> qe{arma::vec{1e11, 3e11}};
    const Scenario sc = Scenario::from_losses(qb, qe, 5, 3, b, kNoise);
    PowerSchedule s{arma::mat(arma::vec{0.9, 0.4}), arma::mat(arma::vec{0.1, 0.1})};
    const AuxVariables aux = aux_at(sc, s);
    REQUIRE(duration_coefficients(aux, s, sc)(0) > 0.0);
    const arma::vec tau = solve_duration_lp(aux, s, sc);
    CHECK(tau(0) == Approx(std::min({b.tau_max, b.t_total, b.e_max / 0.9, b.e_max / 0.4})));

    // equal powers cancel every term of the coefficient
    const PowerSchedule flat{arma::mat(arma::vec{0.5, 0.5}), arma::mat(arma::vec{0.5, 0.5})};
    CHECK(solve_duration_lp(aux_at(sc, flat), flat, sc)(0) == 0.0);

    // Eve far better placed than Bob: negative coefficient
    const Scenario rev = Scenario::from_losses(qe, qb, 5, 3, b, kNoise);
    const AuxVariables aux_rev = aux_at(rev, s);
    REQUIRE(duration_coefficients(aux_rev, s, rev)(0) < 0.0);
    CHECK(solve_duration_lp(aux_rev, s, rev)(0) == 0.0);
}

TEST_CASE("solve_duration_lp - matches vertex enumeration on three slots and two UAVs")
{
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial)
    {
        Budgets b;
        b.e_max = 1.0 + 15.0 * u(rng);
        b.t_total = 5.0 + 20.0 * u(rng);
        b.tau_max = std::min(8.0, b.t_total);
        const Scenario sc = random_losses(rng, 2, 3, b);
        const PowerSchedule s = random_schedule(rng, 2, 3, 1.0);
        const AuxVariables aux = aux_at(sc, s);
        const arma::vec c = duration_coefficients(aux, s, sc);

        arma::mat a = arma::join_cols(s.p_u, arma::ones(1, 3));
        a = arma::join_cols(a, arma::eye(3, 3));
        arma::vec rhs{b.e_max, b.e_max, b.t_total, b.tau_max, b.tau_max, b.tau_max};
        const double best = oracle::lp_by_vertices(c, a, rhs);

        const arma::vec tau = solve_duration_lp(aux, s, sc);
        CHECK(arma::dot(c, tau) == Approx(best).epsilon(1e-10).margin(1e-12));
        CHECK(constraint_violation(sc, s, tau) <= 1e-9);
        // vertex property: when every slot pays off, some budget row is active
        if (arma::all(c > 0.0))
        {
            const bool active = std::abs(arma::accu(tau) - b.t_total) < 1e-9 ||
                                arma::any(arma::abs(s.p_u * tau - b.e_max) < 1e-9) ||
                                arma::any(arma::abs(tau - b.tau_max) < 1e-9);
            CHECK(active);
        }
    }
}

TEST_CASE("run_bcd - a huge epsilon stops after one iteration")
{
    const ScenarioConfig cfg = suburban_defaults();
    const Scenario sc = generate_topology(cfg, 5);
    const PowerSchedule s0 = initial_schedule(cfg, sc);
    BcdOptions o = cfg.bcd_options();
    o.epsilon = 1e9; // the first step can multiply a small starting objective many times over
    const SolutionTrace tr = run_bcd(sc, s0, initial_durations(cfg, sc, s0), o);
    CHECK(tr.iteration_count() == 1);
    CHECK(tr.converged);
}

TEST_CASE("run_bcd - monotone, feasible and convergent on random suburban topologies")
{
    ScenarioConfig cfg = suburban_defaults();
    for (int rounds : {1, 50})
    {
        cfg.sca_max_rounds = rounds;
        for (std::uint64_t seed = 100; seed < 110; ++seed)
        {
            const Scenario sc = generate_topology(cfg, seed);
            const PowerSchedule s0 = initial_schedule(cfg, sc);
            const arma::vec t0 = initial_durations(cfg, sc, s0);
            const SolutionTrace tr = run_bcd(sc, s0, t0, cfg.bcd_options());
            REQUIRE(tr.iteration_count() >= 1);
            CHECK(tr.non_monotone_steps == 0);
            double previous = tr.initial_r_as;
            for (const auto &rec : tr.iterations)
            {
                CHECK(rec.r_as >= previous - 1e-8 * (1.0 + std::abs(previous)));
                CHECK(rec.monotone);
                CHECK(constraint_violation(sc, rec.schedule, rec.tau) <= 1e-9);
                CHECK(rec.r_as_clipped >= rec.r_as - 1e-12);
                previous = rec.r_as;
            }
            CHECK(tr.converged);
            CHECK(tr.final_iterate().r_as > tr.initial_r_as);
        }
    }
}

TEST_CASE("run_bcd - infeasible start and bad options are rejected")
{
    const ScenarioConfig cfg = suburban_defaults();
    const Scenario sc = generate_topology(cfg, 5);
    const PowerSchedule s0 = initial_schedule(cfg, sc);
    arma::vec t0 = initial_durations(cfg, sc, s0);
    BcdOptions o = cfg.bcd_options();
    arma::vec long_tau = t0;
    long_tau(0) = 20.0; // above tau_max
    CHECK_THROWS_AS(run_bcd(sc, s0, long_tau, o), InvalidInputError);
    o.epsilon = 0.0;
    CHECK_THROWS_AS(run_bcd(sc, s0, t0, o), InvalidInputError);
}
