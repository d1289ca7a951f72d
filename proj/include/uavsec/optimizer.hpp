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

#ifndef UAVSEC_OPTIMIZER_HPP
#define UAVSEC_OPTIMIZER_HPP

#include "uavsec/lp.hpp"
#include "uavsec/rates.hpp"
#include "uavsec/scenario.hpp"

#include <armadillo>
#include <string>
#include <vector>

namespace uavsec
{

struct AuxPair
{
    arma::vec first;
    arma::vec second;
};

// Block 1: (t_bu, t_ea), the auxiliaries of the terms entering G with a plus sign.
AuxPair solve_aux_block_min(const PowerSchedule &schedule, const DurationVector &tau, const Scenario &scenario);

// Block 2: (t_ba, t_eu). These enter G with a minus sign, so maximising G over them is the
// termwise minimisation of the g terms, i.e. the same scalar fixed point.
AuxPair solve_aux_block_max(const PowerSchedule &schedule, const DurationVector &tau, const Scenario &scenario);

// Gradient of g with respect to the diagonal power vector.
arma::vec gradient_g_wrt_power(const arma::vec &p, int n_antennas, const arma::vec &q, double t, double noise);

// First-order expansion of g around anchor_p. Concavity makes it an upper bound on g.
double linearized_g(const arma::vec &p, int n_antennas, const arma::vec &q, double t, double noise,
                    const arma::vec &anchor_p);

// Coefficients of the power program of one UAV. Slot n contributes
//   weight[n] * ( log2(1 + alpha[n] p_u) - gamma[n] p_u + log2(1 + kappa[n] p_a) - beta[n] p_a )
// over 0 <= p_a <= p_u <= p_max with the energy row sum_n weight[n] p_u[n] <= e_max.
struct UavPowerProgram
{
    arma::vec weight; // tau_prev
    arma::vec alpha;  // N_B / (Q_B noise e^{t_bu})
    arma::vec kappa;  // N_E / (Q_E noise e^{t_ea})
    arma::vec beta;   // gradient of g(p_a, B) at the anchor
    arma::vec gamma;  // gradient of g(p_u, E) at the anchor
    double p_max = 1.0;
    double e_max = 1.0;
};

struct UavPowerSolution
{
    arma::vec p_u;
    arma::vec p_a;
    double multiplier = 0.0;   // energy-row multiplier
    double kkt_residual = 0.0; // normalised projected-gradient residual plus complementary slackness
};

// Exact solution of one UAV program by dual bisection on the energy multiplier. For a fixed
// multiplier every slot is a 2-variable concave problem with a closed-form maximiser. Slots
// with zero weight keep the powers given in `fallback_p_u` / `fallback_p_a`.
UavPowerSolution solve_uav_power_program(const UavPowerProgram &program, const arma::vec &fallback_p_u,
                                         const arma::vec &fallback_p_a);

double uav_program_objective(const UavPowerProgram &program, const arma::vec &p_u, const arma::vec &p_a);

struct PowerBlockReport
{
    double kkt_residual = 0.0;
    int sca_rounds = 0;
    double surrogate_gain = 0.0; // increase of the block objective over the anchor
};

// The convex power program obtained by linearising the two negative g terms at
// `schedule_prev`. Decomposes over UAVs. Throws InvalidInputError on an infeasible anchor and
// NumericalFailureError when the KKT residual exceeds `tol`.
PowerSchedule solve_power_subproblem(const AuxVariables &aux, const DurationVector &tau_prev,
                                     const PowerSchedule &schedule_prev, const Scenario &scenario, double tol,
                                     PowerBlockReport *report = nullptr);

// Objective of the power block with every g term exact, auxiliaries fixed.
double power_block_objective(const AuxVariables &aux, const DurationVector &tau, const PowerSchedule &schedule,
                             const Scenario &scenario);

// Repeats solve_power_subproblem, re-anchoring at each result, until the exact block objective
// stops improving by more than inner_tol (relative) or max_rounds is hit. max_rounds = 1 is a
// single linearisation.
PowerSchedule refine_power_sca(const AuxVariables &aux, const DurationVector &tau_prev,
                               const PowerSchedule &schedule_prev, const Scenario &scenario, double tol,
                               int max_rounds, double inner_tol, PowerBlockReport *report = nullptr);

// Per-slot coefficient of the duration LP for the given auxiliaries.
arma::vec duration_coefficients(const AuxVariables &aux, const PowerSchedule &schedule, const Scenario &scenario);

struct DurationReport
{
    LpStatus status = LpStatus::Optimal;
    int pivots = 0;
    double objective = 0.0;
};

// Exact LP over tau: energy rows, sum(tau) <= T_t and 0 <= tau_n <= tau_max.
DurationVector solve_duration_lp(const AuxVariables &aux, const PowerSchedule &schedule, const Scenario &scenario,
                                 DurationReport *report = nullptr);

struct BcdOptions
{
    double epsilon = 1e-3;          // stop when the fractional increase falls below this
    int max_iter = 50;
    double objective_floor = 1e-12; // denominator floor of the fractional increase
    int sca_max_rounds = 50;        // linearisation rounds inside the power block
    double sca_inner_tol = 1e-9;
    double power_tol = 1e-6;        // KKT residual accepted from the power block
    double monotone_tol = 1e-8;     // relative slack before a decrease is flagged
};

struct IterationRecord
{
    int iteration = 0;
    double r_as = 0.0;         // unclipped closed-form throughput
    double r_as_clipped = 0.0; // same, per-slot values clipped at zero
    PowerSchedule schedule;
    DurationVector tau;
    AuxVariables aux;          // auxiliaries used during this iteration
    double power_kkt_residual = 0.0;
    int sca_rounds = 0;
    LpStatus lp_status = LpStatus::Optimal;
    int lp_pivots = 0;
    bool monotone = true;
};

struct SolutionTrace
{
    double initial_r_as = 0.0;
    std::vector<IterationRecord> iterations;
    bool converged = false;
    int non_monotone_steps = 0;

    const IterationRecord &final_iterate() const { return iterations.back(); }
    int iteration_count() const { return static_cast<int>(iterations.size()); }
};

// Block coordinate ascent: auxiliaries (two blocks), powers, durations, repeated until the
// fractional objective increase drops below epsilon or max_iter is reached.
SolutionTrace run_bcd(const Scenario &scenario, const PowerSchedule &init_schedule, const DurationVector &init_tau,
                      const BcdOptions &options = {});

} // namespace uavsec

#endif
