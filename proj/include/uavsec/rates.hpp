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

#ifndef UAVSEC_RATES_HPP
#define UAVSEC_RATES_HPP

#include "uavsec/channel.hpp"
#include "uavsec/scenario.hpp"

#include <armadillo>
#include <cstdint>

namespace uavsec
{

// Log of the fixed-point parameters of the four deterministic-equivalent terms, per slot.
struct AuxVariables
{
    arma::vec t_bu; // Bob, total power
    arma::vec t_ba; // Bob, AN power
    arma::vec t_eu; // Eve, total power
    arma::vec t_ea; // Eve, AN power
};

struct RateEstimate
{
    double mean = 0.0;      // bits/s/Hz
    double std_error = 0.0; // bits/s/Hz
    std::size_t samples = 0;
};

// g(p, N, Q, t) = sum_l log2(1 + N p_l / (Q_l noise e^t)) + N log2(e) (t - 1 + e^-t).
//
// Minimising over t >= 0 gives the deterministic equivalent of
// E[log2 det(I + H diag(p) H^H / noise)] for H = S diag(Q^{-1/2}).
double g_term(const arma::vec &p, int n_antennas, const arma::vec &q, double t, double noise);

// s(t) = sum_l x_l e^-t / (noise + N x_l e^-t) - 1 + e^-t with x_l = p_l / Q_l.
// dg/dt = -N log2(e) s(t), so s has a single sign change at the minimiser of g.
double fixed_point_residual(const arma::vec &p, int n_antennas, const arma::vec &q, double t, double noise);

// Unique root t* >= 0 of s(t), found by bracketed bisection. w* = e^t* solves
// w = 1 + sum_l x_l / (noise + N x_l / w).
double solve_fixed_point(const arma::vec &p, int n_antennas, const arma::vec &q, double noise);

// min over t of g, i.e. the deterministic equivalent of one ergodic log-det term.
double deterministic_equivalent(const arma::vec &p, int n_antennas, const arma::vec &q, double noise);

struct ClosedFormResult
{
    double r_as = 0.0;  // (1/T_U) sum_n tau_n per_slot(n)
    AuxVariables aux;
    arma::vec per_slot; // R_B[n] - R_E[n] in bits/s/Hz, unclipped
};

// Closed-form (deterministic-equivalent) secrecy throughput of a schedule.
ClosedFormResult secrecy_throughput_closed_form(const Scenario &scenario, const PowerSchedule &schedule,
                                                const DurationVector &tau);

// Objective G for given auxiliaries, without re-solving the fixed points.
double saddle_objective(const Scenario &scenario, const PowerSchedule &schedule, const DurationVector &tau,
                        const AuxVariables &aux);

// Per-slot bracket of G: g(p_u,B) - g(p_a,B) - g(p_u,E) + g(p_a,E) at slot n.
double slot_saddle_value(const Scenario &scenario, const PowerSchedule &schedule, const AuxVariables &aux, int slot);

// Instantaneous rate log2 det(I + H P_num H^H (H P_den H^H + noise I)^{-1}).
double instantaneous_rate(const arma::cx_mat &h, const arma::vec &p_num, const arma::vec &p_den, double noise);

// log2 det(I + H K H^H / noise) for a Hermitian PSD transmit covariance K.
double log2det_covariance(const arma::cx_mat &h, const arma::cx_mat &k, double noise);

// Monte Carlo estimate of the ergodic rate over i.i.d. Rayleigh fading. Sample k uses the
// substream (key.seed, key.slot, k, key.tag) so compared configurations share draws.
RateEstimate ergodic_rate_mc(const LossVector &q, const arma::vec &p_num, const arma::vec &p_den, double noise,
                             int n_antennas, std::size_t samples, const StreamKey &key);

// Monte Carlo secrecy throughput (1/T_U) sum_n tau_n f(R_B[n] - R_E[n]) with f = max(0, .)
// when clip is set. Fading draws are keyed by (seed, slot, sample).
RateEstimate secrecy_throughput_mc(const Scenario &scenario, const PowerSchedule &schedule, const DurationVector &tau,
                                   std::size_t samples, std::uint64_t seed, bool clip);

// Per-slot Monte Carlo secrecy rates R_B[n] - R_E[n] (unclipped) with standard errors.
std::vector<RateEstimate> secrecy_rate_mc_per_slot(const Scenario &scenario, const PowerSchedule &schedule,
                                                   std::size_t samples, std::uint64_t seed);

} // namespace uavsec

#endif
