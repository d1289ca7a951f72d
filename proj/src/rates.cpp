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

#include "uavsec/rates.hpp"

#include "uavsec/errors.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace uavsec
{

namespace
{

constexpr double kLog2e = std::numbers::log2e;

void check_term_inputs(const arma::vec &p, int n_antennas, const arma::vec &q, double noise)
{
    if (p.n_elem != q.n_elem || p.n_elem == 0)
        throw InvalidInputError("power and loss vectors must have the same positive length");
    if (n_antennas < 1)
        throw InvalidInputError("antenna count must be positive");
    if (!(noise > 0.0))
        throw InvalidInputError("noise power must be positive");
    if (!p.is_finite() || arma::any(p < 0.0))
        throw InvalidInputError("powers must be finite and nonnegative");
    if (!q.is_finite() || arma::any(q <= 0.0))
        throw InvalidInputError("losses must be finite and positive");
}

void check_schedule(const Scenario &scenario, const PowerSchedule &schedule, const DurationVector &tau)
{
    const auto l = static_cast<arma::uword>(scenario.num_uavs());
    const auto n = static_cast<arma::uword>(scenario.num_slots());
    if (schedule.p_u.n_rows != l || schedule.p_u.n_cols != n || schedule.p_a.n_rows != l ||
        schedule.p_a.n_cols != n || tau.n_elem != n)
        throw InvalidInputError("schedule or duration dimensions do not match the scenario");
    if (arma::any(arma::vectorise(schedule.p_a) < 0.0) || arma::any(tau < 0.0))
        throw InvalidInputError("powers and durations must be nonnegative");
    const double slack = 1e-12 * (1.0 + arma::abs(schedule.p_u).max());
    if (arma::any(arma::vectorise(schedule.p_a - schedule.p_u) > slack))
        throw InvalidInputError("AN power exceeds total power");
}

double log2det_hermitian(const arma::cx_mat &m)
{
    arma::cx_mat r;
    if (arma::chol(r, m))
        return 2.0 * kLog2e * arma::accu(arma::log(arma::real(r.diag())));
    arma::cx_double val;
    double sign = 0.0;
    arma::log_det(val, sign, m);
    return kLog2e * val.real();
}

double log2det_diag_load(const arma::cx_mat &h, const arma::vec &p, double noise)
{
    // I + H diag(p / noise) H^H
    arma::cx_mat scaled = h;
    for (arma::uword l = 0; l < h.n_cols; ++l)
        scaled.col(l) *= std::sqrt(p(l) / noise);
    arma::cx_mat m = scaled * scaled.t();
    m.diag() += 1.0;
    return log2det_hermitian(m);
}

} // namespace

double g_term(const arma::vec &p, int n_antennas, const arma::vec &q, double t, double noise)
{
    check_term_inputs(p, n_antennas, q, noise);
    if (!(t >= 0.0) || !std::isfinite(t))
        throw InvalidInputError("g_term: t must be finite and nonnegative");
    const double n = n_antennas;
    const double decay = std::exp(-t);
    double sum = 0.0;
    for (arma::uword l = 0; l < p.n_elem; ++l)
        sum += std::log1p(n * p(l) / (q(l) * noise) * decay);
    // t - 1 + e^-t written with expm1 to keep precision near t = 0
    return kLog2e * sum + n * kLog2e * (t + std::expm1(-t));
}

double fixed_point_residual(const arma::vec &p, int n_antennas, const arma::vec &q, double t, double noise)
{
    check_term_inputs(p, n_antennas, q, noise);
    const double n = n_antennas;
    const double decay = std::exp(-t);
    double sum = 0.0;
    for (arma::uword l = 0; l < p.n_elem; ++l)
    {
        const double snr = p(l) / (q(l) * noise) * decay;
        sum += snr / (1.0 + n * snr);
    }
    return sum + std::expm1(-t);
}

double solve_fixed_point(const arma::vec &p, int n_antennas, const arma::vec &q, double noise)
{
    check_term_inputs(p, n_antennas, q, noise);
    if (arma::all(p == 0.0))
        return 0.0;

    auto s = [&](double t) { return fixed_point_residual(p, n_antennas, q, t, noise); };

    // s(0) > 0 whenever some power is positive; expand until the sign flips
    constexpr double kHiLimit = 4096.0;
    double lo = 0.0;
    double hi = 1.0;
    while (s(hi) > 0.0)
    {
        lo = hi;
        hi *= 2.0;
        if (hi > kHiLimit)
            throw NumericalFailureError(
                fmt::format("solve_fixed_point: no sign change of s(t) in [0, {}] (s(hi) = {:.3e}, sum p = {:.3e})",
                            kHiLimit, s(hi), arma::accu(p)));
    }

    double s_lo = s(lo);
    double s_hi = s(hi);
    for (int it = 0; it < 4000; ++it)
    {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi)
            break;
        const double s_mid = s(mid);
        if (s_mid > 0.0)
        {
            lo = mid;
            s_lo = s_mid;
        }
        else
        {
            hi = mid;
            s_hi = s_mid;
        }
    }
    return std::abs(s_lo) <= std::abs(s_hi) ? lo : hi;
}

double deterministic_equivalent(const arma::vec &p, int n_antennas, const arma::vec &q, double noise)
{
    return g_term(p, n_antennas, q, solve_fixed_point(p, n_antennas, q, noise), noise);
}

double slot_saddle_value(const Scenario &scenario, const PowerSchedule &schedule, const AuxVariables &aux, int slot)
{
    const auto n = static_cast<arma::uword>(slot);
    const arma::vec pu = schedule.p_u.col(n);
    const arma::vec pa = schedule.p_a.col(n);
    const auto &qb = scenario.q_bob[n].q;
    const auto &qe = scenario.q_eve[n].q;
    const double noise = scenario.noise_w;
    return g_term(pu, scenario.n_bob, qb, aux.t_bu(n), noise) - g_term(pa, scenario.n_bob, qb, aux.t_ba(n), noise) -
           g_term(pu, scenario.n_eve, qe, aux.t_eu(n), noise) + g_term(pa, scenario.n_eve, qe, aux.t_ea(n), noise);
}

double saddle_objective(const Scenario &scenario, const PowerSchedule &schedule, const DurationVector &tau,
                        const AuxVariables &aux)
{
    check_schedule(scenario, schedule, tau);
    double total = 0.0;
    for (int n = 0; n < scenario.num_slots(); ++n)
        total += tau(n) * slot_saddle_value(scenario, schedule, aux, n);
    return total / scenario.budgets.t_period;
}

ClosedFormResult secrecy_throughput_closed_form(const Scenario &scenario, const PowerSchedule &schedule,
                                                const DurationVector &tau)
{
    check_schedule(scenario, schedule, tau);
    const int slots = scenario.num_slots();
    ClosedFormResult out;
    out.aux.t_bu.zeros(slots);
    out.aux.t_ba.zeros(slots);
    out.aux.t_eu.zeros(slots);
    out.aux.t_ea.zeros(slots);
    out.per_slot.zeros(slots);

    const double noise = scenario.noise_w;
    for (int n = 0; n < slots; ++n)
    {
        const arma::vec pu = schedule.p_u.col(n);
        const arma::vec pa = schedule.p_a.col(n);
        const auto &qb = scenario.q_bob[n].q;
        const auto &qe = scenario.q_eve[n].q;
        // every t appears in exactly one g with a fixed sign, so the saddle point splits into
        // four scalar minimisations
        out.aux.t_bu(n) = solve_fixed_point(pu, scenario.n_bob, qb, noise);
        out.aux.t_ba(n) = solve_fixed_point(pa, scenario.n_bob, qb, noise);
        out.aux.t_eu(n) = solve_fixed_point(pu, scenario.n_eve, qe, noise);
        out.aux.t_ea(n) = solve_fixed_point(pa, scenario.n_eve, qe, noise);
        out.per_slot(n) = slot_saddle_value(scenario, schedule, out.aux, n);
    }
    out.r_as = arma::dot(tau, out.per_slot) / scenario.budgets.t_period;
    return out;
}

double log2det_covariance(const arma::cx_mat &h, const arma::cx_mat &k, double noise)
{
    arma::cx_mat m = h * k * h.t() / noise;
    m = 0.5 * (m + m.t());
    m.diag() += 1.0;
    return log2det_hermitian(m);
}

double instantaneous_rate(const arma::cx_mat &h, const arma::vec &p_num, const arma::vec &p_den, double noise)
{
    if (p_num.n_elem != h.n_cols || p_den.n_elem != h.n_cols)
        throw InvalidInputError("instantaneous_rate: dimension mismatch");
    if (arma::all(p_num == 0.0))
        return 0.0;
    // log det(I + H Pn H^H (H Pd H^H + s I)^-1) = log det(s I + H (Pn + Pd) H^H) - log det(s I + H Pd H^H)
    const arma::vec total = p_num + p_den;
    const double with_signal = log2det_diag_load(h, total, noise);
    const double interference = arma::all(p_den == 0.0) ? 0.0 : log2det_diag_load(h, p_den, noise);
    return with_signal - interference;
}

RateEstimate ergodic_rate_mc(const LossVector &q, const arma::vec &p_num, const arma::vec &p_den, double noise,
                             int n_antennas, std::size_t samples, const StreamKey &key)
{
    if (samples < 1)
        throw InvalidInputError("ergodic_rate_mc: need at least one sample");
    check_term_inputs(p_num, n_antennas, q.q, noise);
    check_term_inputs(p_den, n_antennas, q.q, noise);

    RateEstimate est;
    est.samples = samples;
    if (arma::all(p_num == 0.0))
        return est;

    const int num_uavs = static_cast<int>(q.size());
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t k = 0; k < samples; ++k)
    {
        auto rng = make_substream({key.seed, key.slot, k, key.tag});
        const arma::cx_mat h = composite_channel(sample_small_scale(rng, n_antennas, num_uavs), q);
        const double r = instantaneous_rate(h, p_num, p_den, noise);
        const double delta = r - mean;
        mean += delta / static_cast<double>(k + 1);
        m2 += delta * (r - mean);
    }
    est.mean = mean;
    est.std_error = samples > 1 ? std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples)) : 0.0;
    return est;
}

std::vector<RateEstimate> secrecy_rate_mc_per_slot(const Scenario &scenario, const PowerSchedule &schedule,
                                                   std::size_t samples, std::uint64_t seed)
{
    std::vector<RateEstimate> out;
    for (int n = 0; n < scenario.num_slots(); ++n)
    {
        const auto col = static_cast<arma::uword>(n);
        const arma::vec pa = schedule.p_a.col(col);
        const arma::vec ps = arma::clamp(schedule.p_u.col(col) - pa, 0.0, arma::datum::inf);
        const auto slot = static_cast<std::uint64_t>(n);
        const RateEstimate rb = ergodic_rate_mc(scenario.q_bob[col], ps, pa, scenario.noise_w, scenario.n_bob,
                                                samples, {seed, slot, 0, StreamTag::FadingBob});
        const RateEstimate re = ergodic_rate_mc(scenario.q_eve[col], ps, pa, scenario.noise_w, scenario.n_eve,
                                                samples, {seed, slot, 0, StreamTag::FadingEve});
        out.push_back({rb.mean - re.mean, std::hypot(rb.std_error, re.std_error), samples});
    }
    return out;
}

RateEstimate secrecy_throughput_mc(const Scenario &scenario, const PowerSchedule &schedule, const DurationVector &tau,
                                   std::size_t samples, std::uint64_t seed, bool clip)
{
    check_schedule(scenario, schedule, tau);
    const auto per_slot = secrecy_rate_mc_per_slot(scenario, schedule, samples, seed);
    RateEstimate est;
    est.samples = samples;
    double var = 0.0;
    const double tu = scenario.budgets.t_period;
    for (std::size_t n = 0; n < per_slot.size(); ++n)
    {
        const double w = tau(n) / tu;
        const double v = clip ? std::max(0.0, per_slot[n].mean) : per_slot[n].mean;
        est.mean += w * v;
        var += w * w * per_slot[n].std_error * per_slot[n].std_error;
    }
    est.std_error = std::sqrt(var);
    return est;
}

} // namespace uavsec
