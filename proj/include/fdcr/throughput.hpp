//---------------------------------------------------------------------------//
// Copyright fdcr contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file fdcr/throughput.hpp
//! Outage probabilities and fixed-rate throughput of both links.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <cmath>
#include <tuple>
#include <utility>
#include <vector>

#include "analytic.hpp"
#include "markov.hpp"
#include "params.hpp"

namespace fdcr
{
//---------------------------------------------------------------------------//
enum class Source
{
    analytic,
    simulated,
};

struct ThroughputReport
{
    double R_d{0};
    double R_b{0};
    double P_od{1};
    double P_ob{1};
    int s{0};
    double R0{0};
    Source source{Source::analytic};
    double baseline_R_primary{0};
    double baseline_R_secondary{0};
    bool converged{true};
};

//! Everything the chain analysis produces for one configuration.
struct ChainSolution
{
    SystemConfig config;
    LinkStats links;
    BatteryModel battery;
    LevelDistributions levels;
    TransitionMatrix V;
    StationaryDistribution pi;
};

namespace throughput
{
//---------------------------------------------------------------------------//
/*!
 * Smallest first-slot link-2 harvest level that guarantees gamma_cd >= gamma0.
 *
 * gamma_cd and the link-2 harvest share |h_cd|^2, so the SINR condition is a
 * threshold on the harvested level:
 *   s = ceil(eta P_d gamma0 L (N0 + P_d H_dd) / (4 C E_t)).
 * A value above L means the secondary link can never close.
 */
inline int min_level_s(SystemConfig const& cfg, BatteryModel const& battery)
{
    double const arg = cfg.eta * cfg.P_d * cfg.gamma0 * battery.L
                       * (cfg.N0 + cfg.P_d * cfg.H_dd)
                       / (4 * battery.C * battery.E_t);
    if (arg > battery.L)
        return battery.L + 1;
    return static_cast<int>(std::ceil(arg));
}

//! Tail sums: out[k] = sum_{x >= k} p[x], with out[size] = 0.
inline std::vector<double> tail_sums(std::vector<double> const& p)
{
    std::vector<double> out(p.size() + 1, 0.0);
    for (auto k = p.size(); k-- > 0;)
        out[k] = out[k + 1] + p[k];
    return out;
}

/*!
 * P_od = 1 - Pr{mode I and gamma_cd >= gamma0}.
 *
 * Success needs i + mu + nu >= t (enough energy after slot one) and nu >= s.
 */
inline double secondary_outage_prob(StationaryDistribution const& pi,
                                    LevelDistributions const& lv,
                                    BatteryModel const& battery, int s)
{
    if (s > battery.L)
        return 1.0;
    auto const tail1 = tail_sums(lv.link1);
    int const t = battery.t;
    double success = 0;
    for (int i = 0; i <= battery.L; ++i)
    {
        double row = 0;
        for (int nu = std::max(s, 0); nu <= battery.L; ++nu)
        {
            int const need = std::max(0, t - i - nu);
            row += lv.link2[nu] * tail1[need];
        }
        success += pi.pi[i] * row;
    }
    return std::clamp(1 - success, 0.0, 1.0);
}

inline double secondary_throughput(double P_od, SystemConfig const& cfg)
{
    return (1 - P_od) * rate_r0(cfg) / 2;
}

/*!
 * P_ob = sum_i pi_i Pr{i + mu + nu < t}: the battery is still short of the
 * threshold after the first slot.
 */
inline double mid_block_deficit_prob(StationaryDistribution const& pi,
                                     LevelDistributions const& lv,
                                     BatteryModel const& battery)
{
    int const t = battery.t;
    // Distribution of mu + nu below t is all that matters
    std::vector<double> conv(t, 0.0);
    for (int nu = 0; nu < t && nu <= battery.L; ++nu)
    {
        for (int mu = 0; mu + nu < t && mu <= battery.L; ++mu)
            conv[mu + nu] += lv.link1[mu] * lv.link2[nu];
    }
    double p = 0;
    double cdf = 0;
    std::vector<double> cdf_below(t + 1, 0.0);
    for (int k = 0; k < t; ++k)
    {
        cdf += conv[k];
        cdf_below[k + 1] = cdf;
    }
    for (int i = 0; i < t && i <= battery.L; ++i)
        p += pi.pi[i] * cdf_below[t - i];
    return std::clamp(p, 0.0, 1.0);
}

/*!
 * Fixed-rate throughput at the PR, gamma0 being both rate and threshold.
 *
 * With Interference::off both branches share the interference-free CDF.
 */
inline SpecfunResult primary_throughput_result(double P_ob,
                                               LinkStats const& links,
                                               SystemConfig const& cfg,
                                               Interference mode
                                               = Interference::off)
{
    double const x = cfg.gamma0;
    auto const f2 = analytic::cdf_combined_sinr_result(x, links,
                                                       Interference::off);
    auto const f1 = mode == Interference::off
                        ? f2
                        : analytic::cdf_combined_sinr_result(x, links, mode);
    double const r = rate_r0(cfg) / 2
                     * ((1 - P_ob) * (1 - f1.value) + P_ob * (1 - f2.value));
    return {r, f1.converged && f2.converged, 0};
}

inline double primary_throughput(double P_ob, LinkStats const& links,
                                 SystemConfig const& cfg,
                                 Interference mode = Interference::off)
{
    return primary_throughput_result(P_ob, links, cfg, mode).value;
}

//! Non-cooperative rates: direct PT->PR only, ST silent.
inline std::pair<double, double>
baseline_throughputs(LinkStats const& links, SystemConfig const& cfg)
{
    auto const& l6 = link(links, kLinkAB);
    double const outage = specfun::reg_lower_gamma(l6.m, l6.beta * cfg.gamma0);
    double const share = cfg.baseline_full_block ? 1.0 : 0.5;
    return {share * rate_r0(cfg) * (1 - outage), 0.0};
}

//---------------------------------------------------------------------------//
//! Levels, chain and stationary law for a validated config.
inline ChainSolution solve_chain(SystemConfig const& cfg)
{
    ChainSolution sol;
    sol.config = cfg;
    sol.links = derive_link_stats(cfg);
    sol.battery = make_battery(cfg);
    sol.levels = analytic::level_distributions(sol.battery, sol.links, cfg);
    sol.V = markov::build_transition_matrix(sol.levels, sol.battery);
    sol.pi = markov::stationary_distribution(sol.V);
    return sol;
}

inline ThroughputReport report_from_chain(ChainSolution const& sol,
                                          Interference mode = Interference::off)
{
    auto const& cfg = sol.config;
    ThroughputReport r;
    r.source = Source::analytic;
    r.R0 = rate_r0(cfg);
    r.s = min_level_s(cfg, sol.battery);
    r.P_od = secondary_outage_prob(sol.pi, sol.levels, sol.battery, r.s);
    r.P_ob = mid_block_deficit_prob(sol.pi, sol.levels, sol.battery);
    r.R_d = secondary_throughput(r.P_od, cfg);
    auto rb = primary_throughput_result(r.P_ob, sol.links, cfg, mode);
    r.R_b = rb.value;
    r.converged = rb.converged;
    std::tie(r.baseline_R_primary, r.baseline_R_secondary)
        = baseline_throughputs(sol.links, cfg);
    return r;
}

//! Full analytic evaluation of a raw config.
inline ThroughputReport analyze(SystemConfig const& raw,
                                Interference mode = Interference::off)
{
    return report_from_chain(solve_chain(validate(raw)), mode);
}

}  // namespace throughput
}  // namespace fdcr
