//---------------------------------------------------------------------------//
// Copyright fdcr contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file fdcr/montecarlo.hpp
//! Block-level simulation of the cooperative protocol.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "analytic.hpp"
#include "fading.hpp"
#include "markov.hpp"
#include "params.hpp"

namespace fdcr
{
//---------------------------------------------------------------------------//
enum class BatteryMode
{
    continuous,   //!< Exact energy bookkeeping
    discretized,  //!< Per-link level arithmetic identical to step_battery
};

struct SimOptions
{
    std::int64_t n_blocks{1'000'000};
    std::uint64_t seed{1};
    std::uint64_t stream_id{0};
    BatteryMode battery_mode{BatteryMode::continuous};
    Interference interference{Interference::exact};
    bool record_histogram{true};
    bool record_transitions{false};
    //! Blocks simulated from an empty battery before counting starts
    std::int64_t warmup_blocks{1000};
    //! Batches for the batch-means standard errors
    int batches{50};
    //! Optional per-block CSV trace
    std::ostream* trace{nullptr};
};

struct SimReport
{
    std::int64_t n_blocks{0};
    std::int64_t mode_I_count{0};
    std::int64_t hap_successes{0};
    std::int64_t pr_successes{0};

    double P_od{1};
    double P_ob{1};
    double R_d{0};
    double R_b{0};
    double se_P_od{0};
    double se_P_ob{0};
    double se_R_d{0};
    double se_R_b{0};

    //! Battery level at the start of each counted block
    std::vector<std::int64_t> histogram;
    //! transitions[i][j]: counted blocks that moved level i to level j
    std::vector<std::vector<std::int64_t>> transitions;

    // Energy ledger over the counted blocks (joules; levels * eps1 when
    // discretized)
    double energy_start{0};
    double energy_end{0};
    double harvested{0};
    double spilled{0};
    double consumed{0};

    // Per-batch success fractions behind the standard errors
    std::vector<double> batch_hap;
    std::vector<double> batch_pr;
    std::vector<double> batch_mode2;
};

namespace montecarlo
{
namespace detail
{
inline double batch_se(std::vector<double> const& v)
{
    auto const n = static_cast<double>(v.size());
    if (n < 2)
        return 0;
    double mean = 0;
    for (double x : v)
        mean += x;
    mean /= n;
    double ss = 0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (n - 1) / n);
}

inline void finalize(SimReport& r, double R0)
{
    auto const n = static_cast<double>(r.n_blocks);
    r.P_od = 1 - r.hap_successes / n;
    r.P_ob = 1 - r.mode_I_count / n;
    r.R_d = r.hap_successes / n * R0 / 2;
    r.R_b = r.pr_successes / n * R0 / 2;
    r.se_P_od = batch_se(r.batch_hap);
    r.se_P_ob = batch_se(r.batch_mode2);
    r.se_R_d = r.se_P_od * R0 / 2;
    r.se_R_b = batch_se(r.batch_pr) * R0 / 2;
}

[[noreturn]] inline void invariant_failure(char const* what, std::int64_t block)
{
    throw std::logic_error(std::string("simulation invariant violated at block ")
                           + std::to_string(block) + ": " + what);
}
}  // namespace detail

/*!
 * Simulate one battery trajectory.
 *
 * Each block draws the six raw power gains (mean d^-alpha, Nakagami shapes),
 * harvests in slot one, picks the mode from the battery test, scores the HAP
 * (gamma_cd >= gamma0 in mode I) and the PR (MRC of the direct copy and the
 * DF-relayed copy), then updates the battery with the capacity clamp. The
 * config is used as given; zero transmit powers are allowed here.
 */
inline SimReport run_simulation(SystemConfig const& cfg,
                                BatteryModel const& battery,
                                SimOptions const& opts)
{
    if (opts.n_blocks < 1)
        throw std::invalid_argument("n_blocks must be at least 1");
    if (opts.batches < 1)
        throw std::invalid_argument("batches must be at least 1");

    auto const dist = link_distances(cfg);
    std::array<GammaGain, kNumLinks> gains;
    for (int i = 0; i < kNumLinks; ++i)
        gains[i] = GammaGain::from_mean(cfg.m[i], std::pow(dist[i], -cfg.alpha));

    bool const discrete = opts.battery_mode == BatteryMode::discretized;
    bool const exact_interference = opts.interference == Interference::exact;
    double const half_eta = 0.5 * cfg.eta;
    double const li_noise = cfg.N0 + cfg.P_d * cfg.H_dd;
    double const C = battery.C;
    double const E_t = battery.E_t;
    int const L = battery.L;
    int const t = battery.t;

    SimReport rep;
    rep.n_blocks = opts.n_blocks;
    if (opts.record_histogram)
        rep.histogram.assign(L + 1, 0);
    if (opts.record_transitions)
        rep.transitions.assign(L + 1, std::vector<std::int64_t>(L + 1, 0));

    RngStream rng(opts.seed, opts.stream_id);
    double energy = 0;  // continuous battery
    int level = 0;      // discretized battery

    auto const stored = [&] {
        return discrete ? level * battery.eps1 : energy;
    };

    int const nb = static_cast<int>(
        std::min<std::int64_t>(opts.batches, opts.n_blocks));
    std::int64_t const per_batch = opts.n_blocks / nb;
    std::int64_t batch_hap = 0, batch_pr = 0, batch_m2 = 0, batch_len = 0;

    if (opts.trace)
    {
        *opts.trace << "block,mode,battery_start,harvest_slot1,battery_end,"
                       "hap_success,pr_success\n";
    }

    std::int64_t const total = opts.warmup_blocks + opts.n_blocks;
    for (std::int64_t blk = 0; blk < total; ++blk)
    {
        bool const counted = blk >= opts.warmup_blocks;
        if (counted && blk == opts.warmup_blocks)
            rep.energy_start = stored();

        std::array<double, kNumLinks> g;
        for (int i = 0; i < kNumLinks; ++i)
            g[i] = sample_gain(gains[i], rng);

        double const e1 = half_eta * cfg.P_a * g[0];
        double const e2 = half_eta * cfg.P_d * g[1];

        int const level_before = level;
        double const energy_before = stored();
        Mode mode;
        double harvested = 0, spilled = 0, consumed = 0;

        if (discrete)
        {
            int const mu = discretize_energy(e1, battery);
            int const nu = discretize_energy(e2, battery);
            auto const d = step_battery(level, mu + nu, nu, battery);
            mode = d.mode;
            // Independent re-derivation of the level update
            std::int64_t const gain_lv = mode == Mode::I
                                             ? std::int64_t(mu) + nu
                                             : std::int64_t(mu) + 2 * nu;
            std::int64_t const spill_lv
                = std::max<std::int64_t>(0, level + gain_lv - L);
            std::int64_t const expect
                = level + gain_lv - spill_lv - (mode == Mode::I ? t : 0);
            if (expect != d.next_level)
                detail::invariant_failure("level update mismatch", blk);
            level = d.next_level;
            if (level < 0 || level > L)
                detail::invariant_failure("level outside [0, L]", blk);
            harvested = gain_lv * battery.eps1;
            spilled = spill_lv * battery.eps1;
            consumed = d.consumed * battery.eps1;
        }
        else
        {
            double const eh = e1 + e2;
            if (energy + eh >= E_t)
            {
                mode = Mode::I;
                double const filled = std::min(energy + eh, C);
                harvested = eh;
                spilled = energy + eh - filled;
                consumed = E_t;
                energy = filled - E_t;
            }
            else
            {
                mode = Mode::II;
                double const e_ii = eh + e2;
                double const filled = std::min(energy + e_ii, C);
                harvested = e_ii;
                spilled = energy + e_ii - filled;
                energy = filled;
            }
            if (energy < 0 || energy > C)
                detail::invariant_failure("energy outside [0, C]", blk);
        }

        bool hap_ok = false;
        if (mode == Mode::I)
        {
            double const g_cd = 2 * E_t * g[1] / li_noise;
            hap_ok = g_cd >= cfg.gamma0;
        }
        double const g_ab = cfg.P_a * g[5] / cfg.N0;
        double const g_ad = cfg.P_a * g[3] / li_noise;
        double const g_db = (mode == Mode::I && exact_interference)
                                ? cfg.P_d * g[4] / (cfg.N0 + 2 * E_t * g[2])
                                : cfg.P_d * g[4] / cfg.N0;
        bool const pr_ok = g_ab + std::min(g_ad, g_db) >= cfg.gamma0;

        if (opts.trace)
        {
            *opts.trace << blk << ',' << (mode == Mode::I ? "I" : "II") << ','
                        << energy_before << ',' << e1 + e2 << ',' << stored()
                        << ',' << hap_ok << ',' << pr_ok << '\n';
        }

        if (!counted)
            continue;

        if (opts.record_histogram)
        {
            int const h = discrete ? level_before
                                   : discretize_energy(energy_before, battery);
            ++rep.histogram[h];
        }
        if (opts.record_transitions && discrete)
            ++rep.transitions[level_before][level];

        rep.harvested += harvested;
        rep.spilled += spilled;
        rep.consumed += consumed;
        if (mode == Mode::I)
            ++rep.mode_I_count;
        else
            ++batch_m2;
        rep.hap_successes += hap_ok;
        rep.pr_successes += pr_ok;
        batch_hap += hap_ok;
        batch_pr += pr_ok;
        ++batch_len;

        bool const last_batch = static_cast<int>(rep.batch_hap.size()) == nb - 1;
        if ((!last_batch && batch_len == per_batch) || blk == total - 1)
        {
            auto const len = static_cast<double>(batch_len);
            rep.batch_hap.push_back(batch_hap / len);
            rep.batch_pr.push_back(batch_pr / len);
            rep.batch_mode2.push_back(batch_m2 / len);
            batch_hap = batch_pr = batch_m2 = batch_len = 0;
        }
    }
    rep.energy_end = stored();
    detail::finalize(rep, rate_r0(cfg));
    return rep;
}

/*!
 * Independent replicas on consecutive stream ids, run concurrently and
 * pooled in stream order.
 */
inline SimReport run_replicas(SystemConfig const& cfg,
                              BatteryModel const& battery,
                              SimOptions const& opts, int replicas)
{
    if (replicas < 1)
        throw std::invalid_argument("replicas must be at least 1");
    std::vector<std::future<SimReport>> jobs;
    for (int r = 0; r < replicas; ++r)
    {
        SimOptions o = opts;
        o.stream_id = opts.stream_id + static_cast<std::uint64_t>(r);
        o.trace = nullptr;
        jobs.push_back(std::async(std::launch::async, [&cfg, &battery, o] {
            return run_simulation(cfg, battery, o);
        }));
    }
    SimReport pooled;
    for (auto& j : jobs)
    {
        auto r = j.get();
        pooled.n_blocks += r.n_blocks;
        pooled.mode_I_count += r.mode_I_count;
        pooled.hap_successes += r.hap_successes;
        pooled.pr_successes += r.pr_successes;
        pooled.harvested += r.harvested;
        pooled.spilled += r.spilled;
        pooled.consumed += r.consumed;
        pooled.energy_start += r.energy_start;
        pooled.energy_end += r.energy_end;
        auto merge = [](auto& into, auto const& from) {
            if (into.empty())
                into = from;
            else
                for (std::size_t k = 0; k < from.size(); ++k)
                    into[k] += from[k];
        };
        merge(pooled.histogram, r.histogram);
        if (pooled.transitions.empty())
            pooled.transitions = r.transitions;
        else
            for (std::size_t k = 0; k < r.transitions.size(); ++k)
                merge(pooled.transitions[k], r.transitions[k]);
        auto append = [](auto& into, auto const& from) {
            into.insert(into.end(), from.begin(), from.end());
        };
        append(pooled.batch_hap, r.batch_hap);
        append(pooled.batch_pr, r.batch_pr);
        append(pooled.batch_mode2, r.batch_mode2);
    }
    detail::finalize(pooled, rate_r0(cfg));
    return pooled;
}

//! Normalized battery-level histogram.
inline std::vector<double> empirical_battery_distribution(SimReport const& r)
{
    if (r.histogram.empty())
        throw std::invalid_argument("simulation did not record a histogram");
    std::int64_t total = 0;
    for (auto c : r.histogram)
        total += c;
    std::vector<double> p(r.histogram.size());
    for (std::size_t k = 0; k < p.size(); ++k)
        p[k] = static_cast<double>(r.histogram[k]) / static_cast<double>(total);
    return p;
}

}  // namespace montecarlo
}  // namespace fdcr
