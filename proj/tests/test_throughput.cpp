//---------------------------------------------------------------------------//
// Copyright fdcr contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file tests/test_throughput.cpp
//---------------------------------------------------------------------------//
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "fdcr/throughput.hpp"

namespace fdcr::throughput
{
namespace
{
SystemConfig make_config(double p_dbm, int L = 400, double E_t = 2)
{
    SystemConfig raw;
    raw.k = 1;
    raw.P_d = dbm_to_watts(p_dbm);
    raw.P_a = 0;
    raw.L = L;
    raw.E_t = E_t;
    return validate(raw);
}

StationaryDistribution point_mass(int L, int at)
{
    StationaryDistribution pi;
    pi.pi = Eigen::VectorXd::Zero(L + 1);
    pi.pi[at] = 1;
    return pi;
}

TEST(MinLevel, Examples)
{
    SystemConfig raw;
    raw.P_d = 0.1;
    raw.P_a = 0.1;
    auto const cfg = validate(raw);
    auto const battery = make_battery(cfg);
    // ceil(0.5 * 0.1 * 3 * 400 * (1e-5 + 1e-6) / (4 * 5 * 2)) = ceil(1.65e-5)
    EXPECT_EQ(1, min_level_s(cfg, battery));

    auto zero = cfg;
    zero.gamma0 = 0;
    EXPECT_EQ(0, min_level_s(zero, battery));
}

TEST(MinLevel, HomogeneousInThreshold)
{
    auto cfg = make_config(56, 400, 1);
    auto arg = [&](SystemConfig const& c) {
        return c.eta * c.P_d * c.gamma0 * c.L * (c.N0 + c.P_d * c.H_dd)
               / (4 * c.C * c.E_t);
    };
    double const a1 = arg(cfg);
    auto cfg2 = cfg;
    cfg2.E_t = 2;
    EXPECT_NEAR(a1 / 2, arg(cfg2), 1e-12 * a1);
    EXPECT_EQ(static_cast<int>(std::ceil(a1)),
              min_level_s(cfg, make_battery(cfg)));
    EXPECT_EQ(static_cast<int>(std::ceil(a1 / 2)),
              min_level_s(cfg2, make_battery(cfg2)));
}

TEST(SecondaryOutage, Boundaries)
{
    auto const cfg = make_config(48, 40);
    auto const battery = make_battery(cfg);
    auto const lv = analytic::level_distributions(battery,
                                                  derive_link_stats(cfg), cfg);
    auto const pi = point_mass(battery.L, battery.L);
    EXPECT_EQ(1.0, secondary_outage_prob(pi, lv, battery, battery.L + 1));
    EXPECT_NEAR(0.0, secondary_outage_prob(pi, lv, battery, 0), 1e-15);

    EXPECT_EQ(0.0, secondary_throughput(1.0, cfg));
    EXPECT_DOUBLE_EQ(1.0, secondary_throughput(0.0, cfg));
}

TEST(SecondaryOutage, InfeasibleThreshold)
{
    // Huge loop interference makes s exceed L
    SystemConfig raw;
    raw.k = 1;
    raw.P_d = dbm_to_watts(70);
    raw.P_a = 0;
    raw.H_dd = 1;
    raw.L = 50;
    auto const cfg = validate(raw);
    auto const battery = make_battery(cfg);
    EXPECT_GT(min_level_s(cfg, battery), battery.L);
    auto const r = analyze(cfg);
    EXPECT_EQ(1.0, r.P_od);
    EXPECT_EQ(0.0, r.R_d);
}

TEST(MidBlockDeficit, Boundaries)
{
    auto const cfg = make_config(48, 40);
    auto battery = make_battery(cfg);
    auto const lv = analytic::level_distributions(battery,
                                                  derive_link_stats(cfg), cfg);
    auto b1 = battery;
    b1.t = 1;
    StationaryDistribution pi;
    pi.pi = Eigen::VectorXd::Constant(battery.L + 1, 1.0 / battery.L);
    pi.pi[0] = 0;
    EXPECT_EQ(0.0, mid_block_deficit_prob(pi, lv, b1));

    LevelDistributions none{std::vector<double>(battery.L + 1, 0.0),
                            std::vector<double>(battery.L + 1, 0.0)};
    none.link1[0] = none.link2[0] = 1;
    EXPECT_EQ(1.0, mid_block_deficit_prob(point_mass(battery.L, 0), none,
                                          battery));
}

TEST(PrimaryThroughput, Limits)
{
    auto const cfg = make_config(50);
    auto const links = derive_link_stats(cfg);
    double const r0 = rate_r0(cfg);
    double const f2 = analytic::cdf_combined_sinr(cfg.gamma0, links,
                                                  Interference::off);
    EXPECT_DOUBLE_EQ(r0 / 2 * (1 - f2), primary_throughput(1.0, links, cfg));

    auto tiny = cfg;
    tiny.gamma0 = 1e-9;
    double const rb = primary_throughput(0.3, derive_link_stats(tiny), tiny);
    EXPECT_LT(rb, 1e-8);
    EXPECT_NEAR(rate_r0(tiny) / 2, rb, 1e-15);

    // Interference can only hurt
    EXPECT_LE(primary_throughput(0.2, links, cfg, Interference::exact),
              primary_throughput(0.2, links, cfg, Interference::off));
}

TEST(Baseline, Values)
{
    auto cfg = make_config(50);
    auto const links = derive_link_stats(cfg);
    auto const& l6 = link(links, kLinkAB);
    auto [primary, secondary] = baseline_throughputs(links, cfg);
    EXPECT_EQ(0.0, secondary);
    EXPECT_NEAR(rate_r0(cfg)
                    * (1 - boost::math::gamma_p(l6.m, l6.m * cfg.gamma0
                                                          / l6.Omega)),
                primary, 1e-14);

    auto huge = make_config(120);
    auto [p_huge, s_huge] = baseline_throughputs(derive_link_stats(huge), huge);
    EXPECT_NEAR(rate_r0(huge), p_huge, 1e-9);
    EXPECT_EQ(0.0, s_huge);

    cfg.baseline_full_block = false;
    EXPECT_DOUBLE_EQ(primary / 2, baseline_throughputs(links, cfg).first);
}

TEST(Analyze, ProbabilityBoundsAndOrdering)
{
    for (double p : {36.0, 40.0, 44.0, 48.0, 52.0, 56.0, 60.0})
    {
        for (int L : {25, 100})
        {
            auto const r = analyze(make_config(p, L));
            EXPECT_GE(r.P_od, 0);
            EXPECT_LE(r.P_od, 1);
            EXPECT_GE(r.P_ob, 0);
            EXPECT_LE(r.P_ob, 1);
            // Success requires mode I
            EXPECT_GE(1 - r.P_ob, 1 - r.P_od - 1e-12) << p;
            EXPECT_TRUE(r.converged);
            EXPECT_EQ(Source::analytic, r.source);
        }
    }
}

TEST(Analyze, PrimaryMonotoneInPower)
{
    double prev = 0;
    for (double p = 30; p <= 64; p += 2)
    {
        auto const r = analyze(make_config(p, 100));
        EXPECT_GE(r.R_b, prev - 1e-12) << p;
        prev = r.R_b;
    }
}

TEST(Analyze, SecondaryHasInteriorThresholdOptimum)
{
    std::vector<double> rd;
    for (double E_t = 0.25; E_t <= 5.0; E_t += 0.25)
        rd.push_back(analyze(make_config(50, 400, E_t)).R_d);
    auto const best = std::max_element(rd.begin(), rd.end()) - rd.begin();
    EXPECT_GT(best, 0);
    EXPECT_LT(best, static_cast<long>(rd.size()) - 1);
    for (std::size_t k = best + 1; k < rd.size(); ++k)
        EXPECT_LE(rd[k], rd[k - 1] + 1e-9) << k;
}

TEST(Analyze, RejectsInvalid)
{
    SystemConfig raw;
    raw.E_t = 9;
    EXPECT_THROW(analyze(raw), ConfigError);
}

}  // namespace
}  // namespace fdcr::throughput
