//---------------------------------------------------------------------------//
// Copyright fdcr contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file tests/test_experiment.cpp
//---------------------------------------------------------------------------//
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fdcr/experiment.hpp"

namespace fdcr::experiment
{
namespace
{
bool same(double a, double b)
{
    return (std::isnan(a) && std::isnan(b)) || a == b;
}

void expect_rows_equal(ResultRow const& a, ResultRow const& b)
{
    EXPECT_TRUE(same(a.sweep_var, b.sweep_var));
    EXPECT_TRUE(same(a.R_d_analytic, b.R_d_analytic));
    EXPECT_TRUE(same(a.R_d_sim, b.R_d_sim));
    EXPECT_TRUE(same(a.R_d_sim_stderr, b.R_d_sim_stderr));
    EXPECT_TRUE(same(a.R_b_analytic, b.R_b_analytic));
    EXPECT_TRUE(same(a.R_b_sim, b.R_b_sim));
    EXPECT_TRUE(same(a.R_b_sim_stderr, b.R_b_sim_stderr));
    EXPECT_TRUE(same(a.P_od, b.P_od));
    EXPECT_TRUE(same(a.P_ob, b.P_ob));
    EXPECT_TRUE(same(a.baseline_primary, b.baseline_primary));
    EXPECT_TRUE(same(a.baseline_secondary, b.baseline_secondary));
    EXPECT_EQ(a.s, b.s);
    EXPECT_EQ(a.seed, b.seed);
    EXPECT_TRUE(same(a.P_od_sim, b.P_od_sim));
    EXPECT_TRUE(same(a.P_ob_sim, b.P_ob_sim));
    EXPECT_EQ(a.divergent, b.divergent);
    EXPECT_EQ(a.status, b.status);
}

ExperimentSpec small_spec()
{
    ExperimentSpec spec;
    spec.kind = SweepKind::power_sweep;
    spec.grid = {44, 52, 4, GridUnit::dBm};
    spec.blocks = 20000;
    spec.battery = BatteryMode::discretized;
    spec.interference = Interference::off;
    return spec;
}

SystemConfig small_config()
{
    SystemConfig cfg;
    cfg.k = 1;
    cfg.L = 40;
    return cfg;
}

TEST(Grid, Arithmetic)
{
    EXPECT_EQ(11u, grid_values({10, 30, 2, GridUnit::dBm}).size());
    EXPECT_EQ(6u, grid_values({40, 60, 4, GridUnit::dBm}).size());
    EXPECT_EQ(20u, grid_values({0.25, 5, 0.25, GridUnit::joules}).size());
    auto const v = grid_values({0.1, 0.3, 0.1, GridUnit::joules});
    ASSERT_EQ(3u, v.size());
    EXPECT_DOUBLE_EQ(0.3, v[2]);
    EXPECT_EQ(1u, grid_values({5, 5, 1, GridUnit::dBm}).size());
    EXPECT_THROW(grid_values({0, 1, 0, GridUnit::dBm}), std::invalid_argument);
    EXPECT_THROW(grid_values({0, 1, -1, GridUnit::dBm}), std::invalid_argument);
    EXPECT_THROW(grid_values({2, 1, 1, GridUnit::dBm}), std::invalid_argument);
}

TEST(PointConfig, PowerKeepsRatio)
{
    ExperimentSpec spec;
    spec.kind = SweepKind::power_sweep;
    spec.grid.unit = GridUnit::dBm;
    SystemConfig base;
    base.k = 2;
    auto const cfg = validate(point_config(spec, base, 30));
    EXPECT_DOUBLE_EQ(1.0, cfg.P_a);
    EXPECT_DOUBLE_EQ(0.5, cfg.P_d);

    spec.grid.unit = GridUnit::joules;
    EXPECT_THROW(point_config(spec, base, 30), std::invalid_argument);
    spec.kind = SweepKind::threshold_sweep;
    EXPECT_DOUBLE_EQ(1.5, point_config(spec, base, 1.5).E_t);
}

TEST(Sweep, PowerSweepRows)
{
    auto const table = run_power_sweep(small_spec(), small_config());
    ASSERT_EQ(3u, table.size());
    for (std::size_t i = 0; i < table.size(); ++i)
    {
        auto const& r = table[i];
        EXPECT_EQ("ok", r.status);
        EXPECT_DOUBLE_EQ(44 + 4.0 * i, r.sweep_var);
        EXPECT_EQ(1 + i, r.seed);
        EXPECT_FALSE(std::isnan(r.R_d_analytic));
        EXPECT_FALSE(std::isnan(r.R_d_sim));
        EXPECT_GT(r.R_d_sim_stderr, 0);
        EXPECT_EQ(0.0, r.baseline_secondary);
        EXPECT_GE(r.s, 0);
        // Flag is set exactly when a tolerance is exceeded
        bool const off = std::abs(r.R_d_sim - r.R_d_analytic)
                             > rate_tolerance(r.R_d_analytic)
                         || std::abs(r.R_b_sim - r.R_b_analytic)
                                > rate_tolerance(r.R_b_analytic)
                         || std::abs(r.P_od_sim - r.P_od) > kProbTol
                         || std::abs(r.P_ob_sim - r.P_ob) > kProbTol;
        EXPECT_EQ(off, r.divergent);
    }
}

TEST(Sweep, EnginesSelectColumns)
{
    auto spec = small_spec();
    spec.run_simulation = false;
    auto t = run_power_sweep(spec, small_config());
    EXPECT_TRUE(std::isnan(t[0].R_d_sim));
    EXPECT_FALSE(t[0].divergent);
    spec.run_simulation = true;
    spec.run_analytic = false;
    t = run_power_sweep(spec, small_config());
    EXPECT_TRUE(std::isnan(t[0].R_d_analytic));
    EXPECT_EQ(t[0].P_od_sim, t[0].P_od);
}

TEST(Sweep, WorkerCountDoesNotChangeOutput)
{
    auto spec = small_spec();
    spec.workers = 1;
    auto const a = to_csv(run_power_sweep(spec, small_config()));
    spec.workers = 3;
    auto const b = to_csv(run_power_sweep(spec, small_config()));
    EXPECT_EQ(a, b);
}

TEST(Sweep, PerPointErrorsRecorded)
{
    ExperimentSpec spec;
    spec.kind = SweepKind::threshold_sweep;
    spec.grid = {4, 6, 1, GridUnit::joules};
    spec.run_simulation = false;
    SystemConfig cfg = small_config();
    cfg.P_d = cfg.P_a = dbm_to_watts(50);
    auto const t = run_threshold_sweep(spec, cfg);
    ASSERT_EQ(3u, t.size());
    EXPECT_EQ("ok", t[0].status);
    EXPECT_EQ("ok", t[1].status);
    EXPECT_NE(std::string::npos, t[2].status.find("threshold exceeds capacity"));
    EXPECT_TRUE(std::isnan(t[2].R_d_analytic));
}

TEST(Sweep, SinglePointGridMatchesSingleRun)
{
    auto spec = small_spec();
    spec.grid = {48, 48, 1, GridUnit::dBm};
    auto const swept = run_power_sweep(spec, small_config());
    ASSERT_EQ(1u, swept.size());

    SystemConfig cfg = small_config();
    cfg.P_d = dbm_to_watts(48);
    cfg.P_a = cfg.P_d;
    auto const single = run_single_point(spec, cfg);
    ASSERT_EQ(1u, single.size());
    EXPECT_NEAR(48, single[0].sweep_var, 1e-12);
    EXPECT_EQ(swept[0].R_d_analytic, single[0].R_d_analytic);
    EXPECT_EQ(swept[0].R_d_sim, single[0].R_d_sim);
    EXPECT_EQ(swept[0].R_b_sim, single[0].R_b_sim);
    EXPECT_EQ(swept[0].seed, single[0].seed);
}

TEST(Sweep, ThresholdArgmax)
{
    ResultTable t(4);
    double const rd[] = {0.2, 0.9, 0.5, ResultRow::nan};
    for (int i = 0; i < 4; ++i)
    {
        t[i].sweep_var = i;
        t[i].R_d_analytic = rd[i];
        t[i].R_d_sim = 1 - rd[i];
    }
    EXPECT_EQ(1, argmax_R_d(t));
    EXPECT_EQ(0, argmax_R_d(t, true));
    EXPECT_EQ(-1, argmax_R_d(ResultTable(2)));
}

TEST(Presets, Shapes)
{
    auto const fig2 = preset("fig2");
    ASSERT_EQ(1u, fig2.size());
    EXPECT_EQ(6u, grid_values(fig2[0].spec.grid).size());
    auto const c2 = validate(point_config(fig2[0].spec, fig2[0].config, 40));
    EXPECT_DOUBLE_EQ(c2.P_a, c2.P_d);
    EXPECT_DOUBLE_EQ(6, c2.d_ad);
    EXPECT_DOUBLE_EQ(2, c2.E_t);

    auto const fig3 = preset("fig3");
    ASSERT_EQ(2u, fig3.size());
    EXPECT_LT(fig3[0].config.P_d, fig3[1].config.P_d);
    EXPECT_EQ(400, fig3[0].config.L);
    EXPECT_NE(fig3[0].tag, fig3[1].tag);
    EXPECT_THROW(preset("fig9"), std::invalid_argument);
}

//---------------------------------------------------------------------------//
// CSV
//---------------------------------------------------------------------------//
TEST(Csv, EmptyTableIsAnError)
{
    EXPECT_THROW(emit_csv({}, ::testing::TempDir() + "empty.csv"),
                 std::invalid_argument);
    std::ostringstream os;
    EXPECT_THROW(write_csv({}, os), std::invalid_argument);
}

TEST(Csv, GoldenHeader)
{
    ResultTable t(1);
    auto const text = to_csv(t);
    std::string const golden
        = "sweep_var,R_d_analytic,R_d_sim,R_d_sim_stderr,R_b_analytic,R_b_sim,"
          "R_b_sim_stderr,P_od,P_ob,baseline_primary,baseline_secondary,s,"
          "seed";
    EXPECT_EQ(0u, text.rfind(golden, 0));
    EXPECT_EQ(golden + ",P_od_sim,P_ob_sim,divergent,status",
              text.substr(0, text.find('\n')));
}

TEST(Csv, RoundTrip)
{
    auto spec = small_spec();
    auto table = run_power_sweep(spec, small_config());
    table[1].status = "error: something, bad";
    table[2].R_b_sim = ResultRow::nan;
    table[0].R_d_analytic = 0.1 + 0.2;  // not exactly representable in %.15g

    std::string const path = ::testing::TempDir() + "roundtrip.csv";
    emit_csv(table, path);
    auto const back = read_csv_file(path);
    std::remove(path.c_str());
    ASSERT_EQ(table.size(), back.size());
    // Commas in the status are replaced when written
    table[1].status = "error: something; bad";
    for (std::size_t i = 0; i < table.size(); ++i)
        expect_rows_equal(table[i], back[i]);
}

TEST(Csv, ParseErrors)
{
    std::istringstream bad_header("a,b,c\n1,2,3\n");
    EXPECT_THROW(parse_csv(bad_header), std::invalid_argument);

    std::istringstream header_only(to_csv(ResultTable(1)).substr(
        0, to_csv(ResultTable(1)).find('\n') + 1));
    EXPECT_THROW(parse_csv(header_only), std::invalid_argument);

    auto text = to_csv(ResultTable(1));
    text += "1,2\n";
    std::istringstream short_row(text);
    EXPECT_THROW(parse_csv(short_row), std::invalid_argument);

    EXPECT_THROW(emit_csv(ResultTable(1), "/nonexistent/dir/out.csv"),
                 std::runtime_error);
    EXPECT_THROW(read_csv_file("/nonexistent/in.csv"), std::runtime_error);
}

TEST(Csv, RerunIsByteIdentical)
{
    auto spec = small_spec();
    spec.battery = BatteryMode::continuous;
    spec.interference = Interference::exact;
    auto const a = to_csv(run_power_sweep(spec, small_config()));
    auto const b = to_csv(run_power_sweep(spec, small_config()));
    EXPECT_EQ(a, b);
    spec.seed = 2;
    EXPECT_NE(a, to_csv(run_power_sweep(spec, small_config())));
}

TEST(Gnuplot, ReferencesCsv)
{
    auto const s = gnuplot_script("out/fig2.csv", SweepKind::power_sweep);
    EXPECT_NE(std::string::npos, s.find("'out/fig2.csv'"));
    EXPECT_NE(std::string::npos, s.find("separator ','"));
    EXPECT_NE(std::string::npos,
              gnuplot_script("x.csv", SweepKind::threshold_sweep).find("E_t"));
}

}  // namespace
}  // namespace fdcr::experiment
