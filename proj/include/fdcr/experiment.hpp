//---------------------------------------------------------------------------//
// Copyright fdcr contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file fdcr/experiment.hpp
//! Sweep runner, presets and CSV tables.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "montecarlo.hpp"
#include "params.hpp"
#include "throughput.hpp"

namespace fdcr
{
//---------------------------------------------------------------------------//
enum class SweepKind
{
    power_sweep,      //!< P_a over the grid with P_a = k P_d
    threshold_sweep,  //!< E_t over the grid
    single_point,     //!< Config as given
};

enum class GridUnit
{
    dBm,
    watts,
    joules,
};

struct SweepGrid
{
    double start{0};
    double stop{0};
    double step{1};
    GridUnit unit{GridUnit::dBm};
};

struct ExperimentSpec
{
    SweepKind kind{SweepKind::power_sweep};
    SweepGrid grid;
    bool run_analytic{true};
    bool run_simulation{true};
    std::string output;

    std::int64_t blocks{1'000'000};
    std::uint64_t seed{1};
    //! Seed of the first point; point i uses seed_offset + i
    std::uint64_t seed_offset{0};
    BatteryMode battery{BatteryMode::continuous};
    Interference interference{Interference::exact};
    //! Worker threads, 0 for one per hardware thread
    unsigned workers{0};
};

struct ResultRow
{
    static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    double sweep_var{nan};
    double R_d_analytic{nan};
    double R_d_sim{nan};
    double R_d_sim_stderr{nan};
    double R_b_analytic{nan};
    double R_b_sim{nan};
    double R_b_sim_stderr{nan};
    double P_od{nan};
    double P_ob{nan};
    double baseline_primary{nan};
    double baseline_secondary{nan};
    int s{-1};
    std::uint64_t seed{0};
    double P_od_sim{nan};
    double P_ob_sim{nan};
    bool divergent{false};
    std::string status{"ok"};
};

using ResultTable = std::vector<ResultRow>;

inline constexpr char kCsvHeader[]
    = "sweep_var,R_d_analytic,R_d_sim,R_d_sim_stderr,R_b_analytic,R_b_sim,"
      "R_b_sim_stderr,P_od,P_ob,baseline_primary,baseline_secondary,s,seed";
inline constexpr char kCsvExtraHeader[] = "P_od_sim,P_ob_sim,divergent,status";

namespace experiment
{
//! Analytic-vs-simulated agreement band for throughputs
inline double rate_tolerance(double analytic)
{
    return std::max(0.02 * std::abs(analytic), 0.005);
}
inline constexpr double kProbTol = 0.005;

//---------------------------------------------------------------------------//
/*!
 * Grid points start + i*step up to stop, inclusive within a relative slack.
 */
inline std::vector<double> grid_values(SweepGrid const& g)
{
    if (!(g.step > 0) || !std::isfinite(g.step))
        throw std::invalid_argument("sweep step must be positive");
    if (!(g.stop >= g.start))
        throw std::invalid_argument("sweep stop must not precede start");
    auto const n = static_cast<std::int64_t>(
                       std::floor((g.stop - g.start) / g.step + 1e-9))
                   + 1;
    if (n > 100000)
        throw std::invalid_argument("sweep grid has too many points");
    std::vector<double> out(n);
    for (std::int64_t i = 0; i < n; ++i)
        out[i] = g.start + static_cast<double>(i) * g.step;
    return out;
}

inline double to_watts(double v, GridUnit unit)
{
    switch (unit)
    {
        case GridUnit::dBm:
            return dbm_to_watts(v);
        case GridUnit::watts:
            return v;
        case GridUnit::joules:
            break;
    }
    throw std::invalid_argument("power sweep grid must be in dBm or W");
}

//! Config for one point of the sweep (not yet validated).
inline SystemConfig point_config(ExperimentSpec const& spec,
                                 SystemConfig const& base, double x)
{
    SystemConfig cfg = base;
    switch (spec.kind)
    {
        case SweepKind::power_sweep: {
            double const k = base.k.value_or(1.0);
            cfg.P_a = to_watts(x, spec.grid.unit);
            cfg.P_d = cfg.P_a / k;
            cfg.k = k;
            break;
        }
        case SweepKind::threshold_sweep:
            if (spec.grid.unit != GridUnit::joules)
                throw std::invalid_argument("threshold sweep grid must be in J");
            cfg.E_t = x;
            break;
        case SweepKind::single_point:
            break;
    }
    return cfg;
}

namespace detail
{
inline std::string one_line(std::string s)
{
    for (auto& c : s)
    {
        if (c == ',' || c == '\n' || c == '\r' || c == '"')
            c = ';';
    }
    return s;
}
}  // namespace detail

/*!
 * Evaluate one point. Failures are caught and recorded in the row.
 */
inline ResultRow run_point(ExperimentSpec const& spec, SystemConfig const& base,
                           double x, std::uint64_t index)
{
    ResultRow row;
    row.sweep_var = x;
    row.seed = spec.seed + spec.seed_offset + index;
    try
    {
        SystemConfig const cfg = validate(point_config(spec, base, x));
        auto const links = derive_link_stats(cfg);
        auto const battery = make_battery(cfg);
        row.s = throughput::min_level_s(cfg, battery);
        std::tie(row.baseline_primary, row.baseline_secondary)
            = throughput::baseline_throughputs(links, cfg);
        if (spec.run_analytic)
        {
            auto const r = throughput::analyze(cfg, Interference::off);
            row.R_d_analytic = r.R_d;
            row.R_b_analytic = r.R_b;
            row.P_od = r.P_od;
            row.P_ob = r.P_ob;
        }
        if (spec.run_simulation)
        {
            SimOptions opts;
            opts.n_blocks = spec.blocks;
            opts.seed = row.seed;
            opts.battery_mode = spec.battery;
            opts.interference = spec.interference;
            opts.record_histogram = false;
            auto const r = montecarlo::run_simulation(cfg, battery, opts);
            row.R_d_sim = r.R_d;
            row.R_d_sim_stderr = r.se_R_d;
            row.R_b_sim = r.R_b;
            row.R_b_sim_stderr = r.se_R_b;
            row.P_od_sim = r.P_od;
            row.P_ob_sim = r.P_ob;
            if (!spec.run_analytic)
            {
                row.P_od = r.P_od;
                row.P_ob = r.P_ob;
            }
        }
        if (spec.run_analytic && spec.run_simulation)
        {
            row.divergent
                = std::abs(row.R_d_sim - row.R_d_analytic)
                      > rate_tolerance(row.R_d_analytic)
                  || std::abs(row.R_b_sim - row.R_b_analytic)
                         > rate_tolerance(row.R_b_analytic)
                  || std::abs(row.P_od_sim - row.P_od) > kProbTol
                  || std::abs(row.P_ob_sim - row.P_ob) > kProbTol;
        }
    }
    catch (std::exception const& e)
    {
        row.status = "error: " + detail::one_line(e.what());
    }
    return row;
}

/*!
 * Run every grid point on a worker pool. Rows come back in grid order.
 */
inline ResultTable run_sweep(ExperimentSpec const& spec, SystemConfig const& base)
{
    std::vector<double> xs;
    if (spec.kind == SweepKind::single_point)
        xs = {spec.grid.start};
    else
        xs = grid_values(spec.grid);

    ResultTable table(xs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < xs.size(); i = next++)
            table[i] = run_point(spec, base, xs[i], i);
    };
    unsigned n_workers = spec.workers ? spec.workers
                                      : std::thread::hardware_concurrency();
    n_workers = std::clamp<unsigned>(n_workers, 1u,
                                     static_cast<unsigned>(xs.size()));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < n_workers; ++w)
        pool.emplace_back(work);
    work();
    for (auto& t : pool)
        t.join();
    return table;
}

inline ResultTable run_power_sweep(ExperimentSpec spec, SystemConfig const& base)
{
    spec.kind = SweepKind::power_sweep;
    return run_sweep(spec, base);
}

inline ResultTable
run_threshold_sweep(ExperimentSpec spec, SystemConfig const& base)
{
    spec.kind = SweepKind::threshold_sweep;
    return run_sweep(spec, base);
}

/*!
 * Evaluate the config as given. The sweep variable column holds P_a in the
 * grid unit (dBm unless watts were asked for).
 */
inline ResultTable run_single_point(ExperimentSpec spec, SystemConfig const& base)
{
    spec.kind = SweepKind::single_point;
    spec.grid.start = spec.grid.unit == GridUnit::watts
                          ? base.P_a
                          : watts_to_dbm(base.P_a);
    return run_sweep(spec, base);
}

//! Index of the largest finite analytic (or simulated) R_d; -1 if none.
inline int argmax_R_d(ResultTable const& table, bool simulated = false)
{
    int best = -1;
    for (std::size_t i = 0; i < table.size(); ++i)
    {
        double const v = simulated ? table[i].R_d_sim : table[i].R_d_analytic;
        if (!std::isfinite(v))
            continue;
        double const cur = best < 0 ? -1.0
                           : simulated ? table[best].R_d_sim
                                       : table[best].R_d_analytic;
        if (v > cur)
            best = static_cast<int>(i);
    }
    return best;
}

//---------------------------------------------------------------------------//
// Presets
//---------------------------------------------------------------------------//
struct Preset
{
    std::string name;
    ExperimentSpec spec;
    SystemConfig config;
    //! Output file suffix appended to the stem of the requested path
    std::string tag;
};

/*!
 * Throughput versus transmit power with P_a = P_d.
 *
 * Powers are true dBm; the harvest only becomes significant near 40 dBm at
 * the default noise level, so the grid covers 40 to 60 dBm.
 */
inline std::vector<Preset> preset_fig2()
{
    Preset p;
    p.name = "fig2";
    p.spec.kind = SweepKind::power_sweep;
    p.spec.grid = {40, 60, 4, GridUnit::dBm};
    p.config.k = 1.0;
    p.config.E_t = 2.0;
    p.config.d_ac = 3;
    p.config.d_cd = 3;
    p.config.L = 400;
    return {p};
}

//! Secondary throughput versus E_t at two PT powers, L = 400.
inline std::vector<Preset> preset_fig3()
{
    std::vector<Preset> out;
    for (double pd_dbm : {50.0, 54.0})
    {
        Preset p;
        p.name = "fig3";
        p.spec.kind = SweepKind::threshold_sweep;
        p.spec.grid = {0.25, 5.0, 0.25, GridUnit::joules};
        p.config.P_d = dbm_to_watts(pd_dbm);
        p.config.k = 1.0;
        p.config.P_a = p.config.P_d;
        p.config.d_ac = 3;
        p.config.d_cd = 3;
        p.config.L = 400;
        char tag[32];
        std::snprintf(tag, sizeof tag, "_Pd%gdBm", pd_dbm);
        p.tag = tag;
        out.push_back(p);
    }
    // Distinct seeds across the two sweeps
    out[1].spec.seed_offset = 1000;
    return out;
}

inline std::vector<Preset> preset(std::string const& name)
{
    if (name == "fig2")
        return preset_fig2();
    if (name == "fig3")
        return preset_fig3();
    throw std::invalid_argument("unknown preset '" + name + "'");
}

//---------------------------------------------------------------------------//
// CSV
//---------------------------------------------------------------------------//
namespace detail
{
inline std::string fmt(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(std::string const& s)
{
    if (s == "nan")
        return ResultRow::nan;
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size())
        throw std::invalid_argument("bad number '" + s + "'");
    return v;
}
}  // namespace detail

inline void write_csv(ResultTable const& table, std::ostream& os)
{
    if (table.empty())
        throw std::invalid_argument("cannot emit an empty result table");
    using detail::fmt;
    os << kCsvHeader << ',' << kCsvExtraHeader << '\n';
    for (auto const& r : table)
    {
        os << fmt(r.sweep_var) << ',' << fmt(r.R_d_analytic) << ','
           << fmt(r.R_d_sim) << ',' << fmt(r.R_d_sim_stderr) << ','
           << fmt(r.R_b_analytic) << ',' << fmt(r.R_b_sim) << ','
           << fmt(r.R_b_sim_stderr) << ',' << fmt(r.P_od) << ','
           << fmt(r.P_ob) << ',' << fmt(r.baseline_primary) << ','
           << fmt(r.baseline_secondary) << ',' << r.s << ',' << r.seed << ','
           << fmt(r.P_od_sim) << ',' << fmt(r.P_ob_sim) << ','
           << (r.divergent ? 1 : 0) << ',' << detail::one_line(r.status)
           << '\n';
    }
}

inline std::string to_csv(ResultTable const& table)
{
    std::ostringstream os;
    write_csv(table, os);
    return os.str();
}

inline void emit_csv(ResultTable const& table, std::string const& path)
{
    if (table.empty())
        throw std::invalid_argument("cannot emit an empty result table to '"
                                    + path + "'");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(table, out);
    out.close();
    if (!out)
        throw std::runtime_error("write failed for '" + path + "'");
}

inline ResultTable parse_csv(std::istream& in)
{
    std::string line;
    std::string const expected = std::string(kCsvHeader) + ','
                                 + kCsvExtraHeader;
    if (!std::getline(in, line) || line != expected)
        throw std::invalid_argument("CSV header mismatch");
    ResultTable table;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            f.push_back(cell);
        if (f.size() != 17)
        {
            throw std::invalid_argument("CSV row has "
                                        + std::to_string(f.size())
                                        + " fields, expected 17");
        }
        using detail::parse_double;
        ResultRow r;
        r.sweep_var = parse_double(f[0]);
        r.R_d_analytic = parse_double(f[1]);
        r.R_d_sim = parse_double(f[2]);
        r.R_d_sim_stderr = parse_double(f[3]);
        r.R_b_analytic = parse_double(f[4]);
        r.R_b_sim = parse_double(f[5]);
        r.R_b_sim_stderr = parse_double(f[6]);
        r.P_od = parse_double(f[7]);
        r.P_ob = parse_double(f[8]);
        r.baseline_primary = parse_double(f[9]);
        r.baseline_secondary = parse_double(f[10]);
        r.s = std::stoi(f[11]);
        r.seed = std::stoull(f[12]);
        r.P_od_sim = parse_double(f[13]);
        r.P_ob_sim = parse_double(f[14]);
        r.divergent = f[15] == "1";
        r.status = f[16];
        table.push_back(std::move(r));
    }
    if (table.empty())
        throw std::invalid_argument("CSV has no rows");
    return table;
}

inline ResultTable read_csv_file(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    return parse_csv(in);
}

//! Gnuplot script plotting throughput columns of a result CSV.
inline std::string gnuplot_script(std::string const& csv_path, SweepKind kind)
{
    std::string const xlabel = kind == SweepKind::threshold_sweep
                                   ? "E_t (J)"
                                   : "P_a (dBm)";
    std::ostringstream os;
    os << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set xlabel '" << xlabel << "'\n"
       << "set ylabel 'throughput (bits/s/Hz)'\n"
       << "set grid\n"
       << "plot '" << csv_path << "' using 1:2 with lines title 'R_d analytic', \\\n"
       << "     '' using 1:3:4 with yerrorbars title 'R_d sim', \\\n"
       << "     '' using 1:5 with lines title 'R_b analytic', \\\n"
       << "     '' using 1:6:7 with yerrorbars title 'R_b sim', \\\n"
       << "     '' using 1:10 with lines dashtype 2 title 'baseline primary', \\\n"
       << "     '' using 1:11 with lines dashtype 3 title 'baseline secondary'\n";
    return os.str();
}

}  // namespace experiment
}  // namespace fdcr
