//---------------------------------------------------------------------------//
// Copyright fdcr contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file tools/fdcr_cli.cpp
//! Run throughput sweeps and write CSV tables.
//---------------------------------------------------------------------------//
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdcr/fdcr.hpp"

namespace
{
using namespace fdcr;

struct Options
{
    std::string config_path;
    std::string experiment{"fig2"};
    std::string engine{"both"};
    std::optional<std::int64_t> blocks;
    std::optional<std::uint64_t> seed;
    std::optional<int> levels;
    std::string out{"-"};
    std::string interference{"exact"};
    std::string battery{"continuous"};
    unsigned workers{0};

    // custom experiments
    std::string sweep{"power"};
    double start{40};
    double stop{60};
    double step{4};
    std::string unit;

    std::string dump_chain;
    std::string trace;
};

//! Insert the preset tag before the extension: out.csv -> out_tag.csv
std::string tagged_path(std::string const& path, std::string const& tag)
{
    if (tag.empty())
        return path;
    std::filesystem::path p(path);
    auto stem = p.stem().string() + tag;
    return (p.parent_path() / (stem + p.extension().string())).string();
}

std::vector<experiment::Preset> build_presets(Options const& o)
{
    std::vector<experiment::Preset> presets;
    if (o.experiment == "custom")
    {
        experiment::Preset p;
        p.name = "custom";
        static std::map<std::string, SweepKind> const kinds{
            {"power", SweepKind::power_sweep},
            {"threshold", SweepKind::threshold_sweep},
            {"single", SweepKind::single_point},
        };
        p.spec.kind = kinds.at(o.sweep);
        GridUnit unit = p.spec.kind == SweepKind::threshold_sweep
                            ? GridUnit::joules
                            : GridUnit::dBm;
        if (o.unit == "dBm")
            unit = GridUnit::dBm;
        else if (o.unit == "W")
            unit = GridUnit::watts;
        else if (o.unit == "J")
            unit = GridUnit::joules;
        p.spec.grid = {o.start, o.stop, o.step, unit};
        presets.push_back(p);
    }
    else
    {
        presets = experiment::preset(o.experiment);
    }

    for (auto& p : presets)
    {
        if (!o.config_path.empty())
            p.config = config_io::read_config_file(o.config_path, p.config);
        if (o.levels)
            p.config.L = *o.levels;
        if (o.blocks)
            p.spec.blocks = *o.blocks;
        if (o.seed)
            p.spec.seed = *o.seed;
        p.spec.workers = o.workers;
        p.spec.run_analytic = o.engine != "sim";
        p.spec.run_simulation = o.engine != "analytic";
        p.spec.interference = o.interference == "off" ? Interference::off
                                                      : Interference::exact;
        p.spec.battery = o.battery == "discretized" ? BatteryMode::discretized
                                                    : BatteryMode::continuous;
        if (p.spec.kind == SweepKind::single_point)
        {
            p.spec.grid.start = p.spec.grid.unit == GridUnit::watts
                                    ? p.config.P_a
                                    : watts_to_dbm(p.config.P_a);
        }
    }
    return presets;
}

//! Debug outputs for the first point of the first sweep.
void write_debug(Options const& o, experiment::Preset const& p)
{
    if (o.dump_chain.empty() && o.trace.empty())
        return;
    double const x0 = p.spec.kind == SweepKind::single_point
                          ? p.spec.grid.start
                          : experiment::grid_values(p.spec.grid).front();
    auto const cfg = validate(experiment::point_config(p.spec, p.config, x0));
    if (!o.dump_chain.empty())
    {
        auto const sol = throughput::solve_chain(cfg);
        markov::dump_chain_csv(sol.V, sol.pi, o.dump_chain);
        std::cerr << "chain for sweep_var=" << x0 << " written to "
                  << o.dump_chain << '\n';
    }
    if (!o.trace.empty())
    {
        std::ofstream tr(o.trace);
        if (!tr)
            throw std::runtime_error("cannot open '" + o.trace + "'");
        SimOptions opts;
        opts.n_blocks = p.spec.blocks;
        opts.seed = p.spec.seed + p.spec.seed_offset;
        opts.battery_mode = p.spec.battery;
        opts.interference = p.spec.interference;
        opts.record_histogram = false;
        opts.trace = &tr;
        montecarlo::run_simulation(cfg, make_battery(cfg), opts);
        std::cerr << "trace for sweep_var=" << x0 << " written to " << o.trace
                  << '\n';
    }
}

int run(Options const& o)
{
    auto const presets = build_presets(o);
    int status = 0;
    for (auto const& p : presets)
    {
        auto const table = experiment::run_sweep(p.spec, p.config);
        if (o.out == "-")
        {
            experiment::write_csv(table, std::cout);
        }
        else
        {
            auto const path = tagged_path(o.out, p.tag);
            experiment::emit_csv(table, path);
            std::cerr << "wrote " << table.size() << " rows to " << path
                      << '\n';
        }

        int n_err = 0;
        int n_div = 0;
        for (auto const& r : table)
        {
            n_err += r.status != "ok";
            n_div += r.divergent;
            if (r.status != "ok")
                std::cerr << "sweep_var=" << r.sweep_var << ": " << r.status
                          << '\n';
        }
        if (n_div)
            std::cerr << n_div << " row(s) flagged divergent\n";
        if (n_err)
            status = 2;

        if (p.spec.kind == SweepKind::threshold_sweep)
        {
            bool const sim_only = !p.spec.run_analytic;
            int const best = experiment::argmax_R_d(table, sim_only);
            if (best >= 0)
            {
                auto const& r = table[best];
                std::cerr << p.name << p.tag << ": argmax E_t = "
                          << r.sweep_var << " (R_d = "
                          << (sim_only ? r.R_d_sim : r.R_d_analytic) << ")\n";
            }
        }
    }
    if (!presets.empty())
        write_debug(o, presets.front());
    return status;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Throughput sweeps for a full-duplex cooperative cognitive "
                 "radio link with an energy-harvesting secondary transmitter"};
    app.require_subcommand(0, 1);

    Options o;
    app.add_option("--config", o.config_path, "key = value config file")
        ->check(CLI::ExistingFile);
    app.add_option("--experiment", o.experiment, "preset or custom")
        ->check(CLI::IsMember({"fig2", "fig3", "custom"}))
        ->capture_default_str();
    app.add_option("--engine", o.engine)
        ->check(CLI::IsMember({"analytic", "sim", "both"}))
        ->capture_default_str();
    app.add_option("--blocks", o.blocks, "simulated blocks per point")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "base seed");
    app.add_option("--levels", o.levels, "battery levels L")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", o.out, "CSV path, - for stdout")
        ->capture_default_str();
    app.add_option("--interference", o.interference,
                   "ST interference at the PR in the simulation")
        ->check(CLI::IsMember({"exact", "off"}))
        ->capture_default_str();
    app.add_option("--battery", o.battery, "simulated battery model")
        ->check(CLI::IsMember({"continuous", "discretized"}))
        ->capture_default_str();
    app.add_option("--workers", o.workers, "threads, 0 = all cores")
        ->capture_default_str();

    auto* custom = app.add_option_group("custom", "--experiment custom");
    custom->add_option("--sweep", o.sweep)
        ->check(CLI::IsMember({"power", "threshold", "single"}))
        ->capture_default_str();
    custom->add_option("--start", o.start)->capture_default_str();
    custom->add_option("--stop", o.stop)->capture_default_str();
    custom->add_option("--step", o.step)->capture_default_str();
    custom->add_option("--unit", o.unit, "dBm, W or J")
        ->check(CLI::IsMember({"dBm", "W", "J"}));

    app.add_option("--dump-chain", o.dump_chain,
                   "write V and pi of the first point as CSV");
    app.add_option("--trace", o.trace,
                   "write a per-block simulation trace of the first point");

    auto* gp = app.add_subcommand("gnuplot", "print a gnuplot script for a CSV");
    std::string gp_csv;
    std::string gp_kind{"power"};
    gp->add_option("csv", gp_csv, "result CSV")->required();
    gp->add_option("--kind", gp_kind)
        ->check(CLI::IsMember({"power", "threshold"}))
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (gp->parsed())
        {
            std::cout << experiment::gnuplot_script(
                gp_csv, gp_kind == "threshold" ? SweepKind::threshold_sweep
                                               : SweepKind::power_sweep);
            return 0;
        }
        return run(o);
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
