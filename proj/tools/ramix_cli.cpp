// SPDX-License-Identifier: Apache-2.0
//
// ramix - rotatable-antenna mixed near-field/far-field simulator
//
// Command line front end: analyze, optimize, sweep, validate-config.

#include "ramix/errors.hpp"
#include "ramix/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

namespace
{
    constexpr int exit_config = 2;
    constexpr int exit_solver = 3;

    struct Options
    {
        std::string config;
        std::string recipe;
        std::optional<std::uint64_t> seed;
        std::string out;
        bool full = false;
        int threads = 1;
        bool strict_obtuse = false;
    };

    ramix::ScenarioConfig load(const Options &o)
    {
        ramix::ScenarioConfig cfg = o.config.empty() ? ramix::ScenarioConfig{} : ramix::load_config(o.config);
        if (o.seed)
            cfg.run.seed = *o.seed;
        if (o.strict_obtuse)
            cfg.rotation.strict_obtuse = true;
        return cfg;
    }

    void emit(const Options &o, const std::string &csv)
    {
        if (o.out.empty())
        {
            std::cout << csv;
            return;
        }
        std::ofstream f(o.out, std::ios::binary);
        if (!f)
            throw ramix::ConfigError("cannot write output file '" + o.out + "'");
        f << csv;
    }

    int analyze(const Options &o)
    {
        ramix::ScenarioConfig cfg = load(o);
        if (!o.recipe.empty())
            cfg.analyze.recipe = o.recipe;
        if (cfg.analyze.recipe.empty())
            throw ramix::ConfigError("analyze needs --recipe or [analyze] recipe", 0, "analyze.recipe");
        const ramix::CsvTable t = ramix::run_analyze(cfg);
        emit(o, ramix::render_csv(cfg, "analyze", t));
        return 0;
    }

    int optimize(const Options &o)
    {
        ramix::ScenarioConfig cfg = load(o);
        if (o.full)
            cfg = ramix::apply_scale(cfg, ramix::Scale::full);
        else
            cfg = ramix::apply_scale(cfg, cfg.run.scale);
        const ramix::OptimizeOutput res = ramix::run_optimize(cfg, o.threads);
        emit(o, ramix::render_csv(cfg, "optimize", res.table));
        (o.out.empty() ? std::cerr : std::cout) << ramix::summary_table(res.reports);
        return 0;
    }

    int sweep(const Options &o)
    {
        ramix::ScenarioConfig cfg = load(o);
        ramix::Scale scale = cfg.run.scale;
        if (!o.recipe.empty())
        {
            cfg = ramix::apply_sweep_recipe(cfg, o.recipe);
            if (scale == ramix::Scale::config)
                scale = ramix::Scale::desk;
        }
        if (o.full)
            scale = ramix::Scale::full;
        cfg = ramix::apply_scale(cfg, scale);
        const ramix::CsvTable t = ramix::run_sweep(cfg, o.threads);
        emit(o, ramix::render_csv(cfg, "sweep", t));
        return 0;
    }

    int validate(const Options &o)
    {
        const ramix::ScenarioConfig cfg = load(o);
        ramix::check_config(cfg);
        const ramix::Scenario s = ramix::build_scenario(cfg, cfg.run.seed);
        std::cout << "ok: N=" << s.array.n_antennas << " Q=" << s.array.n_subarrays << " K=" << s.n_near()
                  << " M=" << s.n_far() << " Rayleigh distance " << s.array.rayleigh_m() << " m\n";
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"ramix: rotatable-antenna mixed near-field/far-field simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ramix::version));

    Options o;
    auto common = [&](CLI::App *sub)
    {
        sub->add_option("--config", o.config, "scenario config file (an emitted CSV also works)");
        sub->add_option("--seed", o.seed, "override [run] seed");
        sub->add_option("--out", o.out, "write CSV here instead of stdout");
        sub->add_option("--threads", o.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
        sub->add_flag("--strict-obtuse", o.strict_obtuse, "always apply the obtuse-angle penalty");
    };

    CLI::App *an = app.add_subcommand("analyze", "uniform-rotation interference and two-user rate curves");
    common(an);
    an->add_option("--recipe", o.recipe, "fig2, fig3, fig4, fig5, fig6, mixed-angle or mixed-distance");

    CLI::App *op = app.add_subcommand("optimize", "run the configured schemes on one scenario");
    common(op);
    op->add_flag("--full", o.full, "full-scale swarm (S = T = 100)");

    CLI::App *sw = app.add_subcommand("sweep", "sum-rate sweeps averaged over seeds");
    common(sw);
    sw->add_option("--recipe", o.recipe, "fig7 (power), fig8 (far power), fig9 (near users), fig10 (far users)");
    sw->add_flag("--full", o.full, "full scale instead of desk scale");

    CLI::App *va = app.add_subcommand("validate-config", "parse and check a config file");
    common(va);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (o.threads == 0)
            o.threads = int(std::max(1u, std::thread::hardware_concurrency()));
        if (an->parsed())
            return analyze(o);
        if (op->parsed())
            return optimize(o);
        if (sw->parsed())
            return sweep(o);
        return validate(o);
    }
    catch (const ramix::SolverError &e)
    {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return exit_solver;
    }
    catch (const ramix::ConfigError &e)
    {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    }
    catch (const ramix::ValidationError &e)
    {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    }
    catch (const ramix::DomainError &e)
    {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
