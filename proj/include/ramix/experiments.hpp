// SPDX-License-Identifier: Apache-2.0
//
// ramix - rotatable-antenna mixed near-field/far-field simulator

#ifndef RAMIX_EXPERIMENTS_HPP
#define RAMIX_EXPERIMENTS_HPP

#include "ramix/config.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ramix
{
    inline constexpr std::string_view version = "0.1.0";

    struct CsvTable
    {
        std::vector<std::string> columns;
        std::vector<std::vector<std::string>> rows;
    };

    // 12 significant digits
    std::string format_value(double v);

    // Header block (version, command, full config echo as "#cfg " lines), column row, data rows
    std::string render_csv(const ScenarioConfig &cfg, std::string_view command, const CsvTable &table);

    // ---- analyze: uniform rotation, two users ---------------------------------------------------

    std::vector<std::string> analyze_recipes();

    // Throws ConfigError for an unknown recipe
    CsvTable run_analyze(const ScenarioConfig &cfg);

    // ---- optimize -------------------------------------------------------------------------------

    struct OptimizeOutput
    {
        CsvTable table;
        std::vector<OptimizerReport> reports;
    };

    OptimizeOutput run_optimize(const ScenarioConfig &cfg, int threads);
    std::string summary_table(const std::vector<OptimizerReport> &reports);

    // ---- sweep ----------------------------------------------------------------------------------

    std::vector<std::string> sweep_recipes();

    // Fills the [sweep] block for a named recipe; throws ConfigError for an unknown name
    ScenarioConfig apply_sweep_recipe(ScenarioConfig cfg, std::string_view recipe);

    // Resolves desk/full into explicit swarm, iteration and seed counts; the result has scale = config
    ScenarioConfig apply_scale(ScenarioConfig cfg, Scale scale);

    // One row per (scheme, value): mean, min and max sum-rate over seeds run.seed, run.seed + 1, ...
    // Throws ConfigError when the scheme or value list is empty.
    CsvTable run_sweep(const ScenarioConfig &cfg, int threads);
}

#endif
