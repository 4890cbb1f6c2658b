// SPDX-License-Identifier: Apache-2.0
//
// ramix - rotatable-antenna mixed near-field/far-field simulator

#ifndef RAMIX_CONFIG_HPP
#define RAMIX_CONFIG_HPP

#include "ramix/optimizer.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ramix
{
    // Sectioned key/value text format. Units live in the key names and powers stay in dBm here;
    // conversion to watts happens in build_scenario so writing and re-reading is lossless.

    struct ArrayBlock
    {
        int n_antennas = 129;
        int n_subarrays = 5;
        double carrier_ghz = 24.0;
        double spacing_mm = 0.0; // 0 selects half a wavelength

        bool operator==(const ArrayBlock &) const = default;
    };

    struct ExplicitNearUser
    {
        double theta_deg = 90.0;
        double range_zray = 0.1;

        bool operator==(const ExplicitNearUser &) const = default;
    };

    struct UsersBlock
    {
        int n_near = 3;
        int n_far = 2;
        double near_range_min_zray = 0.03;
        double near_range_max_zray = 0.2;
        double angle_min_deg = 60.0;
        double angle_max_deg = 120.0;
        double far_range_zray = 1.5;
        int nlos_paths = 3;
        double nlos_gain_ratio = 0.1; // scatterer amplitude relative to the line-of-sight path
        // When nonempty these replace the sampled positions (scatterers are still sampled)
        std::vector<ExplicitNearUser> near_users;
        std::vector<double> far_users_deg;

        bool operator==(const UsersBlock &) const = default;
    };

    struct PowersBlock
    {
        double budget_dbm = 30.0;
        double far_power_dbm = 30.0;
        double noise_dbm = -70.0;

        bool operator==(const PowersBlock &) const = default;
    };

    struct RotationBlock
    {
        double min_deg = -30.0;
        double max_deg = 30.0;
        bool strict_obtuse = false;

        bool operator==(const RotationBlock &) const = default;
    };

    struct ScaBlock
    {
        int max_iters = 50;
        double tol_bps = 1e-4;
        double subsolver_tol = 1e-8;
        int subsolver_max_iters = 5000;

        bool operator==(const ScaBlock &) const = default;
    };

    struct PsoBlock
    {
        int swarm = 100;
        int iters = 100;
        double inertia = 0.7298;
        double c1 = 1.4962;
        double c2 = 1.4962;
        double penalty_bps = 100.0;
        double velocity_clamp_frac = 0.5;
        double angle_quantum_rad = 1e-4;

        bool operator==(const PsoBlock &) const = default;
    };

    enum class Scale
    {
        config, // use the configured swarm, iterations and seed count
        desk,   // S = 30, T = 40, 5 seeds
        full    // S = 100, T = 100, 20 seeds
    };

    struct RunBlock
    {
        std::uint64_t seed = 1;
        Scale scale = Scale::config;
        DistanceModel distance_model = DistanceModel::taylor;
        std::vector<std::string> schemes{"proposed"};

        bool operator==(const RunBlock &) const = default;
    };

    struct AnalyzeBlock
    {
        std::string recipe;      // fig2 .. fig6, mixed-angle, mixed-distance
        double phi_step_pi = 0.001;
        int points = 61;         // samples along the swept user parameter

        bool operator==(const AnalyzeBlock &) const = default;
    };

    enum class SweepParameter
    {
        tx_power,
        far_power,
        n_near,
        n_far
    };

    struct SweepBlock
    {
        SweepParameter parameter = SweepParameter::tx_power;
        std::vector<double> values;
        std::vector<std::string> schemes;
        int seeds = 5;

        bool operator==(const SweepBlock &) const = default;
    };

    struct ScenarioConfig
    {
        ArrayBlock array;
        UsersBlock users;
        PowersBlock powers;
        RotationBlock rotation;
        ScaBlock sca;
        PsoBlock pso;
        RunBlock run;
        AnalyzeBlock analyze;
        SweepBlock sweep;

        bool operator==(const ScenarioConfig &) const = default;
    };

    std::string_view to_string(SweepParameter p);
    std::string_view to_string(Scale s);

    // Throws ConfigError naming the line and field. Lines prefixed "#cfg " are read as config lines,
    // and when any are present every other line is ignored, so an emitted CSV parses as its own config.
    ScenarioConfig parse_config(std::string_view text);
    ScenarioConfig load_config(const std::string &path);

    // Canonical text form; parse_config(write_config(c)) == c
    std::string write_config(const ScenarioConfig &cfg);

    // Semantic checks beyond syntax (odd sizes, ordered ranges, known schemes); throws ConfigError
    void check_config(const ScenarioConfig &cfg);

    double dbm_to_watts(double dbm);

    ArrayConfig make_array(const ArrayBlock &block);
    ScaConfig make_sca(const ScenarioConfig &cfg);
    PsoConfig make_pso(const ScenarioConfig &cfg, int threads);

    // Users come from per-user random streams keyed by (seed, role, index), so growing
    // n_near or n_far keeps the existing users in place.
    Scenario build_scenario(const ScenarioConfig &cfg, std::uint64_t seed);
}

#endif
