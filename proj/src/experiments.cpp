// SPDX-License-Identifier: Apache-2.0
//
// ramix - rotatable-antenna mixed near-field/far-field simulator

#include "ramix/experiments.hpp"
#include "ramix/errors.hpp"
#include "ramix/interference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

namespace ramix
{
    std::string format_value(double v)
    {
        if (std::isnan(v))
            return "nan";
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
        return buf;
    }

    std::string render_csv(const ScenarioConfig &cfg, std::string_view command, const CsvTable &table)
    {
        std::string out = "# ramix " + std::string(version) + "\n# command: " + std::string(command) + "\n";
        std::istringstream echo(write_config(cfg));
        for (std::string line; std::getline(echo, line);)
            out += "#cfg " + line + "\n";
        for (std::size_t i = 0; i < table.columns.size(); ++i)
            out += (i ? "," : "") + table.columns[i];
        out += "\n";
        for (const auto &row : table.rows)
        {
            for (std::size_t i = 0; i < row.size(); ++i)
                out += (i ? "," : "") + row[i];
            out += "\n";
        }
        return out;
    }

    namespace
    {
        constexpr double deg = pi / 180.0;

        std::vector<double> linspace(double lo, double hi, int n)
        {
            std::vector<double> v;
            for (int i = 0; i < n; ++i)
                v.push_back(n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1));
            return v;
        }

        std::vector<double> phi_grid(const ScenarioConfig &cfg)
        {
            const double lo = cfg.rotation.min_deg * deg, hi = cfg.rotation.max_deg * deg;
            const double step = cfg.analyze.phi_step_pi * pi;
            std::vector<double> g;
            const int n = int(std::floor((hi - lo) / step + 1e-9));
            for (int i = 0; i <= n; ++i)
                g.push_back(lo + step * double(i));
            if (g.empty())
                g.push_back(lo);
            return g;
        }

        // Two-user placement for the rate recipes; far_psi < 0 means a second near user
        struct Pair
        {
            double theta_k, r_k_zray;
            double theta_i, r_i_zray; // second near user
            double psi = -1.0;        // far user
        };

        Scenario pair_scenario(const ScenarioConfig &cfg, const ArrayConfig &array, const Pair &p)
        {
            Scenario s;
            s.array = array;
            s.noise_w = dbm_to_watts(cfg.powers.noise_dbm);
            s.budget_w = dbm_to_watts(cfg.powers.budget_dbm);
            s.rotation_ranges = {AngleRange{cfg.rotation.min_deg * deg, cfg.rotation.max_deg * deg}};
            const double z = array.rayleigh_m(), lambda = array.wavelength();
            auto near = [&](double theta, double rz)
            {
                NearUser u;
                u.theta_rad = theta;
                u.range_m = rz * z;
                u.los_gain = free_space_amplitude(lambda, u.range_m);
                return u;
            };
            s.near_users.push_back(near(p.theta_k, p.r_k_zray));
            if (p.psi < 0.0)
                s.near_users.push_back(near(p.theta_i, p.r_i_zray));
            else
            {
                FarUser f;
                f.psi_rad = p.psi;
                f.range_m = cfg.users.far_range_zray * z;
                f.los_gain = free_space_amplitude(lambda, f.range_m);
                f.tx_power_w = dbm_to_watts(cfg.powers.far_power_dbm);
                s.far_users.push_back(f);
            }
            return s;
        }

        struct RateAt
        {
            double rate;
            double rho;
        };

        RateAt rate_at(const ScenarioConfig &cfg, const Scenario &s, double phi)
        {
            const RotationState rot = RotationState::uniform(1, phi, s.rotation_ranges.front());
            const ChannelSet ch = synthesize_channels(s.array, rot, s, cfg.run.distance_model);
            const PrecoderSet pre = build_precoders(ch, DigitalMode::identity);
            const PowerAllocation alloc = PowerAllocation::equal(s.n_near(), s.budget_w);
            const NearUser &u = s.near_users[0];
            const double rho = s.far_users.empty()
                                   ? rho_nn_exact(s.array, phi, u.theta_rad, u.range_m, s.near_users[1].theta_rad,
                                                  s.near_users[1].range_m)
                                   : rho_nf_exact(s.array, phi, u.theta_rad, u.range_m, s.far_users[0].psi_rad);
            return {evaluate_rates(ch, pre, alloc, s).sum_rate, rho};
        }

        CsvTable interference_rows(const ScenarioConfig &cfg, const ArrayConfig &array, bool mixed, double theta,
                                   double r_k, double other_angle, double r_i)
        {
            CsvTable t;
            t.columns = {"kind", "phi_rad", "theta_k_rad", "r_k_m", "theta_i_or_psi_rad", "r_i_m",
                         "exact", "approx", "beta1", "beta2", "phi_closed_form_rad"};
            const AngleRange range{cfg.rotation.min_deg * deg, cfg.rotation.max_deg * deg};
            const double closed = mixed ? optimal_rotation_same_angle_nf(other_angle, range)
                                        : optimal_rotation_same_angle_nn(theta, range);
            const bool same_angle = theta == other_angle;
            for (double phi : phi_grid(cfg))
            {
                const InterferenceReport rep = mixed ? analyze_nf(array, phi, theta, r_k, other_angle)
                                                     : analyze_nn(array, phi, theta, r_k, other_angle, r_i);
                t.rows.push_back({mixed ? "nf" : "nn", format_value(phi), format_value(theta), format_value(r_k),
                                  format_value(other_angle), mixed ? "" : format_value(r_i), format_value(rep.exact),
                                  format_value(rep.fresnel_approx), rep.betas ? format_value(rep.betas->beta1) : "",
                                  rep.betas ? format_value(rep.betas->beta2) : "",
                                  same_angle ? format_value(closed) : ""});
            }
            return t;
        }

        CsvTable rate_rows(const ScenarioConfig &cfg, const ArrayConfig &array, const std::string &swept,
                           const std::vector<double> &values, const std::function<Pair(double)> &place)
        {
            CsvTable t;
            t.columns = {"kind", "swept", "value", "rate_fixed", "rate_rotated", "phi_best_rad", "rate_bound",
                         "rho_fixed", "rho_rotated"};
            const std::vector<double> grid = phi_grid(cfg);
            for (double v : values)
            {
                const Pair p = place(v);
                const Scenario s = pair_scenario(cfg, array, p);
                const RateAt fixed = rate_at(cfg, s, std::clamp(0.0, grid.front(), grid.back()));
                RateAt best{-std::numeric_limits<double>::infinity(), 0.0};
                double phi_best = 0.0;
                for (double phi : grid)
                {
                    const RateAt r = rate_at(cfg, s, phi);
                    if (r.rate > best.rate)
                    {
                        best = r;
                        phi_best = phi;
                    }
                }
                const RotationState rot0 = RotationState::uniform(1, 0.0, s.rotation_ranges.front());
                const double bound = interference_free_bound(synthesize_channels(array, rot0, s, cfg.run.distance_model),
                                                             PowerAllocation::equal(s.n_near(), s.budget_w), s);
                t.rows.push_back({p.psi < 0.0 ? "nn" : "nf", swept, format_value(v), format_value(fixed.rate),
                                  format_value(best.rate), format_value(phi_best), format_value(bound),
                                  format_value(fixed.rho), format_value(best.rho)});
            }
            return t;
        }
    }

    std::vector<std::string> analyze_recipes()
    {
        return {"fig2", "fig3", "fig4", "fig5", "fig6", "mixed-angle", "mixed-distance"};
    }

    CsvTable run_analyze(const ScenarioConfig &cfg)
    {
        check_config(cfg);
        ArrayConfig array = make_array(cfg.array);
        array.n_subarrays = 1;
        const double z = array.rayleigh_m();
        const std::string &r = cfg.analyze.recipe;
        const int n = cfg.analyze.points;
        const double a_lo = cfg.users.angle_min_deg * deg, a_hi = cfg.users.angle_max_deg * deg;
        const double r_lo = cfg.users.near_range_min_zray, r_hi = cfg.users.near_range_max_zray;

        if (r == "fig2")
            return interference_rows(cfg, array, false, 0.6 * pi, 0.03 * z, 0.6 * pi, 0.08 * z);
        if (r == "fig6")
            return interference_rows(cfg, array, true, 0.6 * pi, 0.1 * z, 0.6 * pi, 0.0);
        if (r == "fig3")
            return rate_rows(cfg, array, "theta_k_rad", linspace(a_lo, a_hi, n),
                             [](double v) { return Pair{v, 0.03, 0.6 * pi, 0.08}; });
        if (r == "fig4")
            return rate_rows(cfg, array, "theta_k_rad", linspace(a_lo, a_hi, n),
                             [](double v) { return Pair{v, 0.05, 0.6 * pi, 0.05}; });
        if (r == "fig5")
            return rate_rows(cfg, array, "r_k_zray", linspace(r_lo, r_hi, n),
                             [](double v) { return Pair{0.55 * pi, v, 0.6 * pi, 0.03}; });
        if (r == "mixed-angle")
            return rate_rows(cfg, array, "psi_rad", linspace(a_lo, a_hi, n),
                             [](double v) { return Pair{0.55 * pi, 0.03, 0.0, 0.0, v}; });
        if (r == "mixed-distance")
            return rate_rows(cfg, array, "r_k_zray", linspace(r_lo, r_hi, n),
                             [](double v) { return Pair{0.55 * pi, v, 0.0, 0.0, 0.6 * pi}; });
        throw ConfigError("unknown analyze recipe '" + r + "'", 0, "analyze.recipe");
    }

    namespace
    {
        std::string join_values(const std::vector<double> &v, double scale)
        {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i)
                s += (i ? ";" : "") + format_value(v[i] * scale);
            return s;
        }

        // Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the first failure by index
        void fan_out(std::size_t n, int threads, const std::function<void(std::size_t)> &fn)
        {
            const std::size_t workers = std::min<std::size_t>(n, std::size_t(std::max(1, threads)));
            std::vector<std::exception_ptr> errors(n);
            std::atomic<std::size_t> next{0};
            auto work = [&]
            {
                for (std::size_t i = next++; i < n; i = next++)
                    try
                    {
                        fn(i);
                    }
                    catch (...)
                    {
                        errors[i] = std::current_exception();
                    }
            };
            if (workers <= 1)
                work();
            else
            {
                std::vector<std::thread> pool;
                for (std::size_t w = 0; w < workers; ++w)
                    pool.emplace_back(work);
                for (auto &t : pool)
                    t.join();
            }
            for (auto &e : errors)
                if (e)
                    std::rethrow_exception(e);
        }
    }

    OptimizeOutput run_optimize(const ScenarioConfig &cfg, int threads)
    {
        check_config(cfg);
        if (cfg.run.schemes.empty())
            throw ConfigError("run.schemes: the scheme list is empty", 0, "run.schemes");
        const Scenario scenario = build_scenario(cfg, cfg.run.seed);
        const ScaConfig sca = make_sca(cfg);
        const PsoConfig pso = make_pso(cfg, threads);

        OptimizeOutput out;
        out.table.columns = {"scheme", "row", "fitness", "sum_rate", "inner_iters", "angles_deg", "powers_w",
                             "near_leakage", "evaluations"};
        for (const std::string &name : cfg.run.schemes)
        {
            OptimizerReport rep = run_benchmark(parse_scheme(name), scenario, sca, pso);
            for (std::size_t t = 0; t < rep.sum_rate_trace.size(); ++t)
                out.table.rows.push_back({rep.scheme, std::to_string(t), format_value(rep.sum_rate_trace[t]), "",
                                          std::to_string(rep.inner_iters_used[t]), "", "", "", ""});
            out.table.rows.push_back({rep.scheme, "summary", format_value(rep.fitness), format_value(rep.rates.sum_rate),
                                      "", join_values(rep.best_angles, 180.0 / pi),
                                      join_values(rep.best_alloc.near_powers_w, 1.0), format_value(rep.near_leakage),
                                      std::to_string(rep.evaluations)});
            out.reports.push_back(std::move(rep));
        }
        return out;
    }

    std::string summary_table(const std::vector<OptimizerReport> &reports)
    {
        std::string out;
        char buf[256];
        std::snprintf(buf, sizeof buf, "%-12s %12s %10s %8s %9s  %s\n", "scheme", "sum-rate", "leakage", "evals",
                      "time[s]", "angles[deg]");
        out += buf;
        for (const OptimizerReport &r : reports)
        {
            std::snprintf(buf, sizeof buf, "%-12s %12.6f %10.3e %8ld %9.3f  ", r.scheme.c_str(), r.rates.sum_rate,
                          r.near_leakage, r.evaluations, r.wall_time_s);
            out += buf;
            out += join_values(r.best_angles, 180.0 / pi) + "\n";
        }
        return out;
    }

    std::vector<std::string> sweep_recipes() { return {"fig7", "fig8", "fig9", "fig10"}; }

    ScenarioConfig apply_sweep_recipe(ScenarioConfig cfg, std::string_view recipe)
    {
        cfg.sweep.schemes = {"fa-zf", "fa-opa", "ra-epa", "proposed", "proposed-q1"};
        if (recipe == "fig7")
        {
            cfg.sweep.parameter = SweepParameter::tx_power;
            cfg.sweep.values = {10, 15, 20, 25, 30};
        }
        else if (recipe == "fig8")
        {
            cfg.sweep.parameter = SweepParameter::far_power;
            cfg.sweep.values = {10, 15, 20, 25, 30};
        }
        else if (recipe == "fig9")
        {
            cfg.sweep.parameter = SweepParameter::n_near;
            cfg.sweep.values = {2, 3, 4, 5, 6};
        }
        else if (recipe == "fig10")
        {
            cfg.sweep.parameter = SweepParameter::n_far;
            cfg.sweep.values = {1, 2, 3, 4, 5};
        }
        else
            throw ConfigError("unknown sweep recipe '" + std::string(recipe) + "'", 0, "sweep.recipe");
        return cfg;
    }

    ScenarioConfig apply_scale(ScenarioConfig cfg, Scale scale)
    {
        if (scale == Scale::desk)
        {
            cfg.pso.swarm = 30;
            cfg.pso.iters = 40;
            cfg.sweep.seeds = 5;
        }
        else if (scale == Scale::full)
        {
            cfg.pso.swarm = 100;
            cfg.pso.iters = 100;
            cfg.sweep.seeds = 20;
        }
        cfg.run.scale = Scale::config;
        return cfg;
    }

    CsvTable run_sweep(const ScenarioConfig &cfg, int threads)
    {
        check_config(cfg);
        if (cfg.sweep.schemes.empty())
            throw ConfigError("sweep.schemes: the scheme list is empty", 0, "sweep.schemes");
        if (cfg.sweep.values.empty())
            throw ConfigError("sweep.values: the value list is empty", 0, "sweep.values");
        std::vector<Scheme> schemes;
        for (const std::string &s : cfg.sweep.schemes)
            schemes.push_back(parse_scheme(s));

        std::vector<ScenarioConfig> point_cfgs;
        for (double v : cfg.sweep.values)
        {
            ScenarioConfig c = cfg;
            switch (cfg.sweep.parameter)
            {
            case SweepParameter::tx_power:
                c.powers.budget_dbm = v;
                break;
            case SweepParameter::far_power:
                c.powers.far_power_dbm = v;
                break;
            case SweepParameter::n_near:
            case SweepParameter::n_far:
                if (v < 0.0 || v != std::floor(v))
                    throw ConfigError("sweep.values: user counts must be nonnegative integers", 0, "sweep.values");
                (cfg.sweep.parameter == SweepParameter::n_near ? c.users.n_near : c.users.n_far) = int(v);
                break;
            }
            check_config(c);
            point_cfgs.push_back(std::move(c));
        }

        const std::size_t nv = point_cfgs.size(), ns = schemes.size(), nseed = std::size_t(cfg.sweep.seeds);
        const ScaConfig sca = make_sca(cfg);
        std::vector<double> rate(nv * ns * nseed), leak(nv * ns * nseed);
        fan_out(nv * ns * nseed, threads,
                [&](std::size_t idx)
                {
                    const std::size_t seed_i = idx % nseed, scheme_i = (idx / nseed) % ns, v_i = idx / (nseed * ns);
                    const std::uint64_t seed = cfg.run.seed + seed_i;
                    const Scenario scenario = build_scenario(point_cfgs[v_i], seed);
                    PsoConfig pso = make_pso(point_cfgs[v_i], 1);
                    pso.seed = seed;
                    const OptimizerReport rep = run_benchmark(schemes[scheme_i], scenario, sca, pso);
                    rate[idx] = rep.rates.sum_rate;
                    leak[idx] = rep.near_leakage;
                });

        CsvTable t;
        t.columns = {"scheme", "parameter", "value", "seeds", "mean_sum_rate", "min_sum_rate", "max_sum_rate",
                     "mean_near_leakage"};
        for (std::size_t s = 0; s < ns; ++s)
            for (std::size_t v = 0; v < nv; ++v)
            {
                double sum = 0.0, lo = std::numeric_limits<double>::infinity(), hi = -lo, lk = 0.0;
                for (std::size_t k = 0; k < nseed; ++k)
                {
                    const std::size_t idx = (v * ns + s) * nseed + k;
                    sum += rate[idx];
                    lo = std::min(lo, rate[idx]);
                    hi = std::max(hi, rate[idx]);
                    lk += leak[idx];
                }
                t.rows.push_back({std::string(scheme_name(schemes[s])), std::string(to_string(cfg.sweep.parameter)),
                                  format_value(cfg.sweep.values[v]), std::to_string(nseed),
                                  format_value(sum / double(nseed)), format_value(lo), format_value(hi),
                                  format_value(lk / double(nseed))});
            }
        return t;
    }
}
