// SPDX-License-Identifier: Apache-2.0

#include "ramix/errors.hpp"
#include "ramix/interference.hpp"
#include "ramix/experiments.hpp"
#include "ramix/optimizer.hpp"
#include "oracles.hpp"
#include "scenarios.hpp"

#include <doctest.h>

#include <numeric>

using namespace ramix;

namespace
{
    LinkGains random_gains(int k, std::uint64_t seed, double cross_scale = 0.05)
    {
        RngStream rng(seed, 7);
        LinkGains g;
        g.near = Eigen::MatrixXd(k, k);
        g.far_interference = Eigen::VectorXd(k);
        g.noise_w = 1e-3;
        for (int a = 0; a < k; ++a)
        {
            for (int b = 0; b < k; ++b)
                g.near(a, b) = a == b ? rng.uniform(0.5, 2.0) : cross_scale * rng.uniform();
            g.far_interference(a) = 1e-3 * rng.uniform();
        }
        return g;
    }

    double sum_of(const std::vector<double> &v) { return std::accumulate(v.begin(), v.end(), 0.0); }

    PsoConfig small_pso(std::uint64_t seed = 3)
    {
        PsoConfig p;
        p.swarm = 8;
        p.iters = 6;
        p.seed = seed;
        return p;
    }
}

TEST_CASE("capped-simplex projection satisfies the obtuse-angle condition")
{
    RngStream rng(4, 1);
    for (int trial = 0; trial < 200; ++trial)
    {
        const std::size_t n = 1 + std::size_t(trial % 6);
        const double budget = rng.uniform(0.0, 2.0);
        std::vector<double> v(n);
        for (double &x : v)
            x = rng.uniform(-1.5, 1.5);
        const std::vector<double> y = project_capped_simplex(v, budget);
        CHECK(sum_of(y) <= budget * (1 + 1e-12) + 1e-15);
        for (double x : y)
            CHECK(x >= 0.0);
        for (int z_trial = 0; z_trial < 20; ++z_trial)
        {
            std::vector<double> z(n);
            for (double &x : z)
                x = rng.uniform();
            const double s = sum_of(z);
            const double shrink = rng.uniform() * budget / s;
            double inner = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                inner += (v[i] - y[i]) * (z[i] * shrink - y[i]);
            CHECK(inner <= 1e-12);
        }
    }
    CHECK(project_capped_simplex({0.1, 0.2}, 1.0) == std::vector<double>{0.1, 0.2});
    CHECK_THROWS_AS(project_capped_simplex({0.1}, -1.0), DomainError);
}

TEST_CASE("inner solver puts a linear objective on the best vertex")
{
    ConvexObjective lin;
    const std::vector<double> c{0.3, -0.5, -1.2, 0.1};
    lin.value = [&](const std::vector<double> &p)
    {
        double s = 0;
        for (std::size_t i = 0; i < p.size(); ++i)
            s += c[i] * p[i];
        return s;
    };
    lin.gradient = [&](const std::vector<double> &) { return c; };
    const InnerSolveResult r = inner_convex_solve(lin, 2.0, {0.5, 0.5, 0.5, 0.5}, 1e-10, 1000);
    CHECK(r.powers_w[2] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(r.powers_w[0] == doctest::Approx(0.0));
    CHECK(r.powers_w[1] == doctest::Approx(0.0));
    CHECK(r.powers_w[3] == doctest::Approx(0.0));

    const InnerSolveResult z = inner_convex_solve(lin, 0.0, {0.5, 0.5, 0.5, 0.5}, 1e-10, 1000);
    CHECK(z.powers_w == std::vector<double>(4, 0.0));
}

TEST_CASE("inner solver reports an exhausted iteration budget")
{
    ConvexObjective quad;
    quad.value = [](const std::vector<double> &p) { return (p[0] - 0.3) * (p[0] - 0.3) + (p[1] - 0.1) * (p[1] - 0.1); };
    quad.gradient = [](const std::vector<double> &p) { return std::vector<double>{2 * (p[0] - 0.3), 2 * (p[1] - 0.1)}; };
    CHECK_THROWS_AS(inner_convex_solve(quad, 1.0, {0.9, 0.0}, 1e-12, 0), SolverError);
    const InnerSolveResult r = inner_convex_solve(quad, 1.0, {0.9, 0.0}, 1e-12, 1000);
    CHECK(r.powers_w[0] == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(r.powers_w[1] == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("without cross interference the power split is water-filling")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
    {
        const int k = 2 + int(seed % 4);
        LinkGains g = random_gains(k, seed, 0.0);
        std::vector<double> a;
        for (int i = 0; i < k; ++i)
            a.push_back(g.near(i, i) / (g.far_interference(i) + g.noise_w));
        const double budget = 0.01 * double(seed);
        const std::vector<double> ref = oracle::water_filling(a, budget);
        const ScaResult r = sca_power_allocation(g, budget, ScaConfig{});
        for (int i = 0; i < k; ++i)
            CHECK(r.alloc.near_powers_w[std::size_t(i)] == doctest::Approx(ref[std::size_t(i)]).epsilon(1e-6).scale(budget));
    }
}

TEST_CASE("concave-part gradient matches finite differences")
{
    RngStream rng(17, 3);
    for (int trial = 0; trial < 50; ++trial)
    {
        const int k = 2 + trial % 5;
        const LinkGains g = random_gains(k, 100 + std::uint64_t(trial), 0.5);
        const double budget = 1.0;
        std::vector<double> p(static_cast<std::size_t>(k));
        for (double &x : p)
            x = rng.uniform(0.05, 1.0) * budget / k;
        const std::vector<double> analytic = dc_concave_gradient(g, p);
        const std::vector<double> numeric =
            oracle::central_difference([&](const std::vector<double> &q) { return dc_parts(g, q).b1; }, p, 1e-6 * budget);
        for (int i = 0; i < k; ++i)
            CHECK(analytic[std::size_t(i)] == doctest::Approx(numeric[std::size_t(i)]).epsilon(1e-4));
    }
}

TEST_CASE("difference-of-convex parts recover the sum rate")
{
    const LinkGains g = random_gains(4, 5, 0.3);
    const PowerAllocation alloc{{0.1, 0.2, 0.3, 0.15}, 1.0};
    CHECK(-dc_parts(g, alloc.near_powers_w).objective() == doctest::Approx(evaluate_rates(g, alloc).sum_rate));
}

TEST_CASE("SCA basics")
{
    SUBCASE("a lone user takes the whole budget")
    {
        const ScaResult r = sca_power_allocation(random_gains(1, 2), 0.7, ScaConfig{});
        CHECK(r.alloc.near_powers_w[0] == doctest::Approx(0.7).epsilon(1e-9));
    }
    SUBCASE("symmetric users split evenly")
    {
        LinkGains g;
        g.near = Eigen::MatrixXd{{1.0, 0.2}, {0.2, 1.0}};
        g.far_interference = Eigen::VectorXd::Constant(2, 1e-3);
        g.noise_w = 1e-3;
        const ScaResult r = sca_power_allocation(g, 1.0, ScaConfig{});
        CHECK(r.alloc.near_powers_w[0] == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(r.alloc.near_powers_w[1] == doctest::Approx(0.5).epsilon(1e-9));
    }
    SUBCASE("objective trace never increases and beats equal power")
    {
        for (std::uint64_t seed = 1; seed <= 20; ++seed)
        {
            const LinkGains g = random_gains(2 + int(seed % 5), seed, 0.8);
            const ScaResult r = sca_power_allocation(g, 1.0, ScaConfig{});
            for (std::size_t t = 1; t < r.objective_trace.size(); ++t)
                CHECK(r.objective_trace[t] <= r.objective_trace[t - 1]);
            CHECK(r.alloc.feasible());
            CHECK(evaluate_rates(g, r.alloc).sum_rate >=
                  evaluate_rates(g, PowerAllocation::equal(g.n_users(), 1.0)).sum_rate - 1e-12);
        }
    }
    SUBCASE("warm start of the wrong size is rejected")
    {
        ScaConfig cfg;
        cfg.init = ScaInit::warm_start;
        cfg.warm_start_w = {0.5};
        CHECK_THROWS_AS(sca_power_allocation(random_gains(2, 1), 1.0, cfg), DomainError);
    }
}

TEST_CASE("fitness and the obtuse-angle penalty")
{
    PsoConfig pso = small_pso();
    pso.penalty = 10.0;
    const Scenario one = fixture::rich_scenario(3, 2, 8, 1);
    const Scenario five = fixture::rich_scenario(3, 2, 8, 5);

    const FitnessResult f1 = pso_fitness({0.2}, one, ScaConfig{}, pso);
    CHECK(f1.violating_pairs == 0);
    CHECK(f1.fitness == f1.sum_rate);

    const FitnessResult f5 = pso_fitness(std::vector<double>(5, 0.2), five, ScaConfig{}, pso);
    CHECK(f5.violating_pairs == 0);
    CHECK(f5.sum_rate == doctest::Approx(f1.sum_rate).epsilon(1e-12));

    pso.penalty_mode = PenaltyMode::on;
    const FitnessResult pen = pso_fitness(std::vector<double>(5, 0.2), five, ScaConfig{}, pso);
    CHECK(pen.violating_pairs == 10);
    CHECK(pen.fitness == doctest::Approx(pen.sum_rate - 100.0));
    pso.penalty = 0.0;
    const FitnessResult free = pso_fitness(std::vector<double>(5, 0.2), five, ScaConfig{}, pso);
    CHECK(free.fitness == free.sum_rate);

    PsoConfig automatic;
    CHECK_FALSE(penalty_enabled(automatic, {AngleRange{}}));
    CHECK(penalty_enabled(automatic, {AngleRange{-pi / 2, pi / 2}}));
}

TEST_CASE("PSO edge cases")
{
    const Scenario base = fixture::rich_scenario(3, 2, 12, 5);
    SUBCASE("collapsed range pins every angle")
    {
        Scenario s = base;
        s.rotation_ranges.assign(5, AngleRange{0.0, 0.0});
        const OptimizerReport r = pso_optimize(s, ScaConfig{}, small_pso());
        CHECK(r.best_angles == std::vector<double>(5, 0.0));
    }
    SUBCASE("zero iterations keeps the initial swarm best")
    {
        PsoConfig pso = small_pso();
        pso.iters = 0;
        const OptimizerReport r = pso_optimize(base, ScaConfig{}, pso);
        CHECK(r.sum_rate_trace.size() == 1);
        CHECK(r.fitness == r.sum_rate_trace.front());
    }
    SUBCASE("invalid swarm settings are rejected")
    {
        PsoConfig pso = small_pso();
        pso.swarm = 0;
        CHECK_THROWS_AS(pso_optimize(base, ScaConfig{}, pso), DomainError);
    }
}

TEST_CASE("PSO is monotone, in range and independent of the thread count")
{
    const Scenario s = fixture::rich_scenario(4, 2, 31, 5);
    PsoConfig pso = small_pso(9);
    const OptimizerReport a = pso_optimize(s, ScaConfig{}, pso);
    pso.threads = 3;
    const OptimizerReport b = pso_optimize(s, ScaConfig{}, pso);

    CHECK(a.best_angles == b.best_angles);
    CHECK(a.sum_rate_trace == b.sum_rate_trace);
    CHECK(a.best_alloc.near_powers_w == b.best_alloc.near_powers_w);
    for (std::size_t t = 1; t < a.sum_rate_trace.size(); ++t)
        CHECK(a.sum_rate_trace[t] >= a.sum_rate_trace[t - 1]);
    for (double x : a.best_angles)
        CHECK(AngleRange{}.contains(x));
    CHECK(a.rates.sum_rate == doctest::Approx(a.fitness).epsilon(1e-12));
    CHECK(a.evaluations + a.cache_hits == long(pso.swarm) * (pso.iters + 1));
}

TEST_CASE("PSO finds the closed-form rotation for two same-angle users")
{
    // both users at 0.6 pi; curvatures small enough that the interference falls monotonically
    const Scenario s = fixture::los_scenario({{0.6 * pi, 0.1}, {0.6 * pi, 0.2}}, {});
    PsoConfig pso = small_pso(5);
    pso.swarm = 20;
    pso.iters = 20;
    FitnessSpec spec;
    spec.power = PowerMode::equal;
    const OptimizerReport r = pso_optimize(s, ScaConfig{}, pso, spec);
    const double target = optimal_rotation_same_angle_nn(0.6 * pi, AngleRange{});
    CHECK(std::abs(r.best_angles[0] - target) <= 0.01 * pi);
}

TEST_CASE("benchmark ordering")
{
    SUBCASE("a lone interference-free user gains nothing from rotation")
    {
        const Scenario s = fixture::los_scenario({{0.5 * pi, 0.05}}, {});
        const double fa = run_benchmark(Scheme::fa_opa, s, ScaConfig{}, small_pso()).rates.sum_rate;
        const double prop = run_benchmark(Scheme::proposed, s, ScaConfig{}, small_pso()).rates.sum_rate;
        CHECK(prop == doctest::Approx(fa).epsilon(1e-12));
    }
    SUBCASE("rotation search never loses to the fixed array with the same precoder")
    {
        for (std::uint64_t seed = 1; seed <= 4; ++seed)
        {
            const Scenario s = fixture::rich_scenario(3, 2, seed, 5);
            const PsoConfig pso = small_pso(seed);
            const double fa_opa = run_benchmark(Scheme::fa_opa, s, ScaConfig{}, pso).rates.sum_rate;
            const double fa_zf = run_benchmark(Scheme::fa_zf, s, ScaConfig{}, pso).rates.sum_rate;
            CHECK(run_benchmark(Scheme::proposed, s, ScaConfig{}, pso).rates.sum_rate >= fa_opa);
            CHECK(run_benchmark(Scheme::proposed_zf, s, ScaConfig{}, pso).rates.sum_rate >= fa_zf);
            CHECK(run_benchmark(Scheme::proposed_q1, s, ScaConfig{}, pso).rates.sum_rate >= fa_opa);
        }
    }
    SUBCASE("zero forcing nulls near-user leakage")
    {
        const Scenario s = fixture::rich_scenario(3, 2, 2, 5);
        CHECK(run_benchmark(Scheme::fa_zf, s, ScaConfig{}, small_pso()).near_leakage <= 1e-8);
    }
    SUBCASE("scheme names round-trip")
    {
        for (Scheme sc : {Scheme::fa_zf, Scheme::fa_opa, Scheme::ra_epa, Scheme::proposed, Scheme::proposed_zf,
                          Scheme::proposed_q1})
            CHECK(parse_scheme(scheme_name(sc)) == sc);
        CHECK_THROWS_AS(parse_scheme("nope"), DomainError);
    }
}

TEST_CASE("double layer against equal-power rotation search on default scenarios")
{
    ScenarioConfig cfg = apply_scale(ScenarioConfig{}, Scale::desk);
    double mean_prop = 0, mean_ra = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
        const Scenario s = build_scenario(cfg, seed);
        PsoConfig pso = make_pso(cfg, 1);
        pso.seed = seed;
        const ScaConfig sca = make_sca(cfg);
        const OptimizerReport ra = run_benchmark(Scheme::ra_epa, s, sca, pso);
        const OptimizerReport prop = run_benchmark(Scheme::proposed, s, sca, pso);
        const OptimizerReport fa = run_benchmark(Scheme::fa_opa, s, sca, pso);
        CHECK(prop.rates.sum_rate >= fa.rates.sum_rate);
        // power allocation at the equal-power optimum can only help
        CHECK(pso_fitness(ra.best_angles, s, sca, pso).sum_rate >= ra.rates.sum_rate);
        CHECK(prop.best_alloc.feasible());
        mean_prop += prop.rates.sum_rate / 20;
        mean_ra += ra.rates.sum_rate / 20;
    }
    CHECK(mean_prop >= mean_ra);
}
