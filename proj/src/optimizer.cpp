// SPDX-License-Identifier: Apache-2.0
//
// ramix - rotatable-antenna mixed near-field/far-field simulator

#include "ramix/optimizer.hpp"
#include "ramix/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numeric>
#include <thread>

namespace ramix
{
    namespace
    {
        constexpr double inv_ln2 = 1.0 / std::numbers::ln2;

        double dot(const std::vector<double> &a, const std::vector<double> &b)
        {
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i)
                s += a[i] * b[i];
            return s;
        }

        double inf_norm(const std::vector<double> &a)
        {
            double m = 0.0;
            for (double v : a)
                m = std::max(m, std::abs(v));
            return m;
        }

        // Denominators with (all) and without (others) the user's own signal
        void denominators(const LinkGains &g, const std::vector<double> &p, std::vector<double> &all,
                          std::vector<double> &others)
        {
            const int k = g.n_users();
            all.assign(std::size_t(k), 0.0);
            others.assign(std::size_t(k), 0.0);
            for (int a = 0; a < k; ++a)
            {
                double interf = g.far_interference(a) + g.noise_w;
                for (int b = 0; b < k; ++b)
                    if (b != a)
                        interf += p[std::size_t(b)] * g.near(a, b);
                others[std::size_t(a)] = interf;
                all[std::size_t(a)] = interf + p[std::size_t(a)] * g.near(a, a);
            }
        }

        void check_powers(const LinkGains &g, const std::vector<double> &p)
        {
            if (int(p.size()) != g.n_users())
                throw DomainError("power vector length does not match the number of near users");
        }
    }

    void ScaConfig::validate() const
    {
        if (max_iters < 1)
            throw DomainError("SCA max_iters must be at least 1");
        if (!(tol > 0.0))
            throw DomainError("SCA tolerance must be positive");
        if (!(subsolver_tol > 0.0))
            throw DomainError("SCA subsolver tolerance must be positive");
        if (subsolver_max_iters < 1)
            throw DomainError("SCA subsolver_max_iters must be at least 1");
    }

    DcParts dc_parts(const LinkGains &gains, const std::vector<double> &powers_w)
    {
        check_powers(gains, powers_w);
        std::vector<double> all, others;
        denominators(gains, powers_w, all, others);
        DcParts d;
        for (std::size_t a = 0; a < all.size(); ++a)
        {
            d.a1 -= std::log2(all[a]);
            d.b1 -= std::log2(others[a]);
        }
        return d;
    }

    std::vector<double> dc_concave_gradient(const LinkGains &gains, const std::vector<double> &powers_w)
    {
        check_powers(gains, powers_w);
        std::vector<double> all, others;
        denominators(gains, powers_w, all, others);
        const int k = gains.n_users();
        std::vector<double> grad(std::size_t(k), 0.0);
        for (int b = 0; b < k; ++b)
            for (int a = 0; a < k; ++a)
                if (a != b)
                    grad[std::size_t(b)] -= inv_ln2 * gains.near(a, b) / others[std::size_t(a)];
        return grad;
    }

    std::vector<double> project_capped_simplex(std::vector<double> v, double budget)
    {
        if (!(budget >= 0.0))
            throw DomainError("projection: negative budget");
        double sum = 0.0;
        for (double &x : v)
        {
            x = std::max(x, 0.0);
            sum += x;
        }
        if (sum <= budget)
            return v;

        // the cap is active: project onto {x >= 0, sum x = budget}
        std::vector<double> u = v;
        std::sort(u.begin(), u.end(), std::greater<>());
        double cum = 0.0, tau = 0.0;
        for (std::size_t j = 0; j < u.size(); ++j)
        {
            cum += u[j];
            const double t = (cum - budget) / double(j + 1);
            if (u[j] - t > 0.0)
                tau = t;
        }
        for (double &x : v)
            x = std::max(x - tau, 0.0);
        return v;
    }

    InnerSolveResult inner_convex_solve(const ConvexObjective &objective, double budget_w, std::vector<double> start,
                                        double tol, int max_iters)
    {
        if (!(budget_w >= 0.0))
            throw DomainError("inner solver: negative budget");
        InnerSolveResult res;
        if (budget_w == 0.0)
        {
            res.powers_w.assign(start.size(), 0.0);
            return res;
        }

        // work in x = p / budget so the feasible set is the unit capped simplex
        const double scale = budget_w;
        auto to_p = [&](const std::vector<double> &x)
        {
            std::vector<double> p(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                p[i] = x[i] * scale;
            return p;
        };
        auto f = [&](const std::vector<double> &x) { return objective.value(to_p(x)); };
        auto grad = [&](const std::vector<double> &x)
        {
            std::vector<double> g = objective.gradient(to_p(x));
            for (double &v : g)
                v *= scale;
            return g;
        };
        const std::size_t n = start.size();
        auto step_to = [&](const std::vector<double> &x, const std::vector<double> &g, double alpha)
        {
            std::vector<double> y(n);
            for (std::size_t i = 0; i < n; ++i)
                y[i] = x[i] - alpha * g[i];
            y = project_capped_simplex(std::move(y), 1.0);
            for (std::size_t i = 0; i < n; ++i)
                y[i] -= x[i];
            return y;
        };

        for (double &v : start)
            v /= scale;
        std::vector<double> x = project_capped_simplex(std::move(start), 1.0);
        double fx = f(x);
        std::vector<double> g = grad(x);
        double alpha = 1.0 / std::max(inf_norm(g), 1e-12);

        for (int it = 0;; ++it)
        {
            const double pg = inf_norm(step_to(x, g, 1.0));
            res.iterations = it;
            res.projected_gradient_norm = pg;
            if (pg <= tol * std::max(1.0, inf_norm(g)))
                break;
            if (it >= max_iters)
                throw SolverError("inner solver: iteration cap of " + std::to_string(max_iters) +
                                      " reached (projected gradient " + std::to_string(pg) + ")",
                                  to_p(x));

            const std::vector<double> d = step_to(x, g, alpha);
            const double slope = dot(g, d);
            if (!(slope < 0.0))
                break; // no descent available in floating point

            double lambda = 1.0;
            std::vector<double> xn(n);
            double fn = 0.0;
            bool accepted = false;
            for (int bt = 0; bt < 60; ++bt)
            {
                for (std::size_t i = 0; i < n; ++i)
                    xn[i] = std::max(x[i] + lambda * d[i], 0.0);
                fn = f(xn);
                if (fn <= fx + 1e-4 * lambda * slope)
                {
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if (!accepted)
                break; // stalled at machine precision

            std::vector<double> gn = grad(xn);
            double ss = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < n; ++i)
            {
                const double s = xn[i] - x[i];
                ss += s * s;
                sy += s * (gn[i] - g[i]);
            }
            if (ss == 0.0)
                break; // the accepted step rounds to no move
            alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-12, 1e12) : 1e12;
            x = std::move(xn);
            fx = fn;
            g = std::move(gn);
        }
        res.powers_w = to_p(x);
        return res;
    }

    ScaResult sca_power_allocation(const LinkGains &gains, double budget_w, const ScaConfig &cfg)
    {
        cfg.validate();
        const int k = gains.n_users();
        ScaResult out;
        out.alloc.budget_w = budget_w;
        if (k == 0)
        {
            out.objective_trace.push_back(0.0);
            return out;
        }

        std::vector<double> p;
        if (cfg.init == ScaInit::warm_start)
        {
            if (int(cfg.warm_start_w.size()) != k)
                throw DomainError("SCA warm start has the wrong length");
            p = project_capped_simplex(cfg.warm_start_w, budget_w);
        }
        else
            p = PowerAllocation::equal(k, budget_w).near_powers_w;

        double obj = dc_parts(gains, p).objective();
        out.objective_trace.push_back(obj);

        for (int t = 0; t < cfg.max_iters; ++t)
        {
            const double b_at = dc_parts(gains, p).b1;
            const std::vector<double> gb = dc_concave_gradient(gains, p);
            const std::vector<double> p_at = p;

            ConvexObjective surrogate;
            surrogate.value = [&](const std::vector<double> &q)
            {
                double lin = 0.0;
                for (std::size_t i = 0; i < q.size(); ++i)
                    lin += gb[i] * (q[i] - p_at[i]);
                return dc_parts(gains, q).a1 - b_at - lin;
            };
            surrogate.gradient = [&](const std::vector<double> &q)
            {
                std::vector<double> all, others;
                denominators(gains, q, all, others);
                std::vector<double> g(q.size(), 0.0);
                for (int b = 0; b < k; ++b)
                {
                    for (int a = 0; a < k; ++a)
                        g[std::size_t(b)] -= inv_ln2 * gains.near(a, b) / all[std::size_t(a)];
                    g[std::size_t(b)] -= gb[std::size_t(b)];
                }
                return g;
            };

            InnerSolveResult inner;
            try
            {
                inner = inner_convex_solve(surrogate, budget_w, p, cfg.subsolver_tol, cfg.subsolver_max_iters);
            }
            catch (const SolverError &e)
            {
                throw SolverError(std::string("SCA iteration ") + std::to_string(t + 1) + ": " + e.what(), p);
            }
            out.inner_iterations += inner.iterations;
            ++out.iterations;

            const double next = dc_parts(gains, inner.powers_w).objective();
            if (!(next <= obj))
                break; // the upper bound guarantees descent; anything else is rounding
            const double gain = obj - next;
            p = inner.powers_w;
            obj = next;
            out.objective_trace.push_back(obj);
            if (gain < cfg.tol)
                break;
        }
        out.alloc.near_powers_w = std::move(p);
        return out;
    }

    ScaResult sca_power_allocation(const ChannelSet &channels, const PrecoderSet &precoders, const Scenario &scenario,
                                   const ScaConfig &cfg)
    {
        return sca_power_allocation(compute_link_gains(channels, precoders, scenario), scenario.budget_w, cfg);
    }

    void PsoConfig::validate() const
    {
        if (swarm < 1)
            throw DomainError("PSO swarm size must be at least 1");
        if (iters < 0)
            throw DomainError("PSO iteration count must be nonnegative");
        if (!(inertia > 0.0 && inertia < 1.0))
            throw DomainError("PSO inertia must lie in (0, 1)");
        if (!(c1 > 0.0) || !(c2 > 0.0))
            throw DomainError("PSO learning factors must be positive");
        if (!(penalty >= 0.0))
            throw DomainError("PSO penalty must be nonnegative");
        if (!(velocity_clamp_frac > 0.0))
            throw DomainError("PSO velocity clamp must be positive");
        if (threads < 0)
            throw DomainError("PSO thread count must be nonnegative");
        if (!(angle_quantum > 0.0))
            throw DomainError("PSO angle quantum must be positive");
    }

    bool penalty_enabled(const PsoConfig &cfg, const std::vector<AngleRange> &ranges)
    {
        switch (cfg.penalty_mode)
        {
        case PenaltyMode::on:
            return true;
        case PenaltyMode::off:
            return false;
        case PenaltyMode::automatic:
            break;
        }
        const double limit = pi / 6 + 1e-12;
        return !std::all_of(ranges.begin(), ranges.end(),
                            [&](const AngleRange &r) { return r.lo >= -limit && r.hi <= limit; });
    }

    FitnessResult pso_fitness(const std::vector<double> &angles, const Scenario &scenario, const ScaConfig &sca,
                              const PsoConfig &pso, const FitnessSpec &spec)
    {
        RotationState rot{angles, scenario.rotation_ranges};
        const ChannelSet channels = synthesize_channels(scenario.array, rot, scenario, spec.model);
        const PrecoderSet precoders = build_precoders(channels, spec.digital);
        const LinkGains gains = compute_link_gains(channels, precoders, scenario);

        FitnessResult out;
        out.violating_pairs = penalty_enabled(pso, scenario.rotation_ranges) ? rot.violating_pairs() : 0;
        if (spec.power == PowerMode::equal)
            out.alloc = PowerAllocation::equal(scenario.n_near(), scenario.budget_w);
        else
        {
            try
            {
                ScaResult r = sca_power_allocation(gains, scenario.budget_w, sca);
                out.alloc = std::move(r.alloc);
                out.sca_trace = std::move(r.objective_trace);
                out.sca_iterations = r.iterations;
            }
            catch (const SolverError &e)
            {
                out.fitness = -std::numeric_limits<double>::infinity();
                out.sum_rate = out.fitness;
                out.diagnostic = e.what();
                return out;
            }
        }
        out.sum_rate = evaluate_rates(gains, out.alloc).sum_rate;
        out.fitness = out.sum_rate - pso.penalty * double(out.violating_pairs);
        return out;
    }

    namespace
    {
        using Clock = std::chrono::steady_clock;

        class FitnessCache
        {
        public:
            FitnessCache(const Scenario &scenario, const ScaConfig &sca, const PsoConfig &pso, const FitnessSpec &spec)
                : scenario_(scenario), sca_(sca), pso_(pso), spec_(spec)
            {
                threads_ = pso.threads > 0 ? pso.threads : int(std::max(1u, std::thread::hardware_concurrency()));
            }

            // Fitness for every position. New evaluations fan out over the worker threads; the
            // result only depends on the positions, never on the schedule.
            std::vector<const FitnessResult *> evaluate(const std::vector<std::vector<double>> &positions,
                                                        int &sca_iters)
            {
                std::vector<std::vector<double>> todo;
                for (const auto &x : positions)
                    if (!cache_.count(x) && std::find(todo.begin(), todo.end(), x) == todo.end())
                        todo.push_back(x);
                hits += long(positions.size() - todo.size());
                evaluations += long(todo.size());

                std::vector<FitnessResult> results(todo.size());
                const int workers = std::min<int>(threads_, int(todo.size()));
                if (workers <= 1)
                {
                    for (std::size_t i = 0; i < todo.size(); ++i)
                        results[i] = pso_fitness(todo[i], scenario_, sca_, pso_, spec_);
                }
                else
                {
                    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
                    std::vector<std::thread> pool;
                    for (int w = 0; w < workers; ++w)
                        pool.emplace_back([&, w]
                                          {
                            try
                            {
                                for (std::size_t i = std::size_t(w); i < todo.size(); i += std::size_t(workers))
                                    results[i] = pso_fitness(todo[i], scenario_, sca_, pso_, spec_);
                            }
                            catch (...)
                            {
                                errors[std::size_t(w)] = std::current_exception();
                            } });
                    for (auto &t : pool)
                        t.join();
                    for (auto &e : errors)
                        if (e)
                            std::rethrow_exception(e);
                }

                sca_iters = 0;
                for (std::size_t i = 0; i < todo.size(); ++i)
                {
                    sca_iters += results[i].sca_iterations;
                    cache_.emplace(todo[i], std::move(results[i]));
                }
                std::vector<const FitnessResult *> out;
                out.reserve(positions.size());
                for (const auto &x : positions)
                    out.push_back(&cache_.at(x));
                return out;
            }

            long hits = 0;
            long evaluations = 0;

        private:
            const Scenario &scenario_;
            const ScaConfig &sca_;
            const PsoConfig &pso_;
            const FitnessSpec &spec_;
            int threads_ = 1;
            std::map<std::vector<double>, FitnessResult> cache_;
        };

        void finish_report(OptimizerReport &rep, const Scenario &scenario, const FitnessSpec &spec,
                           const FitnessResult &best, Clock::time_point t0)
        {
            rep.best_alloc = best.alloc;
            rep.fitness = best.fitness;
            rep.best_sca_trace = best.sca_trace;
            if (std::isfinite(best.fitness))
            {
                RotationState rot{rep.best_angles, scenario.rotation_ranges};
                const ChannelSet ch = synthesize_channels(scenario.array, rot, scenario, spec.model);
                const PrecoderSet pre = build_precoders(ch, spec.digital);
                rep.rates = evaluate_rates(ch, pre, best.alloc, scenario);
                rep.near_leakage = near_cross_leakage(ch, pre);
            }
            rep.wall_time_s = std::chrono::duration<double>(Clock::now() - t0).count();
        }
    }

    OptimizerReport pso_optimize(const Scenario &scenario, const ScaConfig &sca, const PsoConfig &pso,
                                 const FitnessSpec &spec)
    {
        const auto t0 = Clock::now();
        scenario.validate();
        sca.validate();
        pso.validate();

        const int q = scenario.array.n_subarrays;
        const std::vector<AngleRange> &ranges = scenario.rotation_ranges;
        auto snap = [&](double a, std::size_t d)
        { return ranges[d].clamp(std::round(a / pso.angle_quantum) * pso.angle_quantum); };

        const std::size_t ns = std::size_t(pso.swarm), nd = std::size_t(q);
        std::vector<std::vector<double>> x(ns, std::vector<double>(nd)), v(ns, std::vector<double>(nd, 0.0));
        for (std::size_t s = 0; s < ns; ++s)
        {
            RngStream rng = RngStream::derived(pso.seed, {1, s});
            for (std::size_t d = 0; d < nd; ++d)
                x[s][d] = snap(s == 0 ? 0.0 : rng.uniform(ranges[d].lo, ranges[d].hi), d);
        }
        std::vector<double> vmax(nd);
        for (std::size_t d = 0; d < nd; ++d)
            vmax[d] = pso.velocity_clamp_frac * ranges[d].width();

        FitnessCache cache(scenario, sca, pso, spec);
        OptimizerReport rep;
        rep.seed = pso.seed;

        int iters_used = 0;
        std::vector<const FitnessResult *> fit = cache.evaluate(x, iters_used);
        std::vector<std::vector<double>> pbest = x;
        std::vector<const FitnessResult *> pbest_fit = fit;
        std::size_t g = 0;
        for (std::size_t s = 1; s < ns; ++s)
            if (pbest_fit[s]->fitness > pbest_fit[g]->fitness)
                g = s;
        std::vector<double> gbest = pbest[g];
        const FitnessResult *gbest_fit = pbest_fit[g];
        rep.sum_rate_trace.push_back(gbest_fit->fitness);
        rep.inner_iters_used.push_back(iters_used);

        for (int t = 1; t <= pso.iters; ++t)
        {
            for (std::size_t s = 0; s < ns; ++s)
            {
                RngStream rng = RngStream::derived(pso.seed, {2, s, std::uint64_t(t)});
                for (std::size_t d = 0; d < nd; ++d)
                {
                    const double r1 = rng.uniform();
                    const double r2 = rng.uniform();
                    double vel = pso.inertia * v[s][d] + pso.c1 * r1 * (pbest[s][d] - x[s][d]) +
                                 pso.c2 * r2 * (gbest[d] - x[s][d]);
                    v[s][d] = std::clamp(vel, -vmax[d], vmax[d]);
                    x[s][d] = snap(x[s][d] + v[s][d], d);
                }
            }
            fit = cache.evaluate(x, iters_used);
            for (std::size_t s = 0; s < ns; ++s)
                if (fit[s]->fitness > pbest_fit[s]->fitness)
                {
                    pbest[s] = x[s];
                    pbest_fit[s] = fit[s];
                }
            for (std::size_t s = 0; s < ns; ++s)
                if (pbest_fit[s]->fitness > gbest_fit->fitness)
                {
                    gbest = pbest[s];
                    gbest_fit = pbest_fit[s];
                }
            rep.sum_rate_trace.push_back(gbest_fit->fitness);
            rep.inner_iters_used.push_back(iters_used);
        }

        rep.best_angles = gbest;
        rep.evaluations = cache.evaluations;
        rep.cache_hits = cache.hits;
        finish_report(rep, scenario, spec, *gbest_fit, t0);
        return rep;
    }

    std::string_view scheme_name(Scheme s)
    {
        switch (s)
        {
        case Scheme::fa_zf:
            return "fa-zf";
        case Scheme::fa_opa:
            return "fa-opa";
        case Scheme::ra_epa:
            return "ra-epa";
        case Scheme::proposed:
            return "proposed";
        case Scheme::proposed_zf:
            return "proposed-zf";
        case Scheme::proposed_q1:
            return "proposed-q1";
        }
        return "?";
    }

    Scheme parse_scheme(std::string_view name)
    {
        for (Scheme s : {Scheme::fa_zf, Scheme::fa_opa, Scheme::ra_epa, Scheme::proposed, Scheme::proposed_zf,
                         Scheme::proposed_q1})
            if (scheme_name(s) == name)
                return s;
        throw DomainError("unknown scheme '" + std::string(name) +
                          "' (expected fa-zf, fa-opa, ra-epa, proposed, proposed-zf or proposed-q1)");
    }

    Scenario with_subarrays(const Scenario &scenario, int n_subarrays)
    {
        Scenario out = scenario;
        out.array.n_subarrays = n_subarrays;
        const AngleRange r = scenario.rotation_ranges.empty() ? AngleRange{} : scenario.rotation_ranges.front();
        out.rotation_ranges.assign(std::size_t(n_subarrays), r);
        return out;
    }

    OptimizerReport run_benchmark(Scheme scheme, const Scenario &scenario, const ScaConfig &sca, const PsoConfig &pso)
    {
        FitnessSpec spec;
        switch (scheme)
        {
        case Scheme::fa_zf:
        case Scheme::fa_opa:
        {
            const auto t0 = Clock::now();
            scenario.validate();
            spec.digital = scheme == Scheme::fa_zf ? DigitalMode::zero_forcing : DigitalMode::identity;
            spec.power = scheme == Scheme::fa_zf ? PowerMode::equal : PowerMode::sca;
            OptimizerReport rep;
            rep.scheme = std::string(scheme_name(scheme));
            rep.seed = pso.seed;
            for (const AngleRange &r : scenario.rotation_ranges)
                rep.best_angles.push_back(r.clamp(0.0));
            const FitnessResult f = pso_fitness(rep.best_angles, scenario, sca, pso, spec);
            if (!std::isfinite(f.fitness))
                throw SolverError(std::string(scheme_name(scheme)) + ": " + f.diagnostic, {});
            rep.sum_rate_trace.push_back(f.fitness);
            rep.inner_iters_used.push_back(f.sca_iterations);
            rep.evaluations = 1;
            finish_report(rep, scenario, spec, f, t0);
            return rep;
        }
        case Scheme::ra_epa:
            spec.power = PowerMode::equal;
            break;
        case Scheme::proposed:
        case Scheme::proposed_q1:
            break;
        case Scheme::proposed_zf:
            spec.digital = DigitalMode::zero_forcing;
            break;
        }
        OptimizerReport rep = scheme == Scheme::proposed_q1 ? pso_optimize(with_subarrays(scenario, 1), sca, pso, spec)
                                                            : pso_optimize(scenario, sca, pso, spec);
        rep.scheme = std::string(scheme_name(scheme));
        return rep;
    }
}
