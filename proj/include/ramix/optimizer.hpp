// SPDX-License-Identifier: Apache-2.0
//
// ramix - rotatable-antenna mixed near-field/far-field simulator

#ifndef RAMIX_OPTIMIZER_HPP
#define RAMIX_OPTIMIZER_HPP

#include "ramix/beamforming.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ramix
{
    // ---- inner layer: power allocation --------------------------------------------------------

    enum class ScaInit
    {
        equal_power,
        warm_start
    };

    struct ScaConfig
    {
        int max_iters = 50;
        double tol = 1e-4;            // stop once the sum-rate improves by less than this [bits/s/Hz]
        double subsolver_tol = 1e-8;  // projected-gradient norm relative to max(1, gradient norm), budget-normalized
        int subsolver_max_iters = 5000;
        ScaInit init = ScaInit::equal_power;
        std::vector<double> warm_start_w; // used when init == warm_start

        void validate() const;
    };

    // Negative sum-rate written as A1 - B1 with
    //   A1 = -sum_k log2(sum_i p_i g_ki + f_k + s2)
    //   B1 = -sum_k log2(sum_{i != k} p_i g_ki + f_k + s2)
    // Both parts are convex in p.
    struct DcParts
    {
        double a1 = 0.0;
        double b1 = 0.0;
        double objective() const { return a1 - b1; }
    };

    DcParts dc_parts(const LinkGains &gains, const std::vector<double> &powers_w);

    // dB1/dp_k = -(1/ln 2) sum_{j != k} g_jk / (sum_{i != j} p_i g_ji + f_j + s2)
    std::vector<double> dc_concave_gradient(const LinkGains &gains, const std::vector<double> &powers_w);

    // Smooth convex objective on the capped simplex {p >= 0, sum p <= budget}
    struct ConvexObjective
    {
        std::function<double(const std::vector<double> &)> value;
        std::function<std::vector<double>(const std::vector<double> &)> gradient;
    };

    struct InnerSolveResult
    {
        std::vector<double> powers_w;
        int iterations = 0;
        double projected_gradient_norm = 0.0;
    };

    // Euclidean projection onto {x >= 0, sum x <= budget}
    std::vector<double> project_capped_simplex(std::vector<double> v, double budget);

    // Spectral projected gradient with Armijo backtracking, started from `start` (projected first).
    // Monotone: the returned point never has a larger objective than the projected start.
    // Throws SolverError with the last iterate when the iteration cap is hit.
    InnerSolveResult inner_convex_solve(const ConvexObjective &objective, double budget_w, std::vector<double> start,
                                        double tol, int max_iters);

    struct ScaResult
    {
        PowerAllocation alloc;
        std::vector<double> objective_trace; // -sum rate at every accepted iterate, starting point first
        int iterations = 0;
        int inner_iterations = 0;
    };

    ScaResult sca_power_allocation(const LinkGains &gains, double budget_w, const ScaConfig &cfg);
    ScaResult sca_power_allocation(const ChannelSet &channels, const PrecoderSet &precoders, const Scenario &scenario,
                                   const ScaConfig &cfg);

    // ---- outer layer: rotation search -----------------------------------------------------------

    enum class PenaltyMode
    {
        automatic, // on unless every range lies inside [-pi/6, pi/6]
        on,
        off
    };

    struct PsoConfig
    {
        int swarm = 100;
        int iters = 100;
        double inertia = 0.7298;
        double c1 = 1.4962;
        double c2 = 1.4962;
        double penalty = 100.0;            // per violating subarray pair [bits/s/Hz]
        double velocity_clamp_frac = 0.5;  // |v_q| <= frac * range width
        std::uint64_t seed = 1;
        PenaltyMode penalty_mode = PenaltyMode::automatic;
        int threads = 1;                   // 0 picks the hardware concurrency
        double angle_quantum = 1e-4;       // positions snap to this grid [rad]; doubles as the cache key

        void validate() const;
    };

    bool penalty_enabled(const PsoConfig &cfg, const std::vector<AngleRange> &ranges);

    enum class PowerMode
    {
        sca,
        equal
    };

    struct FitnessSpec
    {
        PowerMode power = PowerMode::sca;
        DigitalMode digital = DigitalMode::identity;
        DistanceModel model = DistanceModel::taylor;
    };

    struct FitnessResult
    {
        double fitness = 0.0;
        double sum_rate = 0.0;
        int violating_pairs = 0;
        PowerAllocation alloc;
        std::vector<double> sca_trace;
        int sca_iterations = 0;
        std::string diagnostic; // set when the power solver failed and fitness is -inf
    };

    FitnessResult pso_fitness(const std::vector<double> &angles, const Scenario &scenario, const ScaConfig &sca,
                              const PsoConfig &pso, const FitnessSpec &spec = {});

    struct OptimizerReport
    {
        std::string scheme;
        std::vector<double> best_angles;
        PowerAllocation best_alloc;
        RateBreakdown rates;
        double fitness = 0.0;
        std::vector<double> sum_rate_trace;   // global-best fitness, initial swarm first
        std::vector<int> inner_iters_used;    // SCA iterations summed over each outer iteration
        std::vector<double> best_sca_trace;
        std::uint64_t seed = 0;
        double wall_time_s = 0.0;
        double near_leakage = 0.0;
        long evaluations = 0;
        long cache_hits = 0;
    };

    OptimizerReport pso_optimize(const Scenario &scenario, const ScaConfig &sca, const PsoConfig &pso,
                                 const FitnessSpec &spec = {});

    // ---- benchmarks -----------------------------------------------------------------------------

    enum class Scheme
    {
        fa_zf,       // zero rotation, ZF digital precoder, equal power
        fa_opa,      // zero rotation, SCA power
        ra_epa,      // PSO rotation, equal power
        proposed,    // PSO rotation with SCA power
        proposed_zf, // proposed with ZF digital precoder
        proposed_q1  // proposed with the whole array rotating as one
    };

    std::string_view scheme_name(Scheme s);
    Scheme parse_scheme(std::string_view name); // throws DomainError

    // Scenario with the array regrouped into q subarrays; rotation ranges copied from the first one
    Scenario with_subarrays(const Scenario &scenario, int n_subarrays);

    OptimizerReport run_benchmark(Scheme scheme, const Scenario &scenario, const ScaConfig &sca, const PsoConfig &pso);
}

#endif
