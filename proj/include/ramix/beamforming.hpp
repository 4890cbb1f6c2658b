// SPDX-License-Identifier: Apache-2.0
//
// ramix - rotatable-antenna mixed near-field/far-field simulator

#ifndef RAMIX_BEAMFORMING_HPP
#define RAMIX_BEAMFORMING_HPP

#include "ramix/geometry.hpp"

#include <vector>

namespace ramix
{
    enum class DigitalMode
    {
        identity,     // F_D = I: near precoders are the matched analog beams
        zero_forcing  // F_D = (H^H F_A)^+, columns renormalized
    };

    struct PrecoderSet
    {
        std::vector<ComplexVector> near; // w_{N,k}, unit norm
        std::vector<ComplexVector> far;  // w_{F,m} = h_{F,m} / |h_{F,m}|
        DigitalMode mode = DigitalMode::identity;
    };

    // Throws DegenerateChannelError on a zero channel
    PrecoderSet build_precoders(const ChannelSet &channels, DigitalMode mode);

    struct PowerAllocation
    {
        std::vector<double> near_powers_w;
        double budget_w = 0.0;

        static PowerAllocation equal(int n_users, double budget_w);
        double total() const;
        bool feasible(double slack = 1e-12) const;
    };

    // Received power gains at the near users:
    //   near(k, i) = |h_k^H w_i|^2,  far_interference(k) = sum_m P_F,m |h_k^H w_F,m|^2
    struct LinkGains
    {
        Eigen::MatrixXd near;
        Eigen::VectorXd far_interference;
        double noise_w = 0.0;

        int n_users() const { return int(near.rows()); }
    };

    LinkGains compute_link_gains(const ChannelSet &channels, const PrecoderSet &precoders, const Scenario &scenario);

    struct RateBreakdown
    {
        std::vector<double> per_user_rate; // bits/s/Hz
        std::vector<double> per_user_sinr;
        std::vector<double> near_interf_w;
        std::vector<double> mixed_interf_w;
        double sum_rate = 0.0;
    };

    // Throws DomainError for an infeasible allocation
    RateBreakdown evaluate_rates(const LinkGains &gains, const PowerAllocation &alloc);
    RateBreakdown evaluate_rates(const ChannelSet &channels, const PrecoderSet &precoders,
                                 const PowerAllocation &alloc, const Scenario &scenario);

    // Sum-rate with every cross term removed: an upper reference for plots
    double interference_free_bound(const LinkGains &gains, const PowerAllocation &alloc);
    double interference_free_bound(const ChannelSet &channels, const PowerAllocation &alloc,
                                   const Scenario &scenario);

    // max_{k != i} |h_k^H w_i| / |h_k|
    double near_cross_leakage(const ChannelSet &channels, const PrecoderSet &precoders);
}

#endif
