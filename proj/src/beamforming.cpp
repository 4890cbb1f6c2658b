// SPDX-License-Identifier: Apache-2.0
//
// ramix - rotatable-antenna mixed near-field/far-field simulator

#include "ramix/beamforming.hpp"
#include "ramix/errors.hpp"

#include <cmath>
#include <numeric>

namespace ramix
{
    namespace
    {
        ComplexVector normalized(const ComplexVector &h, const char *who)
        {
            const double n = h.norm();
            if (!(n > 0.0) || !std::isfinite(n))
                throw DegenerateChannelError(std::string(who) + ": zero channel cannot be normalized");
            return h / n;
        }
    }

    PrecoderSet build_precoders(const ChannelSet &channels, DigitalMode mode)
    {
        PrecoderSet out;
        out.mode = mode;
        for (const ComplexVector &h : channels.far)
            out.far.push_back(normalized(h, "far precoder"));

        std::vector<ComplexVector> analog;
        for (const ComplexVector &h : channels.near)
            analog.push_back(normalized(h, "near precoder"));

        if (mode == DigitalMode::identity || analog.empty())
        {
            out.near = std::move(analog);
            return out;
        }

        const Eigen::Index n = analog.front().size();
        const Eigen::Index k = Eigen::Index(analog.size());
        ComplexMatrix fa(n, k), h(n, k);
        for (Eigen::Index i = 0; i < k; ++i)
        {
            fa.col(i) = analog[std::size_t(i)];
            h.col(i) = channels.near[std::size_t(i)];
        }
        const ComplexMatrix fd = pseudo_inverse(h.adjoint() * fa);
        const ComplexMatrix w = fa * fd;
        for (Eigen::Index i = 0; i < k; ++i)
            out.near.push_back(normalized(w.col(i), "zero-forcing precoder"));
        return out;
    }

    PowerAllocation PowerAllocation::equal(int n_users, double budget_w)
    {
        PowerAllocation a;
        a.budget_w = budget_w;
        a.near_powers_w.assign(std::size_t(std::max(n_users, 0)), n_users > 0 ? budget_w / n_users : 0.0);
        return a;
    }

    double PowerAllocation::total() const
    {
        return std::accumulate(near_powers_w.begin(), near_powers_w.end(), 0.0);
    }

    bool PowerAllocation::feasible(double slack) const
    {
        for (double p : near_powers_w)
            if (!(p >= 0.0) || !std::isfinite(p))
                return false;
        return total() <= budget_w + slack * std::max(1.0, budget_w);
    }

    LinkGains compute_link_gains(const ChannelSet &channels, const PrecoderSet &precoders, const Scenario &scenario)
    {
        const Eigen::Index k = Eigen::Index(channels.near.size());
        if (precoders.near.size() != channels.near.size() || precoders.far.size() != channels.far.size() ||
            int(channels.far.size()) != scenario.n_far())
            throw DomainError("compute_link_gains: channel, precoder and scenario sizes disagree");

        LinkGains g;
        g.near.resize(k, k);
        g.far_interference = Eigen::VectorXd::Zero(k);
        g.noise_w = scenario.noise_w;
        for (Eigen::Index a = 0; a < k; ++a)
        {
            const ComplexVector &h = channels.near[std::size_t(a)];
            for (Eigen::Index b = 0; b < k; ++b)
                g.near(a, b) = std::norm(h.dot(precoders.near[std::size_t(b)]));
            for (std::size_t m = 0; m < precoders.far.size(); ++m)
                g.far_interference(a) += scenario.far_users[m].tx_power_w * std::norm(h.dot(precoders.far[m]));
        }
        return g;
    }

    RateBreakdown evaluate_rates(const LinkGains &gains, const PowerAllocation &alloc)
    {
        const int k = gains.n_users();
        if (int(alloc.near_powers_w.size()) != k)
            throw DomainError("evaluate_rates: allocation size does not match the number of near users");
        if (!alloc.feasible())
            throw DomainError("evaluate_rates: allocation violates the power budget");

        RateBreakdown out;
        out.per_user_rate.resize(std::size_t(k));
        out.per_user_sinr.resize(std::size_t(k));
        out.near_interf_w.resize(std::size_t(k));
        out.mixed_interf_w.resize(std::size_t(k));
        for (int a = 0; a < k; ++a)
        {
            double near_i = 0.0;
            for (int b = 0; b < k; ++b)
                if (b != a)
                    near_i += alloc.near_powers_w[std::size_t(b)] * gains.near(a, b);
            const double mixed = gains.far_interference(a);
            const double sinr = alloc.near_powers_w[std::size_t(a)] * gains.near(a, a) / (near_i + mixed + gains.noise_w);
            const std::size_t ia = std::size_t(a);
            out.near_interf_w[ia] = near_i;
            out.mixed_interf_w[ia] = mixed;
            out.per_user_sinr[ia] = sinr;
            out.per_user_rate[ia] = std::log2(1.0 + sinr);
            out.sum_rate += out.per_user_rate[ia];
        }
        return out;
    }

    RateBreakdown evaluate_rates(const ChannelSet &channels, const PrecoderSet &precoders,
                                 const PowerAllocation &alloc, const Scenario &scenario)
    {
        return evaluate_rates(compute_link_gains(channels, precoders, scenario), alloc);
    }

    double interference_free_bound(const LinkGains &gains, const PowerAllocation &alloc)
    {
        double sum = 0.0;
        for (int a = 0; a < gains.n_users(); ++a)
            sum += std::log2(1.0 + alloc.near_powers_w[std::size_t(a)] * gains.near(a, a) / gains.noise_w);
        return sum;
    }

    double interference_free_bound(const ChannelSet &channels, const PowerAllocation &alloc, const Scenario &scenario)
    {
        // with every cross term gone the matched beam is optimal: |h^H w|^2 = |h|^2
        double sum = 0.0;
        for (std::size_t a = 0; a < channels.near.size(); ++a)
            sum += std::log2(1.0 + alloc.near_powers_w[a] * channels.near[a].squaredNorm() / scenario.noise_w);
        return sum;
    }

    double near_cross_leakage(const ChannelSet &channels, const PrecoderSet &precoders)
    {
        double worst = 0.0;
        for (std::size_t a = 0; a < channels.near.size(); ++a)
        {
            const double hn = channels.near[a].norm();
            for (std::size_t b = 0; b < precoders.near.size(); ++b)
                if (a != b)
                    worst = std::max(worst, std::abs(channels.near[a].dot(precoders.near[b])) / hn);
        }
        return worst;
    }
}
