// SPDX-License-Identifier: Apache-2.0
//
// ramix - rotatable-antenna mixed near-field/far-field simulator

#include "ramix/interference.hpp"
#include "ramix/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ramix
{
    namespace
    {
        // Chirp sum (1/N) |sum_{n=-half}^{half} exp(j pi (a n^2 + b n))|
        double chirp_sum(int n_antennas, double a, double b)
        {
            const int half = (n_antennas - 1) / 2;
            std::complex<double> acc(0.0, 0.0);
            for (int n = -half; n <= half; ++n)
            {
                // reduce the phase (in units of pi) modulo 2 before scaling to keep cos/sin accurate
                const double ph = std::fmod(a * double(n) * double(n) + b * double(n), 2.0);
                acc += std::complex<double>(std::cos(pi * ph), std::sin(pi * ph));
            }
            return std::abs(acc) / double(n_antennas);
        }

        // Phase coefficients in units of pi for the quadratic (a) and linear (b) terms
        struct ChirpCoefficients
        {
            double a = 0.0;
            double b = 0.0;
        };

        ChirpCoefficients nn_coefficients(const ArrayConfig &cfg, double phi, double theta_k, double r_k,
                                          double theta_i, double r_i)
        {
            if (!(r_k > 0.0) || !(r_i > 0.0))
                throw DomainError("near-field interference: distances must be positive");
            const double d = cfg.spacing();
            const double lambda = cfg.wavelength();
            const double sk = std::sin(phi - theta_k);
            const double si = std::sin(phi - theta_i);
            const double curvature = sk * sk / (2.0 * r_k) - si * si / (2.0 * r_i);
            const double linear = std::cos(phi - theta_i) - std::cos(phi - theta_k);
            return {2.0 * d * d / lambda * curvature, 2.0 * d / lambda * linear};
        }

        ChirpCoefficients nf_coefficients(const ArrayConfig &cfg, double phi, double theta_k, double r_k, double psi)
        {
            if (!(r_k > 0.0))
                throw DomainError("mixed-field interference: distance must be positive");
            const double d = cfg.spacing();
            const double lambda = cfg.wavelength();
            const double sk = std::sin(phi - theta_k);
            const double curvature = sk * sk / (2.0 * r_k);
            const double linear = std::cos(psi - phi) - std::cos(phi - theta_k);
            return {2.0 * d * d / lambda * curvature, 2.0 * d / lambda * linear};
        }

        std::optional<BetaPair> betas_from(int n_antennas, const ChirpCoefficients &c)
        {
            // quadratic phase below 1e-12 pi across the aperture: the sum is a Dirichlet kernel
            const double half = 0.5 * double(n_antennas - 1);
            if (std::abs(c.a) * half * half <= 1e-12)
                return std::nullopt;
            const double w = std::sqrt(2.0 * std::abs(c.a));
            return BetaPair{-c.b / w, 0.5 * double(n_antennas) * w};
        }

        double approx_from(int n_antennas, const ChirpCoefficients &c)
        {
            const auto betas = betas_from(n_antennas, c);
            return betas ? g_kernel(betas->beta1, betas->beta2) : dirichlet_kernel(n_antennas, c.b);
        }

        double same_angle_rule(double angle, AngleRange range)
        {
            if (!(range.lo <= 0.0 && 0.0 <= range.hi))
                throw DomainError("closed-form rotation: admissible range must contain 0");
            const double target = angle - pi / 2;
            if (target == 0.0)
                return 0.0;
            return target > 0.0 ? std::min(target, range.hi) : std::max(target, range.lo);
        }
    }

    double rho_nn_exact(const ArrayConfig &cfg, double phi, double theta_k, double r_k, double theta_i, double r_i)
    {
        const ChirpCoefficients c = nn_coefficients(cfg, phi, theta_k, r_k, theta_i, r_i);
        return chirp_sum(cfg.n_antennas, c.a, c.b);
    }

    double rho_nf_exact(const ArrayConfig &cfg, double phi, double theta_k, double r_k, double psi)
    {
        const ChirpCoefficients c = nf_coefficients(cfg, phi, theta_k, r_k, psi);
        return chirp_sum(cfg.n_antennas, c.a, c.b);
    }

    std::optional<BetaPair> rho_nn_betas(const ArrayConfig &cfg, double phi, double theta_k, double r_k,
                                         double theta_i, double r_i)
    {
        return betas_from(cfg.n_antennas, nn_coefficients(cfg, phi, theta_k, r_k, theta_i, r_i));
    }

    std::optional<BetaPair> rho_nf_betas(const ArrayConfig &cfg, double phi, double theta_k, double r_k, double psi)
    {
        return betas_from(cfg.n_antennas, nf_coefficients(cfg, phi, theta_k, r_k, psi));
    }

    double rho_approx(const BetaPair &betas) { return g_kernel(betas.beta1, betas.beta2); }

    double dirichlet_kernel(int n_antennas, double u)
    {
        const double den = double(n_antennas) * std::sin(0.5 * pi * u);
        if (std::abs(den) < 1e-12)
        {
            // u at a multiple of 2: every summand has unit phase
            return 1.0;
        }
        return std::abs(std::sin(0.5 * pi * double(n_antennas) * u) / den);
    }

    double rho_nn_approx(const ArrayConfig &cfg, double phi, double theta_k, double r_k, double theta_i, double r_i)
    {
        return approx_from(cfg.n_antennas, nn_coefficients(cfg, phi, theta_k, r_k, theta_i, r_i));
    }

    double rho_nf_approx(const ArrayConfig &cfg, double phi, double theta_k, double r_k, double psi)
    {
        return approx_from(cfg.n_antennas, nf_coefficients(cfg, phi, theta_k, r_k, psi));
    }

    InterferenceReport analyze_nn(const ArrayConfig &cfg, double phi, double theta_k, double r_k, double theta_i,
                                  double r_i)
    {
        const ChirpCoefficients c = nn_coefficients(cfg, phi, theta_k, r_k, theta_i, r_i);
        InterferenceReport rep;
        rep.kind = InterferenceKind::near_near;
        rep.exact = chirp_sum(cfg.n_antennas, c.a, c.b);
        rep.fresnel_approx = approx_from(cfg.n_antennas, c);
        rep.betas = betas_from(cfg.n_antennas, c);
        return rep;
    }

    InterferenceReport analyze_nf(const ArrayConfig &cfg, double phi, double theta_k, double r_k, double psi)
    {
        const ChirpCoefficients c = nf_coefficients(cfg, phi, theta_k, r_k, psi);
        InterferenceReport rep;
        rep.kind = InterferenceKind::near_far;
        rep.exact = chirp_sum(cfg.n_antennas, c.a, c.b);
        rep.fresnel_approx = approx_from(cfg.n_antennas, c);
        rep.betas = betas_from(cfg.n_antennas, c);
        return rep;
    }

    double optimal_rotation_same_angle_nn(double theta, AngleRange range) { return same_angle_rule(theta, range); }

    double optimal_rotation_same_angle_nf(double psi, AngleRange range) { return same_angle_rule(psi, range); }
}
