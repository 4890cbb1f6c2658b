// SPDX-License-Identifier: Apache-2.0
//
// ramix - rotatable-antenna mixed near-field/far-field simulator

#ifndef RAMIX_INTERFERENCE_HPP
#define RAMIX_INTERFERENCE_HPP

#include "ramix/geometry.hpp"

#include <optional>

namespace ramix
{
    // Uniform-rotation interference analysis. All subarrays share one rotation angle phi.
    //
    // The closed forms below are written for a general spacing d. With d = lambda/2 they reduce to
    //   beta1 = (cos(phi - theta_k) - cos(phi - theta_i)) / sqrt(d |sin^2(phi - theta_k)/r_k - sin^2(phi - theta_i)/r_i|)
    //   beta2 = (N/2) sqrt(d |sin^2(phi - theta_k)/r_k - sin^2(phi - theta_i)/r_i|)
    // and the far-user variants drop the r_i term.

    struct BetaPair
    {
        double beta1 = 0.0; // angular mismatch
        double beta2 = 0.0; // aperture curvature, >= 0
    };

    enum class InterferenceKind
    {
        near_near,
        near_far
    };

    struct InterferenceReport
    {
        InterferenceKind kind = InterferenceKind::near_near;
        double exact = 0.0;
        double fresnel_approx = 0.0;
        std::optional<BetaPair> betas; // empty when the curvature difference vanishes
    };

    // (1/N) |sum_n exp(j k [n^2 d^2 (s_k/(2 r_k) - s_i/(2 r_i)) + n d (c_i - c_k)])| by direct summation
    double rho_nn_exact(const ArrayConfig &cfg, double phi, double theta_k, double r_k, double theta_i, double r_i);

    // Near user k against a far user at angle psi
    double rho_nf_exact(const ArrayConfig &cfg, double phi, double theta_k, double r_k, double psi);

    // Empty when the quadratic phase stays below 1e-12 pi over the aperture (Dirichlet kernel case)
    std::optional<BetaPair> rho_nn_betas(const ArrayConfig &cfg, double phi, double theta_k, double r_k,
                                         double theta_i, double r_i);
    std::optional<BetaPair> rho_nf_betas(const ArrayConfig &cfg, double phi, double theta_k, double r_k, double psi);

    // G(beta1, beta2)
    double rho_approx(const BetaPair &betas);

    // |sin(N pi u / 2) / (N sin(pi u / 2))|: the exact correlation when the quadratic phase cancels
    double dirichlet_kernel(int n_antennas, double u);

    // Fresnel approximation with the Dirichlet fallback for the degenerate case
    double rho_nn_approx(const ArrayConfig &cfg, double phi, double theta_k, double r_k, double theta_i, double r_i);
    double rho_nf_approx(const ArrayConfig &cfg, double phi, double theta_k, double r_k, double psi);

    InterferenceReport analyze_nn(const ArrayConfig &cfg, double phi, double theta_k, double r_k, double theta_i,
                                  double r_i);
    InterferenceReport analyze_nf(const ArrayConfig &cfg, double phi, double theta_k, double r_k, double psi);

    // Closed-form rotation for two users sharing one angle: push |phi - theta| toward pi/2 within the range.
    // Requires range.lo <= 0 <= range.hi.
    double optimal_rotation_same_angle_nn(double theta, AngleRange range);
    double optimal_rotation_same_angle_nf(double psi, AngleRange range);
}

#endif
