// SPDX-License-Identifier: Apache-2.0
//
// ramix - rotatable-antenna mixed near-field/far-field simulator

#ifndef RAMIX_NUMERICS_HPP
#define RAMIX_NUMERICS_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace ramix
{
    using cplx = std::complex<double>;
    using ComplexVector = Eigen::VectorXcd;
    using ComplexMatrix = Eigen::MatrixXcd;

    inline constexpr double pi = std::numbers::pi;
    inline constexpr double speed_of_light = 299792458.0; // [m/s]

    struct FresnelPair
    {
        double c = 0.0; // C(x) = int_0^x cos(pi t^2 / 2) dt
        double s = 0.0; // S(x) = int_0^x sin(pi t^2 / 2) dt
    };

    // Fresnel integrals C(x), S(x). Absolute error below 1e-10 for all finite x.
    // Throws DomainError for non-finite input.
    FresnelPair fresnel(double x);

    // Below this beta2 the kernel switches to its small-width limit.
    inline constexpr double g_kernel_switchover = 1e-6;

    // Normalized chirp correlation G(beta1, beta2) = |C^ + j S^| / (2 beta2) with
    //   C^ = C(beta1 + beta2) - C(beta1 - beta2),  S^ = S(beta1 + beta2) - S(beta1 - beta2).
    // For beta2 < g_kernel_switchover the 0/0 form is replaced by its limit |sinc(beta1 beta2)|,
    // which equals 1 whenever beta1 stays bounded.
    double g_kernel(double beta1, double beta2);

    // Moore-Penrose pseudo-inverse of a full-row-rank matrix (rows <= cols).
    // Throws SingularMatrixError carrying the smallest singular value when rank deficient.
    ComplexMatrix pseudo_inverse(const ComplexMatrix &m);

    // Reproducible random stream. Identical (seed, stream_id) pairs give identical sequences
    // on every platform: uniform draws are built from raw 64-bit engine output, not from
    // std::uniform_real_distribution.
    class RngStream
    {
    public:
        RngStream(std::uint64_t seed, std::uint64_t stream_id);

        // Child stream keyed by a path of integers, e.g. (particle, iteration)
        static RngStream derived(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

        std::uint64_t seed() const { return seed_; }
        std::uint64_t stream_id() const { return stream_id_; }

        std::uint64_t next_u64() { return engine_(); }
        double uniform();                    // [0, 1)
        double uniform(double lo, double hi); // [lo, hi)

    private:
        std::uint64_t seed_;
        std::uint64_t stream_id_;
        std::mt19937_64 engine_;
    };

    std::uint64_t splitmix64(std::uint64_t x);
}

#endif
