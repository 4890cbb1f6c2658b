// SPDX-License-Identifier: Apache-2.0
//
// ramix - rotatable-antenna mixed near-field/far-field simulator

#include "ramix/numerics.hpp"
#include "ramix/errors.hpp"

#include <cmath>
#include <limits>

namespace ramix
{
    namespace
    {
        constexpr double series_limit = 1.5;
        constexpr double eps = 1e-16;
        constexpr int max_terms = 200;

        // cos/sin of pi x^2 / 2 with the argument reduced modulo 4 in x^2 units,
        // keeping full precision for large |x|
        std::complex<double> unit_chirp(double x)
        {
            const double sq = x * x;
            const double lo = std::fma(x, x, -sq);
            const double reduced = std::fmod(sq, 4.0) + lo;
            const double arg = 0.5 * pi * reduced;
            return {std::cos(arg), std::sin(arg)};
        }

        FresnelPair fresnel_series(double x)
        {
            // x (pi x^2/2)^j / j! / (2j+1), even j feed C, odd j feed S, signs alternate in pairs
            const double t = 0.5 * pi * x * x;
            double term = x;
            double c = 0.0, s = 0.0;
            for (int j = 0; j < max_terms; ++j)
            {
                if (j > 0)
                    term *= t / j;
                const double contrib = term / (2 * j + 1);
                const bool negative = (j / 2) % 2 == 1;
                if (j % 2 == 0)
                    c += negative ? -contrib : contrib;
                else
                    s += negative ? -contrib : contrib;
                if (j > 2 && contrib < eps * std::abs(c))
                    break;
            }
            return {c, s};
        }

        // Modified Lentz evaluation of the continued fraction for the complementary error function
        // along the Fresnel contour; valid for x > series_limit
        FresnelPair fresnel_continued_fraction(double x)
        {
            constexpr double tiny = 1e-300;
            const double pix2 = pi * x * x;
            std::complex<double> b(1.0, -pix2);
            std::complex<double> cc(1.0 / tiny, 0.0);
            std::complex<double> d = 1.0 / b;
            std::complex<double> h = d;
            double n = -1.0;
            int k = 2;
            for (; k <= max_terms; ++k)
            {
                n += 2.0;
                const double a = -n * (n + 1.0);
                b += 4.0;
                d = 1.0 / (a * d + b);
                cc = b + a / cc;
                const std::complex<double> del = cc * d;
                h *= del;
                if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < eps)
                    break;
            }
            if (k > max_terms)
                throw DomainError("fresnel: continued fraction failed to converge");
            h *= std::complex<double>(x, -x);
            const std::complex<double> cs = std::complex<double>(0.5, 0.5) * (1.0 - unit_chirp(x) * h);
            return {cs.real(), cs.imag()};
        }
    }

    FresnelPair fresnel(double x)
    {
        if (!std::isfinite(x))
            throw DomainError("fresnel: argument must be finite");
        const double ax = std::abs(x);
        FresnelPair r = ax <= series_limit ? fresnel_series(ax) : fresnel_continued_fraction(ax);
        if (x < 0.0)
        {
            r.c = -r.c;
            r.s = -r.s;
        }
        return r;
    }

    double g_kernel(double beta1, double beta2)
    {
        if (!(beta2 >= 0.0) || !std::isfinite(beta1) || !std::isfinite(beta2))
            throw DomainError("g_kernel: beta2 must be finite and nonnegative");

        if (beta2 < g_kernel_switchover)
        {
            // integral over [beta1 - beta2, beta1 + beta2] of a chirp whose phase is locally linear
            const double u = pi * beta1 * beta2;
            return std::abs(u) < 1e-8 ? 1.0 : std::abs(std::sin(u) / u);
        }

        const FresnelPair hi = fresnel(beta1 + beta2);
        const FresnelPair lo = fresnel(beta1 - beta2);
        const double dc = hi.c - lo.c;
        const double ds = hi.s - lo.s;
        return std::hypot(dc, ds) / (2.0 * beta2);
    }

    ComplexMatrix pseudo_inverse(const ComplexMatrix &m)
    {
        if (m.rows() == 0 || m.cols() == 0)
            throw DomainError("pseudo_inverse: empty matrix");
        if (m.rows() > m.cols())
            throw DomainError("pseudo_inverse: expected a wide or square matrix (full row rank)");

        Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd &sv = svd.singularValues();
        const double smax = sv(0);
        const double smin = sv(sv.size() - 1);
        const double tol = std::numeric_limits<double>::epsilon() * double(m.cols()) * smax;
        if (!(smin > tol))
            throw SingularMatrixError("pseudo_inverse: matrix is rank deficient", smin);

        const Eigen::VectorXd inv = sv.cwiseInverse();
        return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
    }

    std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id),
          engine_(splitmix64(seed ^ splitmix64(stream_id ^ 0x5851F42D4C957F2DULL)))
    {
    }

    RngStream RngStream::derived(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
    {
        std::uint64_t id = 0x2545F4914F6CDD1DULL;
        for (std::uint64_t p : path)
            id = splitmix64(id ^ splitmix64(p));
        return RngStream(seed, id);
    }

    double RngStream::uniform()
    {
        return double(engine_() >> 11) * 0x1.0p-53;
    }

    double RngStream::uniform(double lo, double hi)
    {
        return lo + (hi - lo) * uniform();
    }
}
