// SPDX-License-Identifier: Apache-2.0
//
// ramix - rotatable-antenna mixed near-field/far-field simulator

#ifndef RAMIX_GEOMETRY_HPP
#define RAMIX_GEOMETRY_HPP

#include "ramix/numerics.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ramix
{
    // Uniform linear array of N = 2*half + 1 elements split into Q = 2*q_half + 1 rotatable subarrays.
    // Each subarray gets floor(N/Q) elements, the remainder is split between the two outermost ones.
    struct ArrayConfig
    {
        int n_antennas = 129;
        int n_subarrays = 1;
        double carrier_hz = 24e9;
        double spacing_m = 0.0; // 0 selects half a wavelength

        static ArrayConfig half_wavelength(int n_antennas, int n_subarrays, double carrier_hz);

        double wavelength() const { return speed_of_light / carrier_hz; }
        double spacing() const { return spacing_m > 0.0 ? spacing_m : 0.5 * wavelength(); }
        double aperture() const { return (n_antennas - 1) * spacing(); }
        double rayleigh_m() const;
        double wavenumber() const { return 2.0 * pi / wavelength(); }

        int half_antennas() const { return (n_antennas - 1) / 2; }
        int half_subarrays() const { return (n_subarrays - 1) / 2; }
        int per_subarray() const { return n_antennas / n_subarrays; }

        // Throws DomainError when N, Q or the per-subarray count is even, or Q > N
        void validate() const;

        // Subarray index in [-q_half, q_half] owning global element n in [-half, half]
        int subarray_of(int n) const;
        // Inclusive local index range [lo, hi] of subarray q; the outermost subarrays extend outward
        std::pair<int, int> local_range(int q) const;
    };

    double rayleigh_distance(const ArrayConfig &cfg);

    struct AngleRange
    {
        double lo = -pi / 6.0;
        double hi = pi / 6.0;
        bool contains(double a) const { return a >= lo && a <= hi; }
        double clamp(double a) const { return a < lo ? lo : (a > hi ? hi : a); }
        double width() const { return hi - lo; }
    };

    // Per-subarray rotation angles, ordered from subarray -q_half to +q_half
    struct RotationState
    {
        std::vector<double> angles_rad;
        std::vector<AngleRange> ranges;

        static RotationState uniform(int n_subarrays, double angle, AngleRange range = {});

        int size() const { return int(angles_rad.size()); }
        double angle_of(int q, int q_half) const { return angles_rad[std::size_t(q + q_half)]; }
        bool in_range() const;
        // Number of unordered subarray pairs with |phi_p - phi_q| < pi/2
        int violating_pairs() const;
        bool all_pairs_obtuse() const { return violating_pairs() == 0; }
    };

    struct Point2
    {
        double x = 0.0;
        double y = 0.0;
    };

    // Position of local element nbar of subarray q after rotation; meters, origin at the array center
    Point2 element_position(const ArrayConfig &cfg, const RotationState &rot, int q, int nbar);

    struct NearScatterer
    {
        double theta_rad = pi / 2;
        double range_m = 1.0;
        cplx gain{0.0, 0.0};
    };

    struct FarScatterer
    {
        double psi_rad = pi / 2;
        cplx gain{0.0, 0.0};
    };

    struct NearUser
    {
        double theta_rad = pi / 2;
        double range_m = 1.0;
        cplx los_gain{1.0, 0.0};
        std::vector<NearScatterer> scatterers;
    };

    struct FarUser
    {
        double psi_rad = pi / 2;
        double range_m = 0.0; // nominal distance, used for path loss and near/far classification
        cplx los_gain{1.0, 0.0};
        double tx_power_w = 1.0;
        std::vector<FarScatterer> scatterers;
    };

    struct Scenario
    {
        ArrayConfig array;
        std::vector<NearUser> near_users;
        std::vector<FarUser> far_users;
        double budget_w = 1.0;         // maximum BS transmit power for near users
        double noise_w = 1e-10;        // per near user
        std::vector<AngleRange> rotation_ranges; // one per subarray

        int n_near() const { return int(near_users.size()); }
        int n_far() const { return int(far_users.size()); }

        // Throws ValidationError naming every offending user
        void validate() const;
    };

    enum class DistanceModel
    {
        taylor, // second-order expansion used by the analysis
        exact   // square-root distance
    };

    // Near-field steering vector b(theta, r, phi); entries ordered by global element index, 1/sqrt(N) normalized
    ComplexVector near_steering(const ArrayConfig &cfg, const RotationState &rot, double theta, double range_m,
                                DistanceModel model = DistanceModel::taylor);

    // Far-field steering vector a(psi, phi), the large-range limit of near_steering
    ComplexVector far_steering(const ArrayConfig &cfg, const RotationState &rot, double psi);

    struct ChannelSet
    {
        std::vector<ComplexVector> near; // h_{N,k}
        std::vector<ComplexVector> far;  // h_{F,m}
    };

    ChannelSet synthesize_channels(const ArrayConfig &cfg, const RotationState &rot, const Scenario &scenario,
                                   DistanceModel model = DistanceModel::taylor);

    // Free-space amplitude lambda / (4 pi r)
    double free_space_amplitude(double wavelength, double range_m);
}

#endif
