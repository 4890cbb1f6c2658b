// SPDX-License-Identifier: Apache-2.0
//
// ramix - rotatable-antenna mixed near-field/far-field simulator

#include "ramix/geometry.hpp"
#include "ramix/errors.hpp"

#include <cmath>

namespace ramix
{
    namespace
    {
        int floor_div(int a, int b)
        {
            int q = a / b;
            if ((a % b != 0) && ((a < 0) != (b < 0)))
                --q;
            return q;
        }

        void check_rotation(const ArrayConfig &cfg, const RotationState &rot)
        {
            if (rot.size() != cfg.n_subarrays)
                throw DomainError("rotation state has " + std::to_string(rot.size()) + " angles, array has " +
                                  std::to_string(cfg.n_subarrays) + " subarrays");
        }
    }

    ArrayConfig ArrayConfig::half_wavelength(int n_antennas, int n_subarrays, double carrier_hz)
    {
        ArrayConfig cfg;
        cfg.n_antennas = n_antennas;
        cfg.n_subarrays = n_subarrays;
        cfg.carrier_hz = carrier_hz;
        cfg.spacing_m = 0.5 * speed_of_light / carrier_hz;
        return cfg;
    }

    double ArrayConfig::rayleigh_m() const
    {
        const double d = aperture();
        return 2.0 * d * d / wavelength();
    }

    double rayleigh_distance(const ArrayConfig &cfg) { return cfg.rayleigh_m(); }

    void ArrayConfig::validate() const
    {
        if (n_antennas < 1 || n_antennas % 2 == 0)
            throw DomainError("n_antennas must be a positive odd integer");
        if (n_subarrays < 1 || n_subarrays % 2 == 0)
            throw DomainError("n_subarrays must be a positive odd integer");
        if (n_subarrays > n_antennas)
            throw DomainError("n_subarrays exceeds n_antennas");
        if (per_subarray() % 2 == 0)
            throw DomainError("per-subarray element count floor(N/Q) = " + std::to_string(per_subarray()) +
                              " must be odd");
        if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz))
            throw DomainError("carrier frequency must be positive");
        if (spacing_m < 0.0 || !std::isfinite(spacing_m))
            throw DomainError("element spacing must be positive");
    }

    int ArrayConfig::subarray_of(int n) const
    {
        const int nb = per_subarray();
        const int q = floor_div(n + (nb - 1) / 2, nb);
        const int qh = half_subarrays();
        return q < -qh ? -qh : (q > qh ? qh : q);
    }

    std::pair<int, int> ArrayConfig::local_range(int q) const
    {
        const int qh = half_subarrays();
        if (q < -qh || q > qh)
            throw DomainError("subarray index out of range");
        const int nb = per_subarray();
        const int hb = (nb - 1) / 2;
        const int extra = (n_antennas - n_subarrays * nb) / 2;
        int lo = -hb, hi = hb;
        if (q == qh)
            hi += extra;
        if (q == -qh)
            lo -= extra;
        return {lo, hi};
    }

    RotationState RotationState::uniform(int n_subarrays, double angle, AngleRange range)
    {
        RotationState r;
        r.angles_rad.assign(std::size_t(n_subarrays), angle);
        r.ranges.assign(std::size_t(n_subarrays), range);
        return r;
    }

    bool RotationState::in_range() const
    {
        for (std::size_t i = 0; i < angles_rad.size(); ++i)
            if (i < ranges.size() && !ranges[i].contains(angles_rad[i]))
                return false;
        return true;
    }

    int RotationState::violating_pairs() const
    {
        int count = 0;
        for (std::size_t p = 0; p < angles_rad.size(); ++p)
            for (std::size_t q = p + 1; q < angles_rad.size(); ++q)
                if (std::abs(angles_rad[p] - angles_rad[q]) < pi / 2)
                    ++count;
        return count;
    }

    Point2 element_position(const ArrayConfig &cfg, const RotationState &rot, int q, int nbar)
    {
        check_rotation(cfg, rot);
        const auto [lo, hi] = cfg.local_range(q);
        if (nbar < lo || nbar > hi)
            throw DomainError("element index out of range for subarray " + std::to_string(q));
        const double delta = double(q * cfg.per_subarray() + nbar) * cfg.spacing();
        const double phi = rot.angle_of(q, cfg.half_subarrays());
        return {delta * std::cos(phi), delta * std::sin(phi)};
    }

    ComplexVector near_steering(const ArrayConfig &cfg, const RotationState &rot, double theta, double range_m,
                                DistanceModel model)
    {
        check_rotation(cfg, rot);
        if (!(range_m > 0.0))
            throw DomainError("near_steering: range must be positive");
        const int half = cfg.half_antennas();
        const int qh = cfg.half_subarrays();
        const double d = cfg.spacing();
        const double k = cfg.wavenumber();
        const double norm = 1.0 / std::sqrt(double(cfg.n_antennas));

        ComplexVector b(cfg.n_antennas);
        int q_prev = -qh - 1;
        double c = 0.0, s2 = 0.0;
        for (int n = -half; n <= half; ++n)
        {
            const int q = cfg.subarray_of(n);
            if (q != q_prev)
            {
                c = std::cos(rot.angle_of(q, qh) - theta);
                s2 = 1.0 - c * c;
                q_prev = q;
            }
            const double delta = n * d;
            double excess; // r^(n) - r
            if (model == DistanceModel::taylor)
                excess = -delta * c + delta * delta * s2 / (2.0 * range_m);
            else
            {
                const double num = delta * delta - 2.0 * range_m * delta * c;
                excess = num / (std::sqrt(range_m * range_m + num) + range_m);
            }
            b(n + half) = std::polar(norm, -k * excess);
        }
        return b;
    }

    ComplexVector far_steering(const ArrayConfig &cfg, const RotationState &rot, double psi)
    {
        check_rotation(cfg, rot);
        const int half = cfg.half_antennas();
        const int qh = cfg.half_subarrays();
        const double d = cfg.spacing();
        const double k = cfg.wavenumber();
        const double norm = 1.0 / std::sqrt(double(cfg.n_antennas));

        ComplexVector a(cfg.n_antennas);
        for (int n = -half; n <= half; ++n)
        {
            const int q = cfg.subarray_of(n);
            const double c = std::cos(psi - rot.angle_of(q, qh));
            a(n + half) = std::polar(norm, k * n * d * c);
        }
        return a;
    }

    void Scenario::validate() const
    {
        array.validate();
        const double z = array.rayleigh_m();
        std::vector<std::string> bad;
        for (std::size_t k = 0; k < near_users.size(); ++k)
        {
            const NearUser &u = near_users[k];
            if (!(u.theta_rad > 0.0 && u.theta_rad < pi))
                bad.push_back("near user " + std::to_string(k) + ": angle outside (0, pi)");
            if (!(u.range_m > 0.0))
                bad.push_back("near user " + std::to_string(k) + ": nonpositive distance");
            else if (!(u.range_m < z))
                bad.push_back("near user " + std::to_string(k) + ": distance beyond the Rayleigh distance");
            for (const NearScatterer &sc : u.scatterers)
                if (!(sc.range_m > 0.0))
                    bad.push_back("near user " + std::to_string(k) + ": scatterer with nonpositive distance");
        }
        for (std::size_t m = 0; m < far_users.size(); ++m)
        {
            const FarUser &u = far_users[m];
            if (!(u.psi_rad > 0.0 && u.psi_rad < pi))
                bad.push_back("far user " + std::to_string(m) + ": angle outside (0, pi)");
            if (!(u.range_m >= z))
                bad.push_back("far user " + std::to_string(m) + ": distance inside the Rayleigh distance");
            if (!(u.tx_power_w > 0.0))
                bad.push_back("far user " + std::to_string(m) + ": nonpositive transmit power");
        }
        if (int(rotation_ranges.size()) != array.n_subarrays)
            bad.push_back("rotation ranges: expected one range per subarray");
        for (const AngleRange &r : rotation_ranges)
            if (!(r.lo <= r.hi))
                bad.push_back("rotation ranges: empty interval");
        if (!(budget_w >= 0.0))
            bad.push_back("power budget must be nonnegative");
        if (!(noise_w > 0.0))
            bad.push_back("noise power must be positive");
        if (!bad.empty())
        {
            std::string what = "scenario validation failed:";
            for (const std::string &b : bad)
                what += "\n  " + b;
            throw ValidationError(what, bad);
        }
    }

    ChannelSet synthesize_channels(const ArrayConfig &cfg, const RotationState &rot, const Scenario &scenario,
                                   DistanceModel model)
    {
        scenario.validate();
        const double sqrt_n = std::sqrt(double(cfg.n_antennas));
        ChannelSet out;
        out.near.reserve(scenario.near_users.size());
        for (const NearUser &u : scenario.near_users)
        {
            ComplexVector h = (sqrt_n * u.los_gain) * near_steering(cfg, rot, u.theta_rad, u.range_m, model);
            for (const NearScatterer &sc : u.scatterers)
                h += (sqrt_n * sc.gain) * near_steering(cfg, rot, sc.theta_rad, sc.range_m, model);
            out.near.push_back(std::move(h));
        }
        out.far.reserve(scenario.far_users.size());
        for (const FarUser &u : scenario.far_users)
        {
            ComplexVector h = (sqrt_n * u.los_gain) * far_steering(cfg, rot, u.psi_rad);
            for (const FarScatterer &sc : u.scatterers)
                h += (sqrt_n * sc.gain) * far_steering(cfg, rot, sc.psi_rad);
            out.far.push_back(std::move(h));
        }
        return out;
    }

    double free_space_amplitude(double wavelength, double range_m)
    {
        return wavelength / (4.0 * pi * range_m);
    }
}
