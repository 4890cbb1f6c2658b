// SPDX-License-Identifier: Apache-2.0
//
// ramix - rotatable-antenna mixed near-field/far-field simulator

#include "ramix/config.hpp"
#include "ramix/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace ramix
{
    namespace
    {
        std::string_view trim(std::string_view s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string_view::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        std::vector<std::string_view> split(std::string_view s, char sep)
        {
            std::vector<std::string_view> out;
            if (trim(s).empty())
                return out;
            std::size_t start = 0;
            for (;;)
            {
                const auto pos = s.find(sep, start);
                out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
                if (pos == std::string_view::npos)
                    break;
                start = pos + 1;
            }
            return out;
        }

        std::string fmt(double v)
        {
            char buf[64];
            const auto r = std::to_chars(buf, buf + sizeof buf, v);
            return std::string(buf, r.ptr);
        }

        std::string fmt_list(const std::vector<double> &v)
        {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i)
                s += (i ? ", " : "") + fmt(v[i]);
            return s;
        }

        std::string join(const std::vector<std::string> &v)
        {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i)
                s += (i ? ", " : "") + v[i];
            return s;
        }

        struct Ctx
        {
            int line;
            std::string field;

            [[noreturn]] void fail(const std::string &what) const { throw ConfigError(field + ": " + what, line, field); }
        };

        double to_double(std::string_view s, const Ctx &c)
        {
            double v = 0.0;
            const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
            if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
                c.fail("expected a finite number, got '" + std::string(s) + "'");
            return v;
        }

        template <class Int>
        Int to_int(std::string_view s, const Ctx &c)
        {
            Int v = 0;
            const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
            if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
                c.fail("expected an integer, got '" + std::string(s) + "'");
            return v;
        }

        bool to_bool(std::string_view s, const Ctx &c)
        {
            if (s == "true")
                return true;
            if (s == "false")
                return false;
            c.fail("expected true or false, got '" + std::string(s) + "'");
        }

        std::vector<double> to_doubles(std::string_view s, const Ctx &c)
        {
            std::vector<double> out;
            for (std::string_view t : split(s, ','))
                out.push_back(to_double(t, c));
            return out;
        }

        std::vector<std::string> to_words(std::string_view s)
        {
            std::vector<std::string> out;
            for (std::string_view t : split(s, ','))
                out.emplace_back(t);
            return out;
        }

        struct Field
        {
            const char *section;
            const char *key;
            bool repeatable;
            std::function<void(ScenarioConfig &, std::string_view, const Ctx &)> read;
            std::function<std::vector<std::string>(const ScenarioConfig &)> write; // one entry per emitted line
        };

        template <class T>
        Field number(const char *sec, const char *key, T ScenarioConfig::*block, double T::*member)
        {
            return {sec, key, false,
                    [=](ScenarioConfig &c, std::string_view v, const Ctx &x) { (c.*block).*member = to_double(v, x); },
                    [=](const ScenarioConfig &c) { return std::vector<std::string>{fmt((c.*block).*member)}; }};
        }

        template <class T>
        Field integer(const char *sec, const char *key, T ScenarioConfig::*block, int T::*member)
        {
            return {sec, key, false,
                    [=](ScenarioConfig &c, std::string_view v, const Ctx &x) { (c.*block).*member = to_int<int>(v, x); },
                    [=](const ScenarioConfig &c) { return std::vector<std::string>{std::to_string((c.*block).*member)}; }};
        }

        const std::vector<Field> &fields()
        {
            using C = ScenarioConfig;
            static const std::vector<Field> f = {
                integer("array", "n_antennas", &C::array, &ArrayBlock::n_antennas),
                integer("array", "n_subarrays", &C::array, &ArrayBlock::n_subarrays),
                number("array", "carrier_ghz", &C::array, &ArrayBlock::carrier_ghz),
                number("array", "spacing_mm", &C::array, &ArrayBlock::spacing_mm),

                integer("users", "n_near", &C::users, &UsersBlock::n_near),
                integer("users", "n_far", &C::users, &UsersBlock::n_far),
                number("users", "near_range_min_zray", &C::users, &UsersBlock::near_range_min_zray),
                number("users", "near_range_max_zray", &C::users, &UsersBlock::near_range_max_zray),
                number("users", "angle_min_deg", &C::users, &UsersBlock::angle_min_deg),
                number("users", "angle_max_deg", &C::users, &UsersBlock::angle_max_deg),
                number("users", "far_range_zray", &C::users, &UsersBlock::far_range_zray),
                integer("users", "nlos_paths", &C::users, &UsersBlock::nlos_paths),
                number("users", "nlos_gain_ratio", &C::users, &UsersBlock::nlos_gain_ratio),
                {"users", "near_user_deg_zray", true,
                 [](C &c, std::string_view v, const Ctx &x)
                 {
                     const std::vector<double> p = to_doubles(v, x);
                     if (p.size() != 2)
                         x.fail("expected '<angle_deg>, <range_zray>'");
                     c.users.near_users.push_back({p[0], p[1]});
                 },
                 [](const C &c)
                 {
                     std::vector<std::string> out;
                     for (const ExplicitNearUser &u : c.users.near_users)
                         out.push_back(fmt(u.theta_deg) + ", " + fmt(u.range_zray));
                     return out;
                 }},
                {"users", "far_user_deg", true,
                 [](C &c, std::string_view v, const Ctx &x) { c.users.far_users_deg.push_back(to_double(v, x)); },
                 [](const C &c)
                 {
                     std::vector<std::string> out;
                     for (double a : c.users.far_users_deg)
                         out.push_back(fmt(a));
                     return out;
                 }},

                number("powers", "budget_dbm", &C::powers, &PowersBlock::budget_dbm),
                number("powers", "far_power_dbm", &C::powers, &PowersBlock::far_power_dbm),
                number("powers", "noise_dbm", &C::powers, &PowersBlock::noise_dbm),

                number("rotation", "min_deg", &C::rotation, &RotationBlock::min_deg),
                number("rotation", "max_deg", &C::rotation, &RotationBlock::max_deg),
                {"rotation", "strict_obtuse", false,
                 [](C &c, std::string_view v, const Ctx &x) { c.rotation.strict_obtuse = to_bool(v, x); },
                 [](const C &c) { return std::vector<std::string>{c.rotation.strict_obtuse ? "true" : "false"}; }},

                integer("sca", "max_iters", &C::sca, &ScaBlock::max_iters),
                number("sca", "tol_bps", &C::sca, &ScaBlock::tol_bps),
                number("sca", "subsolver_tol", &C::sca, &ScaBlock::subsolver_tol),
                integer("sca", "subsolver_max_iters", &C::sca, &ScaBlock::subsolver_max_iters),

                integer("pso", "swarm", &C::pso, &PsoBlock::swarm),
                integer("pso", "iters", &C::pso, &PsoBlock::iters),
                number("pso", "inertia", &C::pso, &PsoBlock::inertia),
                number("pso", "c1", &C::pso, &PsoBlock::c1),
                number("pso", "c2", &C::pso, &PsoBlock::c2),
                number("pso", "penalty_bps", &C::pso, &PsoBlock::penalty_bps),
                number("pso", "velocity_clamp_frac", &C::pso, &PsoBlock::velocity_clamp_frac),
                number("pso", "angle_quantum_rad", &C::pso, &PsoBlock::angle_quantum_rad),

                {"run", "seed", false,
                 [](C &c, std::string_view v, const Ctx &x) { c.run.seed = to_int<std::uint64_t>(v, x); },
                 [](const C &c) { return std::vector<std::string>{std::to_string(c.run.seed)}; }},
                {"run", "scale", false,
                 [](C &c, std::string_view v, const Ctx &x)
                 {
                     if (v == "config")
                         c.run.scale = Scale::config;
                     else if (v == "desk")
                         c.run.scale = Scale::desk;
                     else if (v == "full")
                         c.run.scale = Scale::full;
                     else
                         x.fail("expected config, desk or full");
                 },
                 [](const C &c) { return std::vector<std::string>{std::string(to_string(c.run.scale))}; }},
                {"run", "distance_model", false,
                 [](C &c, std::string_view v, const Ctx &x)
                 {
                     if (v == "taylor")
                         c.run.distance_model = DistanceModel::taylor;
                     else if (v == "exact")
                         c.run.distance_model = DistanceModel::exact;
                     else
                         x.fail("expected taylor or exact");
                 },
                 [](const C &c)
                 { return std::vector<std::string>{c.run.distance_model == DistanceModel::exact ? "exact" : "taylor"}; }},
                {"run", "schemes", false, [](C &c, std::string_view v, const Ctx &) { c.run.schemes = to_words(v); },
                 [](const C &c) { return std::vector<std::string>{join(c.run.schemes)}; }},

                {"analyze", "recipe", false, [](C &c, std::string_view v, const Ctx &) { c.analyze.recipe = v; },
                 [](const C &c) { return std::vector<std::string>{c.analyze.recipe}; }},
                number("analyze", "phi_step_pi", &C::analyze, &AnalyzeBlock::phi_step_pi),
                integer("analyze", "points", &C::analyze, &AnalyzeBlock::points),

                {"sweep", "parameter", false,
                 [](C &c, std::string_view v, const Ctx &x)
                 {
                     for (SweepParameter p : {SweepParameter::tx_power, SweepParameter::far_power,
                                              SweepParameter::n_near, SweepParameter::n_far})
                         if (to_string(p) == v)
                         {
                             c.sweep.parameter = p;
                             return;
                         }
                     x.fail("expected tx_power, far_power, n_near or n_far");
                 },
                 [](const C &c) { return std::vector<std::string>{std::string(to_string(c.sweep.parameter))}; }},
                {"sweep", "values", false, [](C &c, std::string_view v, const Ctx &x) { c.sweep.values = to_doubles(v, x); },
                 [](const C &c) { return std::vector<std::string>{fmt_list(c.sweep.values)}; }},
                {"sweep", "schemes", false, [](C &c, std::string_view v, const Ctx &) { c.sweep.schemes = to_words(v); },
                 [](const C &c) { return std::vector<std::string>{join(c.sweep.schemes)}; }},
                integer("sweep", "seeds", &C::sweep, &SweepBlock::seeds),
            };
            return f;
        }
    }

    std::string_view to_string(SweepParameter p)
    {
        switch (p)
        {
        case SweepParameter::tx_power:
            return "tx_power";
        case SweepParameter::far_power:
            return "far_power";
        case SweepParameter::n_near:
            return "n_near";
        case SweepParameter::n_far:
            return "n_far";
        }
        return "?";
    }

    std::string_view to_string(Scale s)
    {
        switch (s)
        {
        case Scale::config:
            return "config";
        case Scale::desk:
            return "desk";
        case Scale::full:
            return "full";
        }
        return "?";
    }

    ScenarioConfig parse_config(std::string_view text)
    {
        std::vector<std::pair<int, std::string_view>> lines;
        bool embedded = false;
        {
            int no = 0;
            std::size_t start = 0;
            while (start <= text.size())
            {
                const auto pos = text.find('\n', start);
                const std::string_view raw = text.substr(start, pos == std::string_view::npos ? pos : pos - start);
                ++no;
                if (raw.rfind("#cfg ", 0) == 0)
                {
                    if (!embedded)
                        lines.clear();
                    embedded = true;
                    lines.emplace_back(no, raw.substr(5));
                }
                else if (!embedded)
                    lines.emplace_back(no, raw);
                if (pos == std::string_view::npos)
                    break;
                start = pos + 1;
            }
        }

        ScenarioConfig cfg;
        std::string section;
        std::set<std::string> seen;
        std::set<std::string> cleared;
        for (const auto &[no, raw] : lines)
        {
            std::string_view line = trim(raw);
            if (line.empty() || line.front() == '#' || line.front() == ';')
                continue;
            if (line.front() == '[')
            {
                if (line.back() != ']')
                    throw ConfigError("malformed section header '" + std::string(line) + "'", no);
                section = std::string(trim(line.substr(1, line.size() - 2)));
                bool known = false;
                for (const Field &f : fields())
                    known = known || section == f.section;
                if (!known)
                    throw ConfigError("unknown section [" + section + "]", no, section);
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
                throw ConfigError("expected 'key = value', got '" + std::string(line) + "'", no);
            const std::string key(trim(line.substr(0, eq)));
            const std::string_view value = trim(line.substr(eq + 1));
            if (section.empty())
                throw ConfigError("key '" + key + "' appears before any [section]", no, key);
            const std::string name = section + "." + key;
            const Field *field = nullptr;
            for (const Field &f : fields())
                if (section == f.section && key == f.key)
                    field = &f;
            if (!field)
                throw ConfigError("unknown key '" + key + "' in [" + section + "]", no, name);
            if (!field->repeatable && !seen.insert(name).second)
                throw ConfigError("duplicate key '" + key + "' in [" + section + "]", no, name);
            if (field->repeatable && cleared.insert(name).second)
            {
                // the first occurrence replaces the defaults
                if (key == "near_user_deg_zray")
                    cfg.users.near_users.clear();
                else
                    cfg.users.far_users_deg.clear();
            }
            field->read(cfg, value, Ctx{no, name});
        }
        return cfg;
    }

    ScenarioConfig load_config(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError("cannot open config file '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_config(ss.str());
    }

    std::string write_config(const ScenarioConfig &cfg)
    {
        std::string out;
        std::string section;
        for (const Field &f : fields())
        {
            if (section != f.section)
            {
                section = f.section;
                out += (out.empty() ? "[" : "\n[") + section + "]\n";
            }
            for (const std::string &v : f.write(cfg))
                out += std::string(f.key) + " = " + v + "\n";
        }
        return out;
    }

    void check_config(const ScenarioConfig &c)
    {
        auto bad = [](const std::string &field, const std::string &what) { throw ConfigError(field + ": " + what, 0, field); };
        try
        {
            make_array(c.array).validate();
        }
        catch (const DomainError &e)
        {
            bad("array", e.what());
        }
        if (c.users.n_near < 0 || c.users.n_far < 0)
            bad("users.n_near", "user counts must be nonnegative");
        if (!(0.0 < c.users.near_range_min_zray && c.users.near_range_min_zray <= c.users.near_range_max_zray &&
              c.users.near_range_max_zray < 1.0))
            bad("users.near_range_min_zray", "near region must satisfy 0 < min <= max < 1 Rayleigh distance");
        if (!(0.0 < c.users.angle_min_deg && c.users.angle_min_deg <= c.users.angle_max_deg && c.users.angle_max_deg < 180.0))
            bad("users.angle_min_deg", "angle region must satisfy 0 < min <= max < 180 degrees");
        if (!(c.users.far_range_zray >= 1.0))
            bad("users.far_range_zray", "far users must sit at or beyond the Rayleigh distance");
        if (c.users.nlos_paths < 0)
            bad("users.nlos_paths", "must be nonnegative");
        if (!(c.users.nlos_gain_ratio >= 0.0))
            bad("users.nlos_gain_ratio", "must be nonnegative");
        if (!(c.rotation.min_deg <= 0.0 && 0.0 <= c.rotation.max_deg))
            bad("rotation.min_deg", "the rotation range must contain 0");
        try
        {
            make_sca(c).validate();
            make_pso(c, 1).validate();
        }
        catch (const DomainError &e)
        {
            bad("sca/pso", e.what());
        }
        for (const std::string &s : c.run.schemes)
            try
            {
                parse_scheme(s);
            }
            catch (const DomainError &e)
            {
                bad("run.schemes", e.what());
            }
        for (const std::string &s : c.sweep.schemes)
            try
            {
                parse_scheme(s);
            }
            catch (const DomainError &e)
            {
                bad("sweep.schemes", e.what());
            }
        if (c.sweep.seeds < 1)
            bad("sweep.seeds", "must be at least 1");
        if (!(c.analyze.phi_step_pi > 0.0))
            bad("analyze.phi_step_pi", "must be positive");
        if (c.analyze.points < 1)
            bad("analyze.points", "must be at least 1");
    }

    double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

    ArrayConfig make_array(const ArrayBlock &b)
    {
        ArrayConfig a;
        a.n_antennas = b.n_antennas;
        a.n_subarrays = b.n_subarrays;
        a.carrier_hz = b.carrier_ghz * 1e9;
        a.spacing_m = b.spacing_mm * 1e-3;
        return a;
    }

    ScaConfig make_sca(const ScenarioConfig &c)
    {
        ScaConfig s;
        s.max_iters = c.sca.max_iters;
        s.tol = c.sca.tol_bps;
        s.subsolver_tol = c.sca.subsolver_tol;
        s.subsolver_max_iters = c.sca.subsolver_max_iters;
        return s;
    }

    PsoConfig make_pso(const ScenarioConfig &c, int threads)
    {
        PsoConfig p;
        p.swarm = c.pso.swarm;
        p.iters = c.pso.iters;
        p.inertia = c.pso.inertia;
        p.c1 = c.pso.c1;
        p.c2 = c.pso.c2;
        p.penalty = c.pso.penalty_bps;
        p.velocity_clamp_frac = c.pso.velocity_clamp_frac;
        p.angle_quantum = c.pso.angle_quantum_rad;
        p.seed = c.run.seed;
        p.threads = threads;
        p.penalty_mode = c.rotation.strict_obtuse ? PenaltyMode::on : PenaltyMode::automatic;
        return p;
    }

    Scenario build_scenario(const ScenarioConfig &c, std::uint64_t seed)
    {
        check_config(c);
        Scenario s;
        s.array = make_array(c.array);
        s.budget_w = dbm_to_watts(c.powers.budget_dbm);
        s.noise_w = dbm_to_watts(c.powers.noise_dbm);
        s.rotation_ranges.assign(std::size_t(c.array.n_subarrays),
                                 AngleRange{c.rotation.min_deg * pi / 180.0, c.rotation.max_deg * pi / 180.0});

        const double z = s.array.rayleigh_m();
        const double lambda = s.array.wavelength();
        const double a_lo = c.users.angle_min_deg * pi / 180.0, a_hi = c.users.angle_max_deg * pi / 180.0;
        const double r_lo = c.users.near_range_min_zray * z, r_hi = c.users.near_range_max_zray * z;
        const double ratio = c.users.nlos_gain_ratio;

        const int n_near = c.users.near_users.empty() ? c.users.n_near : int(c.users.near_users.size());
        for (int k = 0; k < n_near; ++k)
        {
            RngStream rng = RngStream::derived(seed, {1, std::uint64_t(k)});
            NearUser u;
            u.theta_rad = rng.uniform(a_lo, a_hi);
            u.range_m = rng.uniform(r_lo, r_hi);
            if (!c.users.near_users.empty())
            {
                u.theta_rad = c.users.near_users[std::size_t(k)].theta_deg * pi / 180.0;
                u.range_m = c.users.near_users[std::size_t(k)].range_zray * z;
            }
            const double amp = free_space_amplitude(lambda, u.range_m);
            u.los_gain = std::polar(amp, rng.uniform(0.0, 2.0 * pi));
            for (int l = 0; l < c.users.nlos_paths; ++l)
            {
                NearScatterer sc;
                sc.theta_rad = rng.uniform(a_lo, a_hi);
                sc.range_m = rng.uniform(r_lo, r_hi);
                sc.gain = std::polar(ratio * amp, rng.uniform(0.0, 2.0 * pi));
                u.scatterers.push_back(sc);
            }
            s.near_users.push_back(std::move(u));
        }

        const int n_far = c.users.far_users_deg.empty() ? c.users.n_far : int(c.users.far_users_deg.size());
        for (int m = 0; m < n_far; ++m)
        {
            RngStream rng = RngStream::derived(seed, {2, std::uint64_t(m)});
            FarUser u;
            u.psi_rad = rng.uniform(a_lo, a_hi);
            if (!c.users.far_users_deg.empty())
                u.psi_rad = c.users.far_users_deg[std::size_t(m)] * pi / 180.0;
            u.range_m = c.users.far_range_zray * z;
            u.tx_power_w = dbm_to_watts(c.powers.far_power_dbm);
            const double amp = free_space_amplitude(lambda, u.range_m);
            u.los_gain = std::polar(amp, rng.uniform(0.0, 2.0 * pi));
            for (int l = 0; l < c.users.nlos_paths; ++l)
            {
                FarScatterer sc;
                sc.psi_rad = rng.uniform(a_lo, a_hi);
                sc.gain = std::polar(ratio * amp, rng.uniform(0.0, 2.0 * pi));
                u.scatterers.push_back(sc);
            }
            s.far_users.push_back(std::move(u));
        }
        s.validate();
        return s;
    }
}
