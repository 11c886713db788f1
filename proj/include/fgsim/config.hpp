#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fgsim/dynamics.hpp"
#include "fgsim/errors.hpp"
#include "fgsim/exotic.hpp"
#include "fgsim/integrator.hpp"
#include "fgsim/levitation.hpp"
#include "fgsim/sensitivity.hpp"
#include "fgsim/spectral.hpp"

namespace fgsim {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace cfg_detail {

inline void check_keys(const json& obj, const std::string& scope,
                       const std::vector<std::string>& allowed) {
    if (!obj.is_object()) throw ParameterError("config: '" + scope + "' must be an object");
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const auto& k : allowed)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw ParameterError("config: unknown key '" + item.key() + "' in '" + scope + "'");
    }
}

inline double get_num(const json& obj, const std::string& key, double dflt,
                      const std::string& scope) {
    if (!obj.contains(key)) return dflt;
    if (!obj.at(key).is_number())
        throw ParameterError("config: '" + scope + "." + key + "' must be a number");
    return obj.at(key).get<double>();
}

inline bool get_bool(const json& obj, const std::string& key, bool dflt,
                     const std::string& scope) {
    if (!obj.contains(key)) return dflt;
    if (!obj.at(key).is_boolean())
        throw ParameterError("config: '" + scope + "." + key + "' must be a bool");
    return obj.at(key).get<bool>();
}

inline std::string get_str(const json& obj, const std::string& key, const std::string& dflt,
                           const std::string& scope) {
    if (!obj.contains(key)) return dflt;
    if (!obj.at(key).is_string())
        throw ParameterError("config: '" + scope + "." + key + "' must be a string");
    return obj.at(key).get<std::string>();
}

inline Vec3 get_vec3(const json& obj, const std::string& key, const Vec3& dflt,
                     const std::string& scope) {
    if (!obj.contains(key)) return dflt;
    const json& a = obj.at(key);
    if (!a.is_array() || a.size() != 3 || !a[0].is_number() || !a[1].is_number() ||
        !a[2].is_number())
        throw ParameterError("config: '" + scope + "." + key +
                             "' must be an array of three numbers");
    return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

inline ojson vec3_json(const Vec3& v) { return ojson::array({v.x, v.y, v.z}); }

// Inclusive log grid with the endpoints exact.
inline std::vector<double> log_grid(double lo, double hi, double points_per_decade,
                                    const std::string& scope) {
    if (!(lo > 0.0) || !(hi > lo))
        throw ParameterError("config: '" + scope + "' needs 0 < min < max");
    if (!(points_per_decade > 0.0))
        throw ParameterError("config: '" + scope + ".points_per_decade' must be > 0");
    const double decades = std::log10(hi / lo);
    const std::size_t count =
        static_cast<std::size_t>(std::lround(decades * points_per_decade)) + 1;
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = lo * std::pow(10.0, decades * static_cast<double>(i) /
                                         static_cast<double>(count - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

inline std::vector<double> get_values(const json& a, const std::string& scope) {
    if (!a.is_array() || a.empty())
        throw ParameterError("config: '" + scope + "' must be a nonempty array of numbers");
    std::vector<double> out;
    out.reserve(a.size());
    for (const auto& v : a) {
        if (!v.is_number())
            throw ParameterError("config: '" + scope + "' must contain only numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline FGParams parse_fg(const json& root, const FGParams& dflt) {
    FGParams p = dflt;
    if (!root.contains("fg")) return p;
    const json& o = root.at("fg");
    check_keys(o, "fg", {"radius_m", "spin_count", "mass_kg", "moment_per_spin_J_per_T"});
    p.radius_m = get_num(o, "radius_m", p.radius_m, "fg");
    p.spin_count = get_num(o, "spin_count", p.spin_count, "fg");
    p.mass_kg = get_num(o, "mass_kg", p.mass_kg, "fg");
    p.moment_per_spin_J_per_T = get_num(o, "moment_per_spin_J_per_T", p.moment_per_spin_J_per_T, "fg");
    p.validate();
    return p;
}

inline ojson fg_json(const FGParams& p) {
    ojson o;
    o["radius_m"] = p.radius_m;
    o["spin_count"] = p.spin_count;
    o["mass_kg"] = p.mass_kg;
    o["moment_per_spin_J_per_T"] = p.moment_per_spin_J_per_T;
    return o;
}

inline PhysicalConstants parse_environment(const json& root) {
    PhysicalConstants c;
    if (!root.contains("environment")) return c;
    const json& o = root.at("environment");
    check_keys(o, "environment", {"g_m_per_s2"});
    c.g_grav = get_num(o, "g_m_per_s2", c.g_grav, "environment");
    if (!(c.g_grav >= 0.0)) throw ParameterError("config: environment.g_m_per_s2 must be >= 0");
    return c;
}

inline ojson environment_json(const PhysicalConstants& c) {
    ojson o;
    o["g_m_per_s2"] = c.g_grav;
    return o;
}

inline GasParams parse_gas(const json& root) {
    GasParams g;
    if (!root.contains("gas")) return g;
    const json& o = root.at("gas");
    check_keys(o, "gas", {"species_mass_kg", "temperature_K", "number_density_m3"});
    g.species_mass_kg = get_num(o, "species_mass_kg", g.species_mass_kg, "gas");
    g.temperature_K = get_num(o, "temperature_K", g.temperature_K, "gas");
    g.number_density_m3 = get_num(o, "number_density_m3", g.number_density_m3, "gas");
    g.validate();
    return g;
}

inline ojson gas_json(const GasParams& g) {
    ojson o;
    o["species_mass_kg"] = g.species_mass_kg;
    o["temperature_K"] = g.temperature_K;
    o["number_density_m3"] = g.number_density_m3;
    return o;
}

inline SQUIDParams parse_squid(const json& root) {
    SQUIDParams s;
    if (!root.contains("squid")) return s;
    const json& o = root.at("squid");
    check_keys(o, "squid", {"loop_radius_m", "standoff_m", "flux_noise_T_m2_per_sqrt_hz"});
    s.loop_radius_m = get_num(o, "loop_radius_m", s.loop_radius_m, "squid");
    s.standoff_m = get_num(o, "standoff_m", s.standoff_m, "squid");
    s.flux_noise_Tm2_sqrtHz =
        get_num(o, "flux_noise_T_m2_per_sqrt_hz", s.flux_noise_Tm2_sqrtHz, "squid");
    s.validate();
    return s;
}

inline ojson squid_json(const SQUIDParams& s) {
    ojson o;
    o["loop_radius_m"] = s.loop_radius_m;
    o["standoff_m"] = s.standoff_m;
    o["flux_noise_T_m2_per_sqrt_hz"] = s.flux_noise_Tm2_sqrtHz;
    return o;
}

inline SuppressionMode parse_suppression_mode(const std::string& s, const std::string& scope) {
    if (s == "off") return SuppressionMode::Off;
    if (s == "amplitude") return SuppressionMode::Amplitude;
    if (s == "sqrt_power") return SuppressionMode::SqrtPower;
    throw ParameterError("config: '" + scope +
                         ".mode' must be one of off, amplitude, sqrt_power");
}

// Suppression block: mode is the noise convention; factor defaults to the
// levitation feedback ratio of the configured sphere.
struct SuppressionChoice {
    SuppressionMode mode = SuppressionMode::SqrtPower;
    double factor = 1.0;
};

inline SuppressionChoice parse_suppression(const json& root, const FGParams& fg,
                                           const PhysicalConstants& c) {
    SuppressionChoice out;
    std::optional<double> factor;
    if (root.contains("suppression")) {
        const json& o = root.at("suppression");
        check_keys(o, "suppression", {"mode", "factor"});
        out.mode = parse_suppression_mode(get_str(o, "mode", "sqrt_power", "suppression"),
                                          "suppression");
        if (o.contains("factor")) factor = get_num(o, "factor", 1.0, "suppression");
    }
    if (factor) {
        if (!(*factor >= 1.0))
            throw ParameterError("config: suppression.factor must be >= 1");
        out.factor = *factor;
    } else {
        out.factor = equilibrium_height(fg, c).suppression_factor;
    }
    return out;
}

inline ojson suppression_json(const SuppressionChoice& s) {
    ojson o;
    o["mode"] = to_string(s.mode);
    o["factor"] = s.factor;
    return o;
}

}  // namespace cfg_detail

// ---------------------------------------------------------------------------
// simulate

struct SimulateJob {
    FGParams fg;
    PhysicalConstants consts;
    ModelConfig model;
    FGState initial;
    IntegratorConfig integ;
    double duration_s = 0.0;
    bool flux_enabled = false;
    FluxMode flux_mode = FluxMode::ClosedForm;
    SQUIDParams squid;
};

inline SimulateJob parse_simulate(const json& root) {
    using namespace cfg_detail;
    check_keys(root, "(top level)",
               {"fg", "model", "initial", "duration_s", "integrator", "flux", "squid",
                "environment"});
    SimulateJob job;
    job.consts = parse_environment(root);
    job.fg = parse_fg(root, FGParams{});
    const DerivedFG d = derive(job.fg, job.consts);

    if (root.contains("model")) {
        const json& o = root.at("model");
        check_keys(o, "model", {"kind", "B_ext_T", "image_field", "gravity", "frozen_com"});
        const std::string kind = get_str(o, "kind", "free_fg", "model");
        if (kind == "free_fg")
            job.model.kind = ModelKind::FreeFG;
        else if (kind == "magnetic_brick")
            job.model.kind = ModelKind::MagneticBrick;
        else if (kind == "levitated_fg")
            job.model.kind = ModelKind::LevitatedFG;
        else
            throw ParameterError(
                "config: model.kind must be one of free_fg, magnetic_brick, levitated_fg");
        job.model.B_ext_T = get_vec3(o, "B_ext_T", {0.0, 0.0, 0.0}, "model");
        const bool levitated = job.model.kind == ModelKind::LevitatedFG;
        job.model.image_field = get_bool(o, "image_field", levitated, "model");
        job.model.gravity = get_bool(o, "gravity", levitated, "model");
        job.model.frozen_com = get_bool(o, "frozen_com", false, "model");
    }
    if (job.model.kind == ModelKind::LevitatedFG) job.model.image_field = true;

    // Initial state. tilt_deg places n in the x-z plane with n_z = sin(tilt);
    // explicit n wins and may not be combined with tilt_deg.
    Vec3 n{1.0, 0.0, 0.0};
    Vec3 ell{0.0, 0.0, 0.0};
    Vec3 r{0.0, 0.0, 0.0};
    Vec3 p{0.0, 0.0, 0.0};
    bool have_r = false;
    if (root.contains("initial")) {
        const json& o = root.at("initial");
        check_keys(o, "initial", {"n", "tilt_deg", "ell", "r", "p"});
        if (o.contains("n") && o.contains("tilt_deg"))
            throw ParameterError("config: initial.n and initial.tilt_deg are exclusive");
        if (o.contains("tilt_deg")) {
            const double b = get_num(o, "tilt_deg", 0.0, "initial") * std::numbers::pi / 180.0;
            n = {std::cos(b), 0.0, std::sin(b)};
        } else {
            n = get_vec3(o, "n", n, "initial");
        }
        ell = get_vec3(o, "ell", ell, "initial");
        if (o.contains("r")) {
            r = get_vec3(o, "r", r, "initial");
            have_r = true;
        }
        p = get_vec3(o, "p", p, "initial");
    }
    if (norm(n) == 0.0) throw ParameterError("config: initial.n must be nonzero");
    // Normalize only when meaningfully off unit length, so feeding the echo
    // back reuses the stored bits verbatim.
    if (std::abs(norm(n) - 1.0) > 1e-12) n = normalized(n);
    job.initial.n = n;
    job.initial.j = (job.model.kind == ModelKind::MagneticBrick) ? ell : n + ell;
    job.initial.p = p;
    if (job.model.kind == ModelKind::LevitatedFG && !have_r)
        r = {0.0, 0.0, equilibrium_height(job.fg, job.consts).z_eq_m};
    job.initial.r = r;

    job.duration_s =
        get_num(root, "duration_s", 60.0 * 2.0 * std::numbers::pi / d.omega_I_rad_s,
                "(top level)");
    if (!(job.duration_s > 0.0)) throw ParameterError("config: duration_s must be > 0");

    if (root.contains("integrator")) {
        const json& o = root.at("integrator");
        check_keys(o, "integrator",
                   {"rel_tol", "abs_tol", "max_step_s", "initial_step_s", "sample_interval_s",
                    "renormalize_n", "max_steps"});
        job.integ.rel_tol = get_num(o, "rel_tol", job.integ.rel_tol, "integrator");
        job.integ.abs_tol = get_num(o, "abs_tol", job.integ.abs_tol, "integrator");
        job.integ.max_step_s = get_num(o, "max_step_s", job.integ.max_step_s, "integrator");
        job.integ.initial_step_s =
            get_num(o, "initial_step_s", job.integ.initial_step_s, "integrator");
        job.integ.sample_interval_s =
            get_num(o, "sample_interval_s", job.integ.sample_interval_s, "integrator");
        job.integ.renormalize_n = get_bool(o, "renormalize_n", true, "integrator");
        const double ms = get_num(o, "max_steps", static_cast<double>(job.integ.max_steps),
                                  "integrator");
        if (!(ms >= 1.0)) throw ParameterError("config: integrator.max_steps must be >= 1");
        job.integ.max_steps = static_cast<std::uint64_t>(ms);
    }
    if (job.integ.sample_interval_s == 0.0) job.integ.sample_interval_s = job.duration_s / 8192.0;
    job.integ.validate();

    job.squid = parse_squid(root);
    if (root.contains("flux")) {
        const json& o = root.at("flux");
        check_keys(o, "flux", {"enabled", "mode"});
        job.flux_enabled = get_bool(o, "enabled", false, "flux");
        const std::string m = get_str(o, "mode", "closed_form", "flux");
        if (m == "fast_nx")
            job.flux_mode = FluxMode::FastNx;
        else if (m == "closed_form")
            job.flux_mode = FluxMode::ClosedForm;
        else if (m == "quadrature")
            job.flux_mode = FluxMode::Quadrature;
        else
            throw ParameterError(
                "config: flux.mode must be one of fast_nx, closed_form, quadrature");
    }
    return job;
}

inline ojson echo_simulate(const SimulateJob& job) {
    using namespace cfg_detail;
    ojson o;
    o["fg"] = fg_json(job.fg);
    ojson m;
    m["kind"] = to_string(job.model.kind);
    m["B_ext_T"] = vec3_json(job.model.B_ext_T);
    m["image_field"] = job.model.image_field;
    m["gravity"] = job.model.gravity;
    m["frozen_com"] = job.model.frozen_com;
    o["model"] = m;
    ojson ini;
    ini["n"] = vec3_json(job.initial.n);
    // j was assembled from n and ell; store the resolved ell back.
    const Vec3 ell = (job.model.kind == ModelKind::MagneticBrick) ? job.initial.j
                                                                  : job.initial.j - job.initial.n;
    ini["ell"] = vec3_json(ell);
    ini["r"] = vec3_json(job.initial.r);
    ini["p"] = vec3_json(job.initial.p);
    o["initial"] = ini;
    o["duration_s"] = job.duration_s;
    ojson ig;
    ig["rel_tol"] = job.integ.rel_tol;
    ig["abs_tol"] = job.integ.abs_tol;
    ig["max_step_s"] = job.integ.max_step_s;
    ig["initial_step_s"] = job.integ.initial_step_s;
    ig["sample_interval_s"] = job.integ.sample_interval_s;
    ig["renormalize_n"] = job.integ.renormalize_n;
    ig["max_steps"] = static_cast<double>(job.integ.max_steps);
    o["integrator"] = ig;
    ojson fl;
    fl["enabled"] = job.flux_enabled;
    fl["mode"] = to_string(job.flux_mode);
    o["flux"] = fl;
    o["squid"] = squid_json(job.squid);
    o["environment"] = environment_json(job.consts);
    return o;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepJob {
    FGParams fg;
    PhysicalConstants consts;
    std::vector<double> omega_L_rad_s;
    SweepConfig scfg;
    double tilt_deg = 5.0;  // canonical degrees value, echoed verbatim
};

inline SweepJob parse_sweep(const json& root) {
    using namespace cfg_detail;
    check_keys(root, "(top level)", {"fg", "environment", "omega_L", "sweep"});
    SweepJob job;
    job.consts = parse_environment(root);
    job.fg = parse_fg(root, FGParams{});
    const DerivedFG d = derive(job.fg, job.consts);

    double lo = 1e-3, hi = 1e3, ppd = 7.0;
    bool explicit_values = false;
    if (root.contains("omega_L")) {
        const json& o = root.at("omega_L");
        check_keys(o, "omega_L",
                   {"min_over_omega_I", "max_over_omega_I", "points_per_decade",
                    "values_rad_per_s"});
        if (o.contains("values_rad_per_s")) {
            if (o.size() != 1)
                throw ParameterError(
                    "config: omega_L.values_rad_per_s excludes the grid keys");
            job.omega_L_rad_s = get_values(o.at("values_rad_per_s"), "omega_L.values_rad_per_s");
            explicit_values = true;
        } else {
            lo = get_num(o, "min_over_omega_I", lo, "omega_L");
            hi = get_num(o, "max_over_omega_I", hi, "omega_L");
            ppd = get_num(o, "points_per_decade", ppd, "omega_L");
        }
    }
    if (!explicit_values) {
        const std::vector<double> rel = log_grid(lo, hi, ppd, "omega_L");
        job.omega_L_rad_s.reserve(rel.size());
        for (const double x : rel) job.omega_L_rad_s.push_back(x * d.omega_I_rad_s);
    }
    for (const double w : job.omega_L_rad_s)
        if (!(w > 0.0)) throw ParameterError("config: omega_L values must be > 0");

    if (root.contains("sweep")) {
        const json& o = root.at("sweep");
        check_keys(o, "sweep",
                   {"tilt_deg", "periods_slow", "periods_split", "nyquist_margin", "rel_tol",
                    "abs_tol"});
        job.tilt_deg = get_num(o, "tilt_deg", job.tilt_deg, "sweep");
        job.scfg.tilt_rad = job.tilt_deg * std::numbers::pi / 180.0;
        job.scfg.periods_slow = get_num(o, "periods_slow", job.scfg.periods_slow, "sweep");
        job.scfg.periods_split = get_num(o, "periods_split", job.scfg.periods_split, "sweep");
        job.scfg.nyquist_margin = get_num(o, "nyquist_margin", job.scfg.nyquist_margin, "sweep");
        job.scfg.rel_tol = get_num(o, "rel_tol", job.scfg.rel_tol, "sweep");
        job.scfg.abs_tol = get_num(o, "abs_tol", job.scfg.abs_tol, "sweep");
        if (!(job.scfg.tilt_rad > 0.0 && job.scfg.tilt_rad < 0.5 * std::numbers::pi))
            throw ParameterError("config: sweep.tilt_deg must be in (0, 90)");
        if (!(job.scfg.periods_slow >= 1.0) || !(job.scfg.periods_split >= 1.0))
            throw ParameterError("config: sweep period counts must be >= 1");
        if (!(job.scfg.nyquist_margin > 2.0))
            throw ParameterError("config: sweep.nyquist_margin must be > 2");
    }
    return job;
}

inline ojson echo_sweep(const SweepJob& job) {
    using namespace cfg_detail;
    ojson o;
    o["fg"] = fg_json(job.fg);
    ojson wl;
    ojson vals = ojson::array();
    for (const double w : job.omega_L_rad_s) vals.push_back(w);
    wl["values_rad_per_s"] = vals;
    o["omega_L"] = wl;
    ojson sw;
    sw["tilt_deg"] = job.tilt_deg;
    sw["periods_slow"] = job.scfg.periods_slow;
    sw["periods_split"] = job.scfg.periods_split;
    sw["nyquist_margin"] = job.scfg.nyquist_margin;
    sw["rel_tol"] = job.scfg.rel_tol;
    sw["abs_tol"] = job.scfg.abs_tol;
    o["sweep"] = sw;
    o["environment"] = environment_json(job.consts);
    return o;
}

// ---------------------------------------------------------------------------
// levitate

struct LevitateJob {
    FGParams fg;
    PhysicalConstants consts;
    std::vector<double> radii_m;
};

inline LevitateJob parse_levitate(const json& root) {
    using namespace cfg_detail;
    check_keys(root, "(top level)", {"fg", "environment", "radii"});
    LevitateJob job;
    job.consts = parse_environment(root);
    job.fg = parse_fg(root, FGParams{});

    double lo = 1e-8, hi = 1e-4, ppd = 6.0;
    bool explicit_values = false;
    if (root.contains("radii")) {
        const json& o = root.at("radii");
        check_keys(o, "radii", {"min_m", "max_m", "points_per_decade", "values_m"});
        if (o.contains("values_m")) {
            if (o.size() != 1)
                throw ParameterError("config: radii.values_m excludes the grid keys");
            job.radii_m = get_values(o.at("values_m"), "radii.values_m");
            explicit_values = true;
        } else {
            lo = get_num(o, "min_m", lo, "radii");
            hi = get_num(o, "max_m", hi, "radii");
            ppd = get_num(o, "points_per_decade", ppd, "radii");
        }
    }
    if (!explicit_values) job.radii_m = log_grid(lo, hi, ppd, "radii");
    for (const double r : job.radii_m)
        if (!(r > 0.0)) throw ParameterError("config: radii values must be > 0");
    return job;
}

inline ojson echo_levitate(const LevitateJob& job) {
    using namespace cfg_detail;
    ojson o;
    o["fg"] = fg_json(job.fg);
    ojson ra;
    ojson vals = ojson::array();
    for (const double r : job.radii_m) vals.push_back(r);
    ra["values_m"] = vals;
    o["radii"] = ra;
    o["environment"] = environment_json(job.consts);
    return o;
}

// ---------------------------------------------------------------------------
// sensitivity

struct SensitivityJob {
    FGParams fg;
    PhysicalConstants consts;
    GasParams gas;
    SQUIDParams squid;
    double time_s = 1e6;
    cfg_detail::SuppressionChoice suppression;
};

// The sensitivity and exclusion subcommands default to the reference sphere
// scaled down to 1 um, the canonical readout scenario.
inline FGParams default_small_sphere() { return scale_params(FGParams{}, 1e-6); }

inline SensitivityJob parse_sensitivity(const json& root) {
    using namespace cfg_detail;
    check_keys(root, "(top level)",
               {"fg", "environment", "gas", "squid", "time_s", "suppression"});
    SensitivityJob job;
    job.consts = parse_environment(root);
    job.fg = parse_fg(root, default_small_sphere());
    job.gas = parse_gas(root);
    job.squid = parse_squid(root);
    job.time_s = get_num(root, "time_s", job.time_s, "(top level)");
    if (!(job.time_s > 0.0)) throw ParameterError("config: time_s must be > 0");
    job.suppression = parse_suppression(root, job.fg, job.consts);
    return job;
}

inline ojson echo_sensitivity(const SensitivityJob& job) {
    using namespace cfg_detail;
    ojson o;
    o["fg"] = fg_json(job.fg);
    o["gas"] = gas_json(job.gas);
    o["squid"] = squid_json(job.squid);
    o["time_s"] = job.time_s;
    o["suppression"] = suppression_json(job.suppression);
    o["environment"] = environment_json(job.consts);
    return o;
}

// ---------------------------------------------------------------------------
// exclusion

struct ExclusionJob {
    FGParams fg;
    PhysicalConstants consts;
    SpinSource source;
    std::vector<double> masses_eV;
    GasParams gas;
    SQUIDParams squid;
    double time_s = 1e6;
    cfg_detail::SuppressionChoice suppression;
    std::optional<double> floor_override_rad_s;
    PairQuadrature quadrature = PairQuadrature::Volume;
    int order = 8;
};

inline ExclusionJob parse_exclusion(const json& root) {
    using namespace cfg_detail;
    check_keys(root, "(top level)",
               {"fg", "environment", "source", "masses_eV", "gas", "squid", "time_s",
                "suppression", "noise_floor_rad_per_s", "quadrature", "quadrature_order"});
    ExclusionJob job;
    job.consts = parse_environment(root);
    job.fg = parse_fg(root, default_small_sphere());
    job.gas = parse_gas(root);
    job.squid = parse_squid(root);
    job.time_s = get_num(root, "time_s", job.time_s, "(top level)");
    if (!(job.time_s > 0.0)) throw ParameterError("config: time_s must be > 0");
    job.suppression = parse_suppression(root, job.fg, job.consts);

    if (root.contains("source")) {
        const json& o = root.at("source");
        check_keys(o, "source",
                   {"radius_m", "spin_count", "polarization", "standoff_m",
                    "standoff_is_center_distance"});
        job.source.radius_m = get_num(o, "radius_m", job.source.radius_m, "source");
        job.source.spin_count = get_num(o, "spin_count", job.source.spin_count, "source");
        job.source.polarization =
            get_vec3(o, "polarization", job.source.polarization, "source");
        job.source.standoff_m = get_num(o, "standoff_m", job.source.standoff_m, "source");
        job.source.standoff_is_center_distance = get_bool(
            o, "standoff_is_center_distance", job.source.standoff_is_center_distance, "source");
        job.source.validate();
    }

    double lo = 1e-7, hi = 1e-2, ppd = 12.0;
    bool explicit_values = false;
    if (root.contains("masses_eV")) {
        const json& o = root.at("masses_eV");
        check_keys(o, "masses_eV", {"min_eV", "max_eV", "points_per_decade", "values_eV"});
        if (o.contains("values_eV")) {
            if (o.size() != 1)
                throw ParameterError("config: masses_eV.values_eV excludes the grid keys");
            job.masses_eV = get_values(o.at("values_eV"), "masses_eV.values_eV");
            explicit_values = true;
        } else {
            lo = get_num(o, "min_eV", lo, "masses_eV");
            hi = get_num(o, "max_eV", hi, "masses_eV");
            ppd = get_num(o, "points_per_decade", ppd, "masses_eV");
        }
    }
    if (!explicit_values) job.masses_eV = log_grid(lo, hi, ppd, "masses_eV");
    for (const double m : job.masses_eV)
        if (!(m >= 0.0)) throw ParameterError("config: masses_eV values must be >= 0");

    if (root.contains("noise_floor_rad_per_s")) {
        const double f = get_num(root, "noise_floor_rad_per_s", 0.0, "(top level)");
        if (!(f > 0.0)) throw ParameterError("config: noise_floor_rad_per_s must be > 0");
        job.floor_override_rad_s = f;
    }

    const std::string q = get_str(root, "quadrature", "volume", "(top level)");
    if (q == "point")
        job.quadrature = PairQuadrature::Point;
    else if (q == "volume")
        job.quadrature = PairQuadrature::Volume;
    else
        throw ParameterError("config: quadrature must be point or volume");
    const double ord = get_num(root, "quadrature_order", 8.0, "(top level)");
    if (!(ord >= 2.0 && ord <= 64.0))
        throw ParameterError("config: quadrature_order must be in [2, 64]");
    job.order = static_cast<int>(ord);
    return job;
}

inline ojson echo_exclusion(const ExclusionJob& job) {
    using namespace cfg_detail;
    ojson o;
    o["fg"] = fg_json(job.fg);
    ojson src;
    src["radius_m"] = job.source.radius_m;
    src["spin_count"] = job.source.spin_count;
    src["polarization"] = vec3_json(job.source.polarization);
    src["standoff_m"] = job.source.standoff_m;
    src["standoff_is_center_distance"] = job.source.standoff_is_center_distance;
    o["source"] = src;
    ojson ms;
    ojson vals = ojson::array();
    for (const double m : job.masses_eV) vals.push_back(m);
    ms["values_eV"] = vals;
    o["masses_eV"] = ms;
    o["gas"] = gas_json(job.gas);
    o["squid"] = squid_json(job.squid);
    o["time_s"] = job.time_s;
    o["suppression"] = suppression_json(job.suppression);
    if (job.floor_override_rad_s) o["noise_floor_rad_per_s"] = *job.floor_override_rad_s;
    o["quadrature"] = to_string(job.quadrature);
    o["quadrature_order"] = job.order;
    o["environment"] = environment_json(job.consts);
    return o;
}

}  // namespace fgsim
