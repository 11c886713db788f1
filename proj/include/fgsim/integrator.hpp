#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "fgsim/dynamics.hpp"
#include "fgsim/errors.hpp"

namespace fgsim {

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step_s = 0.0;         // 0: uncapped
    double initial_step_s = 0.0;     // 0: automatic
    double sample_interval_s = 0.0;  // required > 0
    bool renormalize_n = true;       // project |n| to 1 after accepted steps and at samples
    std::uint64_t max_steps = 400000000;

    void validate() const {
        if (!(sample_interval_s > 0.0))
            throw ParameterError("integrator.sample_interval_s must be > 0");
        if (!(rel_tol >= 1e-14 && rel_tol < 1.0))
            throw ParameterError("integrator.rel_tol must be in [1e-14, 1)");
        if (!(abs_tol >= 0.0)) throw ParameterError("integrator.abs_tol must be >= 0");
        if (max_step_s < 0.0) throw ParameterError("integrator.max_step_s must be >= 0");
        if (initial_step_s < 0.0) throw ParameterError("integrator.initial_step_s must be >= 0");
        if (max_steps == 0) throw ParameterError("integrator.max_steps must be > 0");
    }
};

struct IntegratorStats {
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
    std::uint64_t rhs_evals = 0;
};

// Uniformly sampled run plus the full description needed to reproduce it.
struct Trajectory {
    std::vector<double> t;
    std::vector<FGState> y;
    double sample_interval_s = 0.0;
    double duration_s = 0.0;
    FGSystem system;
    IntegratorConfig integrator;
    IntegratorStats stats;

    std::size_t size() const { return t.size(); }
};

namespace detail {

using Y12 = std::array<double, 12>;

inline Y12 pack(const FGState& s) {
    return {s.n.x, s.n.y, s.n.z, s.j.x, s.j.y, s.j.z,
            s.r.x, s.r.y, s.r.z, s.p.x, s.p.y, s.p.z};
}

inline FGState unpack(const Y12& v) {
    FGState s;
    s.n = {v[0], v[1], v[2]};
    s.j = {v[3], v[4], v[5]};
    s.r = {v[6], v[7], v[8]};
    s.p = {v[9], v[10], v[11]};
    return s;
}

inline void renorm_n(Y12& v) {
    const double m = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (m > 0.0) {
        v[0] /= m;
        v[1] /= m;
        v[2] /= m;
    }
}

// Classic fifth-order pair with an embedded fourth-order error estimate and
// a quartic interpolant for dense output.
namespace dp5 {
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace dp5

}  // namespace detail

// Integrate the model from `initial` over `duration_s`, sampling the dense
// interpolant on the uniform grid k * sample_interval_s (k = 0 included).
// Error control is per component against abs_tol * scale + rel_tol * |y|,
// where the scale reflects each block's natural magnitude (n and j are
// order 1, r is measured against the sphere radius and starting position,
// p against a characteristic momentum).
inline Trajectory integrate(const FGState& initial, const FGSystem& sys,
                            const IntegratorConfig& cfg, double duration_s) {
    using detail::Y12;
    namespace w = detail::dp5;

    cfg.validate();
    if (!(duration_s > 0.0)) throw ParameterError("integrate: duration_s must be > 0");
    validate_initial_state(initial, sys);

    Trajectory traj;
    traj.sample_interval_s = cfg.sample_interval_s;
    traj.duration_s = duration_s;
    traj.system = sys;
    traj.integrator = cfg;

    Y12 y = detail::pack(initial);
    if (cfg.renormalize_n) detail::renorm_n(y);

    // Per-component absolute scales.
    Y12 scale;
    const double r_scale = std::max({std::abs(initial.r.x), std::abs(initial.r.y),
                                     std::abs(initial.r.z), sys.params.radius_m});
    const double v_char = std::max({std::sqrt(2.0 * std::abs(sys.consts.g_grav) * r_scale),
                                    sys.derived.omega_I_rad_s * sys.params.radius_m, 1e-9});
    const double p_scale = std::max(sys.params.mass_kg * v_char, norm(initial.p));
    for (int i = 0; i < 3; ++i) scale[i] = 1.0;
    for (int i = 3; i < 6; ++i) scale[i] = std::max(1.0, norm(initial.j));
    for (int i = 6; i < 9; ++i) scale[i] = r_scale;
    for (int i = 9; i < 12; ++i) scale[i] = p_scale;

    auto f = [&](const Y12& v) -> Y12 {
        traj.stats.rhs_evals++;
        return detail::pack(rhs(detail::unpack(v), sys));
    };

    auto err_norm = [&](const Y12& e, const Y12& y0, const Y12& y1) {
        double s = 0.0;
        for (int i = 0; i < 12; ++i) {
            const double wgt =
                cfg.abs_tol * scale[i] + cfg.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
            const double q = e[i] / wgt;
            s += q * q;
        }
        return std::sqrt(s / 12.0);
    };

    const double hmax =
        (cfg.max_step_s > 0.0) ? std::min(cfg.max_step_s, duration_s) : duration_s;

    double t = 0.0;
    Y12 k1 = f(y);

    // Starting step: aim the weighted velocity at ~1% of tolerance headroom.
    double h;
    if (cfg.initial_step_s > 0.0) {
        h = std::min(cfg.initial_step_s, hmax);
    } else {
        double d1n = 0.0;
        for (int i = 0; i < 12; ++i) {
            const double wgt = cfg.abs_tol * scale[i] + cfg.rel_tol * std::max(1e-30, std::abs(y[i]));
            const double q = k1[i] / wgt;
            d1n += q * q;
        }
        d1n = std::sqrt(d1n / 12.0);
        h = (d1n > 0.0) ? 0.01 / d1n : hmax;
        // Never hand the underflow guard (16 eps of the sample interval at
        // t = 0) a smaller first trial; the controller shrinks from above
        // when the problem genuinely demands it.
        const double h_lo =
            32.0 * std::numeric_limits<double>::epsilon() * cfg.sample_interval_s;
        h = std::min(std::max({h, 1e-15, h_lo}), hmax);
    }

    // Sample emission bookkeeping: sample index k means time k * interval.
    const double interval = cfg.sample_interval_s;
    std::size_t next_sample = 0;
    const std::size_t total_samples =
        static_cast<std::size_t>(std::floor(duration_s / interval * (1.0 + 1e-12))) + 1;
    traj.t.reserve(total_samples);
    traj.y.reserve(total_samples);

    auto emit = [&](double ts, const Y12& v) {
        Y12 u = v;
        if (cfg.renormalize_n) detail::renorm_n(u);
        traj.t.push_back(ts);
        traj.y.push_back(detail::unpack(u));
    };

    emit(0.0, y);
    next_sample = 1;

    Y12 k2, k3, k4, k5, k6, k7, y5, yerr, ytmp;
    std::uint64_t steps = 0;

    auto guarded_f = [&](const Y12& v) -> Y12 {
        try {
            return f(v);
        } catch (const GeometryError& ge) {
            throw GeometryError(std::string(ge.what()) + " (at t = " + std::to_string(t) + " s)");
        }
    };

    while (t < duration_s) {
        if (++steps > cfg.max_steps)
            throw StiffnessError("integrate: step budget exhausted at t = " + std::to_string(t) +
                                     " s",
                                 t);
        const double hfloor = 16.0 * std::numeric_limits<double>::epsilon() *
                              std::max(std::abs(t), interval);
        if (h < hfloor)
            throw StiffnessError("integrate: step size underflow at t = " + std::to_string(t) +
                                     " s",
                                 t);
        bool last = false;
        if (t + h >= duration_s) {
            h = duration_s - t;
            last = true;
        }

        for (int i = 0; i < 12; ++i) ytmp[i] = y[i] + h * w::a21 * k1[i];
        k2 = guarded_f(ytmp);
        for (int i = 0; i < 12; ++i) ytmp[i] = y[i] + h * (w::a31 * k1[i] + w::a32 * k2[i]);
        k3 = guarded_f(ytmp);
        for (int i = 0; i < 12; ++i)
            ytmp[i] = y[i] + h * (w::a41 * k1[i] + w::a42 * k2[i] + w::a43 * k3[i]);
        k4 = guarded_f(ytmp);
        for (int i = 0; i < 12; ++i)
            ytmp[i] =
                y[i] + h * (w::a51 * k1[i] + w::a52 * k2[i] + w::a53 * k3[i] + w::a54 * k4[i]);
        k5 = guarded_f(ytmp);
        for (int i = 0; i < 12; ++i)
            ytmp[i] = y[i] + h * (w::a61 * k1[i] + w::a62 * k2[i] + w::a63 * k3[i] +
                                  w::a64 * k4[i] + w::a65 * k5[i]);
        k6 = guarded_f(ytmp);
        for (int i = 0; i < 12; ++i)
            y5[i] = y[i] + h * (w::b1 * k1[i] + w::b3 * k3[i] + w::b4 * k4[i] + w::b5 * k5[i] +
                                w::b6 * k6[i]);
        k7 = guarded_f(y5);
        for (int i = 0; i < 12; ++i)
            yerr[i] = h * (w::e1 * k1[i] + w::e3 * k3[i] + w::e4 * k4[i] + w::e5 * k5[i] +
                           w::e6 * k6[i] + w::e7 * k7[i]);

        const double err = err_norm(yerr, y, y5);
        if (err <= 1.0) {
            traj.stats.accepted++;
            // Land exactly on the endpoint; t + h can round 1 ulp short.
            const double t_new = last ? duration_s : t + h;

            // Dense output over (t, t_new].
            const double t_edge = last ? duration_s : t_new;
            while (next_sample < total_samples) {
                const double ts = static_cast<double>(next_sample) * interval;
                if (ts > t_edge * (1.0 + 1e-14) + 1e-300) break;
                double th = (ts - t) / h;
                th = std::clamp(th, 0.0, 1.0);
                Y12 u;
                for (int i = 0; i < 12; ++i) {
                    const double ydiff = y5[i] - y[i];
                    const double bspl = h * k1[i] - ydiff;
                    const double rc4 = ydiff - h * k7[i] - bspl;
                    const double rc5 = h * (w::d1 * k1[i] + w::d3 * k3[i] + w::d4 * k4[i] +
                                            w::d5 * k5[i] + w::d6 * k6[i] + w::d7 * k7[i]);
                    u[i] = y[i] + th * (ydiff + (1.0 - th) * (bspl + th * (rc4 + (1.0 - th) * rc5)));
                }
                emit(ts, u);
                next_sample++;
            }

            y = y5;
            if (cfg.renormalize_n) detail::renorm_n(y);
            t = t_new;
            if (t >= duration_s) break;
            k1 = guarded_f(y);

            double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
            fac = std::clamp(fac, 0.2, 5.0);
            h = std::min(h * fac, hmax);
        } else {
            traj.stats.rejected++;
            double fac = 0.9 * std::pow(err, -0.2);
            fac = std::clamp(fac, 0.2, 1.0);
            h *= fac;
        }
    }

    return traj;
}

}  // namespace fgsim
