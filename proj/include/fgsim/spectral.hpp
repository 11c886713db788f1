#pragma once

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <vector>

#include "fgsim/errors.hpp"
#include "fgsim/integrator.hpp"
#include "fgsim/levitation.hpp"
#include "fgsim/parallel.hpp"
#include "fgsim/quadrature.hpp"
#include "fgsim/sensitivity.hpp"

namespace fgsim {

// Uniformly sampled readout signal.
struct FluxSignal {
    std::vector<double> t;
    std::vector<double> value;  // T m^2 (or unitless when coupling is dropped)
    double dt = 0.0;
};

// FastNx: flux = (coupling at the initial geometry) * n_x(t); the frequency
// content equals that of n_x by construction.
// ClosedForm: exact coaxial formula per sample; requires the sphere to stay
// on the loop axis (free or frozen center of mass).
// Quadrature: numeric integration of the dipole field over the loop disk;
// valid for any sphere position.
enum class FluxMode { FastNx, ClosedForm, Quadrature };

inline const char* to_string(FluxMode m) {
    switch (m) {
        case FluxMode::FastNx: return "fast_nx";
        case FluxMode::ClosedForm: return "closed_form";
        case FluxMode::Quadrature: return "quadrature";
    }
    return "?";
}

namespace detail {

// Flux of a dipole (moment m_vec at dipole_pos) through a disk of radius a
// centered at loop_center with unit normal axis_x (the +x readout axis):
// Gauss-Legendre radially, trapezoid in angle (exact for periodic smooth
// integrands).
inline double disk_flux_quadrature(const Vec3& m_vec, const Vec3& dipole_pos,
                                   const Vec3& loop_center, double a, double mu_0,
                                   int n_radial = 24, int n_angle = 48) {
    const GaussLegendre gr = gauss_legendre_on(n_radial, 0.0, a);
    const Vec3 ey{0.0, 1.0, 0.0}, ez{0.0, 0.0, 1.0};
    double flux = 0.0;
    for (int i = 0; i < n_radial; ++i) {
        const double rho = gr.x[i];
        double ring = 0.0;
        for (int k = 0; k < n_angle; ++k) {
            const double ph = 2.0 * std::numbers::pi * k / n_angle;
            const Vec3 pt = loop_center + rho * std::cos(ph) * ey + rho * std::sin(ph) * ez;
            const Vec3 B = dipole_field(m_vec, pt - dipole_pos, mu_0);
            ring += B.x;
        }
        flux += gr.w[i] * rho * ring * (2.0 * std::numbers::pi / n_angle);
    }
    return flux;
}

}  // namespace detail

// Readout flux for every sample of a trajectory. The loop center sits at
// initial position + (standoff, 0, 0), normal along x. Threads only speed up
// the quadrature mode; samples are stored by index either way.
inline FluxSignal flux_signal(const Trajectory& traj, const SQUIDParams& sq,
                              FluxMode mode = FluxMode::ClosedForm,
                              const PhysicalConstants& c = {}, unsigned threads = 1) {
    sq.validate();
    if (traj.size() < 2) throw ParameterError("flux_signal: trajectory too short");
    if (!(sq.standoff_m >= traj.system.params.radius_m))
        throw GeometryError("flux_signal: pickup loop center inside the sphere");
    const double mu = traj.system.derived.moment_J_per_T;
    const Vec3 r0 = traj.y.front().r;
    const Vec3 loop_center = r0 + Vec3{sq.standoff_m, 0.0, 0.0};

    FluxSignal sig;
    sig.t = traj.t;
    sig.dt = traj.sample_interval_s;
    sig.value.resize(traj.size());

    switch (mode) {
        case FluxMode::FastNx: {
            const double coupling =
                coaxial_flux_coupling_Tm2(mu, sq.loop_radius_m, sq.standoff_m, c.mu_0);
            for (std::size_t i = 0; i < traj.size(); ++i)
                sig.value[i] = coupling * traj.y[i].n.x;
            break;
        }
        case FluxMode::ClosedForm: {
            const double a2 = sq.loop_radius_m * sq.loop_radius_m;
            for (std::size_t i = 0; i < traj.size(); ++i) {
                const Vec3 off = loop_center - traj.y[i].r;
                if (std::abs(off.y) > 1e-12 * sq.standoff_m ||
                    std::abs(off.z) > 1e-12 * sq.standoff_m)
                    throw GeometryError(
                        "flux_signal: sphere left the loop axis; use the quadrature mode");
                const double s2 = a2 + off.x * off.x;
                sig.value[i] = c.mu_0 * mu * traj.y[i].n.x * a2 / (2.0 * s2 * std::sqrt(s2));
            }
            break;
        }
        case FluxMode::Quadrature: {
            parallel_for(traj.size(), threads, [&](std::size_t i) {
                const Vec3 m_vec = mu * traj.y[i].n;
                sig.value[i] = detail::disk_flux_quadrature(m_vec, traj.y[i].r, loop_center,
                                                            sq.loop_radius_m, c.mu_0);
            });
            break;
        }
    }
    return sig;
}

struct SpectralPeak {
    double omega_rad_s = 0.0;
    double amplitude = 0.0;
};

struct SpectrumPeaks {
    std::vector<SpectralPeak> peaks;  // strongest first
    double resolution_rad_s = 0.0;    // Hann main-lobe full width 8 pi / T
    double noise_floor = 0.0;         // median + 6 MAD of the magnitude spectrum
};

namespace detail {

// FFTW planning is not thread safe; execution of distinct plans is.
inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

inline std::vector<std::complex<double>> rfft(std::vector<double> x) {
    const std::size_t n = x.size();
    if (n < 2 || n > static_cast<std::size_t>(std::numeric_limits<int>::max()))
        throw ParameterError("rfft: bad transform size");
    std::vector<std::complex<double>> out(n / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lk(fftw_plan_mutex());
        // FFTW_ESTIMATE: deterministic plans that do not touch the arrays.
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), x.data(),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    }
    if (plan == nullptr) throw std::runtime_error("rfft: fftw plan creation failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lk(fftw_plan_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace detail

// Peak extraction: remove the mean, apply a Hann window, zero pad (factor
// >= 4 by default), take the magnitude spectrum, and pick local maxima above
// a robust floor (median + 6 MAD), strongest first. Each accepted peak masks
// +-10 unpadded bins around itself so window sidelobes are not re-reported.
// Peak position and amplitude are refined by a parabola through the log
// magnitudes of the three bins around the maximum; amplitudes are calibrated
// so a pure sinusoid of amplitude A reports A.
inline SpectrumPeaks spectrum_peaks(const FluxSignal& sig, int zero_pad_factor = 4,
                                    std::size_t max_peaks = 8) {
    const std::size_t n = sig.value.size();
    if (n < 16) throw ParameterError("spectrum_peaks: need at least 16 samples");
    if (!(sig.dt > 0.0)) throw ParameterError("spectrum_peaks: dt must be > 0");
    if (zero_pad_factor < 1) throw ParameterError("spectrum_peaks: zero_pad_factor must be >= 1");
    if (max_peaks == 0) throw ParameterError("spectrum_peaks: max_peaks must be >= 1");

    SpectrumPeaks out;
    out.resolution_rad_s = 8.0 * std::numbers::pi / (static_cast<double>(n) * sig.dt);

    double mean = 0.0;
    for (const double v : sig.value) mean += v;
    mean /= static_cast<double>(n);

    // A signal flat to rounding precision has no lines; without this guard
    // the mean-removal dust would be windowed into a formal peak.
    double maxdev = 0.0;
    double vmax = 0.0;
    for (const double v : sig.value) {
        maxdev = std::max(maxdev, std::abs(v - mean));
        vmax = std::max(vmax, std::abs(v));
    }
    if (maxdev <= 16.0 * std::numeric_limits<double>::epsilon() * vmax) return out;

    std::vector<double> x(detail::next_pow2(n * static_cast<std::size_t>(zero_pad_factor)), 0.0);
    double wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w =
            0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(n - 1)));
        x[i] = (sig.value[i] - mean) * w;
        wsum += w;
    }
    const std::size_t m = x.size();

    const auto spec = detail::rfft(std::move(x));
    const std::size_t nb = spec.size();  // m/2 + 1
    std::vector<double> mag(nb);
    const double cal = 2.0 / wsum;
    for (std::size_t k = 0; k < nb; ++k) mag[k] = cal * std::abs(spec[k]);

    // Robust floor over the interior bins.
    {
        std::vector<double> tmp(mag.begin() + 1, mag.end() - 1);
        const std::size_t mid = tmp.size() / 2;
        std::nth_element(tmp.begin(), tmp.begin() + mid, tmp.end());
        const double med = tmp[mid];
        for (double& v : tmp) v = std::abs(v - med);
        std::nth_element(tmp.begin(), tmp.begin() + mid, tmp.end());
        out.noise_floor = med + 6.0 * tmp[mid];
    }

    // Mask within half a main lobe of DC; everything there is mean leakage.
    const std::size_t pad_ratio = m / n;
    const std::size_t kmin = std::max<std::size_t>(1, 2 * pad_ratio);
    const std::size_t guard = 10 * pad_ratio;  // sidelobe exclusion half width

    std::vector<char> masked(nb, 0);
    const double domega = 2.0 * std::numbers::pi / (static_cast<double>(m) * sig.dt);

    while (out.peaks.size() < max_peaks) {
        std::size_t best = 0;
        double best_mag = out.noise_floor;
        for (std::size_t k = std::max<std::size_t>(kmin, 1); k + 1 < nb; ++k) {
            if (masked[k]) continue;
            if (mag[k] > best_mag && mag[k] >= mag[k - 1] && mag[k] >= mag[k + 1]) {
                best = k;
                best_mag = mag[k];
            }
        }
        if (best == 0) break;

        double delta = 0.0;
        double amp = mag[best];
        if (best >= 1 && best + 1 < nb && mag[best - 1] > 0.0 && mag[best + 1] > 0.0) {
            const double lL = std::log(mag[best - 1]);
            const double lC = std::log(mag[best]);
            const double lR = std::log(mag[best + 1]);
            const double den = lL - 2.0 * lC + lR;
            if (den < 0.0) {
                delta = 0.5 * (lL - lR) / den;
                delta = std::clamp(delta, -0.5, 0.5);
                amp = std::exp(lC - 0.25 * (lL - lR) * delta);
            }
        }
        out.peaks.push_back({(static_cast<double>(best) + delta) * domega, amp});

        const std::size_t lo = (best > guard) ? best - guard : 0;
        const std::size_t hi = std::min(nb - 1, best + guard);
        for (std::size_t k = lo; k <= hi; ++k) masked[k] = 1;
    }

    std::sort(out.peaks.begin(), out.peaks.end(),
              [](const SpectralPeak& a, const SpectralPeak& b) {
                  return a.amplitude > b.amplitude;
              });
    return out;
}

// Least-squares slope of the unwrapped azimuth of n: the precession rate of
// a slowly rotating horizontal component, robust under fast small ripple
// that a spectral line would need impractically long runs to resolve.
// skip_fraction drops the leading transient.
inline double fit_precession_rate(const Trajectory& traj, double skip_fraction = 0.0) {
    if (traj.size() < 4) throw ParameterError("fit_precession_rate: trajectory too short");
    if (!(skip_fraction >= 0.0 && skip_fraction < 1.0))
        throw ParameterError("fit_precession_rate: skip_fraction must be in [0, 1)");
    const std::size_t start = static_cast<std::size_t>(skip_fraction * traj.size());
    const std::size_t count = traj.size() - start;
    if (count < 4) throw ParameterError("fit_precession_rate: too few samples after skip");

    double prev = std::atan2(traj.y[start].n.y, traj.y[start].n.x);
    double acc = 0.0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = start; i < traj.size(); ++i) {
        const double raw = std::atan2(traj.y[i].n.y, traj.y[i].n.x);
        double d = raw - prev;
        while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
        while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
        acc += d;
        prev = raw;
        const double tt = traj.t[i];
        sx += tt;
        sy += acc;
        sxx += tt * tt;
        sxy += tt * acc;
    }
    const double nn = static_cast<double>(count);
    const double den = nn * sxx - sx * sx;
    if (den == 0.0) throw ParameterError("fit_precession_rate: degenerate time grid");
    return (nn * sxy - sx * sy) / den;
}

enum class Regime { Precessing, Intermediate, Librating };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::Precessing: return "precessing";
        case Regime::Intermediate: return "intermediate";
        case Regime::Librating: return "librating";
    }
    return "?";
}

// Field-strength regimes relative to the threshold B*: more than a decade
// below is clean precession, more than a decade above is libration.
inline Regime classify_regime(double B_T, const DerivedFG& d) {
    const double B = std::abs(B_T);
    if (B < d.B_star_T / 10.0) return Regime::Precessing;
    if (B > 10.0 * d.B_star_T) return Regime::Librating;
    return Regime::Intermediate;
}

struct SweepRow {
    double omega_L_rad_s = 0.0;
    std::optional<SpectralPeak> fg_low;   // lower-frequency orientation line
    std::optional<SpectralPeak> fg_high;  // upper line
    std::optional<SpectralPeak> brick;    // no-spin comparison line
};

struct SweepConfig {
    double tilt_rad = 5.0 * std::numbers::pi / 180.0;  // initial cone half-angle off the field axis
    double periods_slow = 10.0;   // cover this many periods of the slowest expected line
    double periods_split = 20.0;  // and enough of omega_I to resolve the above-threshold doublet
    double nyquist_margin = 6.0;  // samples per period of the fastest expected line
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
};

// One sweep row: spin the sphere up (free) and its no-spin twin (brick) in
// the same axial field, read n_x, and extract the strongest lines. The
// initial tilt is small so the extracted lines sit at the small-oscillation
// frequencies; a 90-degree start would pull the libration fundamental down
// by the large-amplitude pendulum factor. Above threshold the two free
// lines are split by exactly omega_I, which sets the duration floor.
inline SweepRow sweep_row(const FGParams& fg, double omega_L, const SweepConfig& cfg = {},
                          const PhysicalConstants& c = {}) {
    if (!(omega_L > 0.0)) throw ParameterError("sweep_row: omega_L must be > 0");
    const DerivedFG d = derive(fg, c);
    const double wI = d.omega_I_rad_s;
    const double w_high = 0.5 * (wI + std::sqrt(wI * wI + 4.0 * wI * omega_L));
    const double w_slow = std::min(omega_L, wI);
    const double duration =
        2.0 * std::numbers::pi * std::max(cfg.periods_slow / w_slow, cfg.periods_split / wI);
    const double dt = 2.0 * std::numbers::pi / (cfg.nyquist_margin * w_high);

    ModelConfig model;
    model.B_ext_T = {0.0, 0.0, omega_L / c.gamma()};

    IntegratorConfig icfg;
    icfg.rel_tol = cfg.rel_tol;
    icfg.abs_tol = cfg.abs_tol;
    icfg.sample_interval_s = dt;

    FGState s0;
    s0.n = {std::sin(cfg.tilt_rad), 0.0, std::cos(cfg.tilt_rad)};

    SweepRow row;
    row.omega_L_rad_s = omega_L;

    {
        model.kind = ModelKind::FreeFG;
        FGState s = s0;
        s.j = s.n;  // no libration at start
        const Trajectory traj = integrate(s, make_system(fg, model, c), icfg, duration);
        FluxSignal sig;
        sig.t = traj.t;
        sig.dt = traj.sample_interval_s;
        sig.value.resize(traj.size());
        for (std::size_t i = 0; i < traj.size(); ++i) sig.value[i] = traj.y[i].n.x;
        const SpectrumPeaks pk = spectrum_peaks(sig, 4, 2);
        if (pk.peaks.size() >= 2) {
            const bool first_lower = pk.peaks[0].omega_rad_s < pk.peaks[1].omega_rad_s;
            row.fg_low = first_lower ? pk.peaks[0] : pk.peaks[1];
            row.fg_high = first_lower ? pk.peaks[1] : pk.peaks[0];
        } else if (pk.peaks.size() == 1) {
            row.fg_low = pk.peaks[0];
        }
    }
    {
        model.kind = ModelKind::MagneticBrick;
        FGState s = s0;
        s.j = {0.0, 0.0, 0.0};
        const Trajectory traj = integrate(s, make_system(fg, model, c), icfg, duration);
        FluxSignal sig;
        sig.t = traj.t;
        sig.dt = traj.sample_interval_s;
        sig.value.resize(traj.size());
        for (std::size_t i = 0; i < traj.size(); ++i) sig.value[i] = traj.y[i].n.x;
        const SpectrumPeaks pk = spectrum_peaks(sig, 4, 1);
        if (!pk.peaks.empty()) row.brick = pk.peaks[0];
    }
    return row;
}

// Field sweep over a set of Larmor rates; rows are independent and may run
// on a worker pool, with results stored by index so the output is identical
// for any thread count.
inline std::vector<SweepRow> sweep_frequencies(const FGParams& fg,
                                               const std::vector<double>& omega_L_rad_s,
                                               const SweepConfig& cfg = {},
                                               const PhysicalConstants& c = {},
                                               unsigned threads = 1) {
    std::vector<SweepRow> rows(omega_L_rad_s.size());
    parallel_for(omega_L_rad_s.size(), threads,
                 [&](std::size_t i) { rows[i] = sweep_row(fg, omega_L_rad_s[i], cfg, c); });
    return rows;
}

}  // namespace fgsim
