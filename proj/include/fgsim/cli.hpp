#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>

#include "fgsim/config.hpp"
#include "fgsim/io.hpp"

namespace fgsim {

// Thread count resolution: explicit flag wins, then the FGSIM_THREADS
// environment variable, then 1. A value of 0 means all hardware threads.
// Results never depend on the thread count; only wall time does.
inline unsigned resolve_threads(int requested) {
    long v = requested;
    if (requested < 0) {
        const char* env = std::getenv("FGSIM_THREADS");
        if (env == nullptr || *env == '\0') return 1;
        char* end = nullptr;
        v = std::strtol(env, &end, 10);
        if (end == nullptr || *end != '\0' || v < 0)
            throw ParameterError("FGSIM_THREADS must be a nonnegative integer");
    }
    if (v == 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? hw : 1;
    }
    return static_cast<unsigned>(v);
}

namespace cli_detail {

inline std::filesystem::path sidecar(const std::string& out_path, const char* suffix) {
    std::filesystem::path p(out_path);
    p += suffix;
    return p;
}

inline void write_echo(const std::string& out_path, const ojson& echo) {
    atomic_write_file(sidecar(out_path, ".config.json"), echo.dump(2) + "\n");
}

inline ojson budget_json(const NoiseBudget& b) {
    ojson o;
    o["t_s"] = b.t_s;
    o["omega_col_raw_rad_per_s"] = b.omega_col_raw_rad_s;
    o["omega_col_rad_per_s"] = b.omega_col_rad_s;
    o["suppression_factor"] = b.suppression_factor;
    o["suppression_divisor"] = b.divisor;
    o["suppression_mode"] = to_string(b.mode);
    o["flux_amplitude_T_m2"] = b.flux_amplitude_Tm2;
    o["phase_noise_rad_per_sqrt_hz"] = b.phase_noise_rad_sqrtHz;
    o["omega_det_rad_per_s"] = b.omega_det_rad_s;
    o["crossover_s"] = b.crossover_s;
    o["floor_rad_per_s"] = b.floor_rad_s;
    return o;
}

}  // namespace cli_detail

inline void run_simulate(const json& config, const std::string& out_path, unsigned threads,
                         bool verbose) {
    const SimulateJob job = parse_simulate(config);
    const FGSystem sys = make_system(job.fg, job.model, job.consts);
    const Trajectory traj = integrate(job.initial, sys, job.integ, job.duration_s);
    std::string csv;
    if (job.flux_enabled) {
        const FluxSignal sig = flux_signal(traj, job.squid, job.flux_mode, job.consts, threads);
        csv = trajectory_csv(traj, &sig.value);
    } else {
        csv = trajectory_csv(traj);
    }
    atomic_write_file(out_path, csv);
    cli_detail::write_echo(out_path, echo_simulate(job));
    if (verbose)
        std::cerr << "simulate: " << traj.size() << " samples, " << traj.stats.accepted
                  << " steps accepted, " << traj.stats.rejected << " rejected, "
                  << traj.stats.rhs_evals << " rhs evals\n";
}

inline void run_sweep(const json& config, const std::string& out_path, unsigned threads,
                      bool verbose) {
    const SweepJob job = parse_sweep(config);
    if (verbose)
        std::cerr << "sweep: " << job.omega_L_rad_s.size() << " rows on " << threads
                  << " thread(s)\n";
    const std::vector<SweepRow> rows =
        sweep_frequencies(job.fg, job.omega_L_rad_s, job.scfg, job.consts, threads);
    atomic_write_file(out_path, sweep_csv(rows));
    cli_detail::write_echo(out_path, echo_sweep(job));
}

inline void run_levitate(const json& config, const std::string& out_path, unsigned /*threads*/,
                         bool verbose) {
    const LevitateJob job = parse_levitate(config);
    const std::vector<SuppressionPoint> pts = suppression_curve(job.fg, job.radii_m, job.consts);
    atomic_write_file(out_path, suppression_csv(pts));
    cli_detail::write_echo(out_path, echo_levitate(job));
    if (verbose) std::cerr << "levitate: " << pts.size() << " radii\n";
}

// Prints the headline numbers as a single JSON object on stdout (the only
// subcommand that writes to stdout) and the full budget to the output file.
inline void run_sensitivity(const json& config, const std::string& out_path,
                            unsigned /*threads*/, bool verbose) {
    const SensitivityJob job = parse_sensitivity(config);
    const NoiseBudget at_1s = noise_budget(job.fg, job.gas, job.squid, 1.0,
                                           job.suppression.factor, job.suppression.mode,
                                           job.consts);
    const NoiseBudget at_t = noise_budget(job.fg, job.gas, job.squid, job.time_s,
                                          job.suppression.factor, job.suppression.mode,
                                          job.consts);
    ojson head;
    head["omega_col_1s"] = at_1s.omega_col_rad_s;
    head["omega_det_1s"] = at_1s.omega_det_rad_s;
    head["crossover_s"] = at_1s.crossover_s;
    head["floor_at_t"] = at_t.floor_rad_s;
    std::cout << head.dump() << "\n";

    ojson full;
    full["headline"] = head;
    full["at_1s"] = cli_detail::budget_json(at_1s);
    full["at_t"] = cli_detail::budget_json(at_t);
    atomic_write_file(out_path, full.dump(2) + "\n");
    cli_detail::write_echo(out_path, echo_sensitivity(job));
    if (verbose)
        std::cerr << "sensitivity: suppression factor " << job.suppression.factor << " ("
                  << to_string(job.suppression.mode) << ")\n";
}

inline void run_exclusion(const json& config, const std::string& out_path, unsigned threads,
                          bool verbose) {
    const ExclusionJob job = parse_exclusion(config);
    double floor = 0.0;
    if (job.floor_override_rad_s) {
        floor = *job.floor_override_rad_s;
    } else {
        floor = noise_budget(job.fg, job.gas, job.squid, job.time_s, job.suppression.factor,
                             job.suppression.mode, job.consts)
                    .floor_rad_s;
    }
    if (verbose)
        std::cerr << "exclusion: " << job.masses_eV.size() << " masses, floor " << floor
                  << " rad/s, " << to_string(job.quadrature) << " quadrature\n";
    // The coherent signal is suppressed by the full feedback factor, like
    // any applied field, regardless of the collision-noise convention.
    const ExclusionCurve curve =
        exclusion_curve(job.fg, job.source, job.masses_eV, floor, job.suppression.factor,
                        job.quadrature, job.order, job.consts, threads);
    atomic_write_file(out_path, exclusion_csv(curve));

    ojson meta;
    meta["noise_floor_rad_per_s"] = curve.noise_floor_rad_s;
    meta["floor_from_budget"] = !job.floor_override_rad_s.has_value();
    meta["time_s"] = job.time_s;
    meta["suppression_factor"] = curve.suppression_factor;
    meta["suppression_mode"] = to_string(job.suppression.mode);
    meta["quadrature"] = to_string(curve.quadrature);
    meta["quadrature_order"] = curve.order;
    meta["center_distance_m"] = curve.center_distance_m;
    meta["mass_count"] = curve.points.size();
    atomic_write_file(cli_detail::sidecar(out_path, ".meta.json"), meta.dump(2) + "\n");
    cli_detail::write_echo(out_path, echo_exclusion(job));
}

}  // namespace fgsim
