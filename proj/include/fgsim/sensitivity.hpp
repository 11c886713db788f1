#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "fgsim/errors.hpp"
#include "fgsim/model.hpp"

namespace fgsim {

// Residual gas around the sphere. Defaults: helium-4 at 4 K and a number
// density of 3e19 m^-3 (a few 1e-3 Pa), the canonical operating point.
struct GasParams {
    double species_mass_kg = 6.6464767e-27;
    double temperature_K = 4.0;
    double number_density_m3 = 3e19;

    void validate() const {
        if (!(species_mass_kg > 0.0)) throw ParameterError("gas.species_mass_kg must be > 0");
        if (!(temperature_K > 0.0)) throw ParameterError("gas.temperature_K must be > 0");
        if (!(number_density_m3 > 0.0)) throw ParameterError("gas.number_density_m3 must be > 0");
    }

    // Mean thermal speed sqrt(8 k_B T / (pi m)).
    double mean_speed_m_s(const PhysicalConstants& c = {}) const {
        return std::sqrt(8.0 * c.k_B * temperature_K / (std::numbers::pi * species_mass_kg));
    }
};

// Pickup loop for the flux readout. The loop sits on the +x axis through the
// sphere's rest position, center-to-center distance standoff_m, normal along
// x, so the fast flux component tracks n_x.
struct SQUIDParams {
    double loop_radius_m = 1e-6;
    double standoff_m = 1e-6;
    double flux_noise_Tm2_sqrtHz = 1e-21;

    void validate() const {
        if (!(loop_radius_m > 0.0)) throw ParameterError("squid.loop_radius_m must be > 0");
        if (!(standoff_m >= loop_radius_m))
            throw ParameterError("squid.standoff_m must be >= loop_radius_m");
        if (!(flux_noise_Tm2_sqrtHz > 0.0))
            throw ParameterError("squid.flux_noise_Tm2_sqrtHz must be > 0");
    }
};

// Flux through a circular loop coaxial with a dipole of moment mu at
// center-to-center distance d along the loop axis:
//   Phi = mu_0 mu a^2 / (2 (a^2 + d^2)^(3/2)).
// Only the axial moment component couples; this is the closed form behind
// the fast n_x readout mode.
inline double coaxial_flux_coupling_Tm2(double mu_J_per_T, double loop_radius_m,
                                        double standoff_m, double mu_0) {
    const double a2 = loop_radius_m * loop_radius_m;
    const double s2 = a2 + standoff_m * standoff_m;
    return mu_0 * mu_J_per_T * a2 / (2.0 * s2 * std::sqrt(s2));
}

// Frequency uncertainty after averaging time t from gas collisions, the
// random-walk floor of the precession readout:
//   dOmega = [m_gas R^2 / (6 N hbar)] sqrt(n v^3 / (pi t)) / suppression.
// The divisor is whatever the caller's suppression convention dictates
// (1 for a free sphere); see NoiseBudget for the documented default.
inline double collision_noise_rad_s(const FGParams& p, const GasParams& gas, double t_s,
                                    double suppression_divisor = 1.0,
                                    const PhysicalConstants& c = {}) {
    p.validate();
    gas.validate();
    if (!(t_s > 0.0)) throw ParameterError("collision_noise: t_s must be > 0");
    if (!(suppression_divisor >= 1.0))
        throw ParameterError("collision_noise: suppression_divisor must be >= 1");
    const double v = gas.mean_speed_m_s(c);
    const double pref =
        gas.species_mass_kg * p.radius_m * p.radius_m / (6.0 * p.spin_count * c.hbar);
    return pref * std::sqrt(gas.number_density_m3 * v * v * v / (std::numbers::pi * t_s)) /
           suppression_divisor;
}

// Frequency uncertainty from detector phase noise: reading the precession
// phase to dphi across an averaging time t gives dOmega = dphi * t^(-3/2).
inline double detection_noise_rad_s(double phase_noise_rad_sqrtHz, double t_s) {
    if (!(phase_noise_rad_sqrtHz > 0.0))
        throw ParameterError("detection_noise: phase_noise_rad_sqrtHz must be > 0");
    if (!(t_s > 0.0)) throw ParameterError("detection_noise: t_s must be > 0");
    return phase_noise_rad_sqrtHz / (t_s * std::sqrt(t_s));
}

// How the levitation feedback factor enters the collision floor.
// SqrtPower (default): feedback suppresses the angle-diffusion power by the
// full factor, so the frequency uncertainty carries its square root.
// Amplitude: divide by the full factor. Off: no suppression.
enum class SuppressionMode { Off, Amplitude, SqrtPower };

inline const char* to_string(SuppressionMode m) {
    switch (m) {
        case SuppressionMode::Off: return "off";
        case SuppressionMode::Amplitude: return "amplitude";
        case SuppressionMode::SqrtPower: return "sqrt_power";
    }
    return "?";
}

inline double suppression_divisor(double factor, SuppressionMode mode) {
    if (!(factor >= 1.0)) throw ParameterError("suppression factor must be >= 1");
    switch (mode) {
        case SuppressionMode::Off: return 1.0;
        case SuppressionMode::Amplitude: return factor;
        case SuppressionMode::SqrtPower: return std::sqrt(factor);
    }
    return 1.0;
}

struct NoiseBudget {
    double t_s = 0.0;
    double omega_col_raw_rad_s = 0.0;  // collision floor with no suppression, at t_s
    double omega_col_rad_s = 0.0;      // suppressed collision floor at t_s
    double suppression_factor = 1.0;
    double divisor = 1.0;
    SuppressionMode mode = SuppressionMode::SqrtPower;
    double flux_amplitude_Tm2 = 0.0;       // full-swing n_x flux through the loop
    double phase_noise_rad_sqrtHz = 0.0;   // SQUID flux noise / flux amplitude
    double omega_det_rad_s = 0.0;          // detection floor at t_s
    double crossover_s = 0.0;              // averaging time where detection meets collisions
    double floor_rad_s = 0.0;              // quadrature sum at t_s
};

// Full budget at averaging time t. The flux-to-angle conversion uses the
// simulated coupling for the given loop geometry; the suppression factor is
// the levitation module's 1 + gamma B_image / omega_I (pass 1 for a free
// sphere).
inline NoiseBudget noise_budget(const FGParams& p, const GasParams& gas, const SQUIDParams& sq,
                                double t_s, double suppression_factor = 1.0,
                                SuppressionMode mode = SuppressionMode::SqrtPower,
                                const PhysicalConstants& c = {}) {
    p.validate();
    gas.validate();
    sq.validate();
    if (!(t_s > 0.0)) throw ParameterError("noise_budget: t_s must be > 0");
    if (!(sq.standoff_m >= p.radius_m))
        throw GeometryError("noise_budget: pickup loop center inside the sphere");
    const DerivedFG d = derive(p, c);

    NoiseBudget b;
    b.t_s = t_s;
    b.suppression_factor = suppression_factor;
    b.mode = mode;
    b.divisor = suppression_divisor(suppression_factor, mode);
    b.omega_col_raw_rad_s = collision_noise_rad_s(p, gas, t_s, 1.0, c);
    b.omega_col_rad_s = b.omega_col_raw_rad_s / b.divisor;
    b.flux_amplitude_Tm2 =
        coaxial_flux_coupling_Tm2(d.moment_J_per_T, sq.loop_radius_m, sq.standoff_m, c.mu_0);
    b.phase_noise_rad_sqrtHz = sq.flux_noise_Tm2_sqrtHz / b.flux_amplitude_Tm2;
    b.omega_det_rad_s = detection_noise_rad_s(b.phase_noise_rad_sqrtHz, t_s);
    // dphi t^-3/2 = K t^-1/2 with K = suppressed collision coefficient.
    b.crossover_s = b.phase_noise_rad_sqrtHz / (b.omega_col_rad_s * std::sqrt(t_s));
    b.floor_rad_s = std::sqrt(b.omega_col_rad_s * b.omega_col_rad_s +
                              b.omega_det_rad_s * b.omega_det_rad_s);
    return b;
}

}  // namespace fgsim
