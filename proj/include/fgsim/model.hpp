#pragma once

#include <cmath>
#include <numbers>

#include "fgsim/constants.hpp"
#include "fgsim/errors.hpp"

namespace fgsim {

// A rigid, uniformly magnetized, fully spin-polarized sphere. The default
// instance is the 30 um reference sphere used throughout the test suite; its
// mass is calibrated so the nutation rate omega_I lands at 1.193 rad/s, which
// implies a density of about 7.6 g/cm^3 (sintered NdFeB range).
struct FGParams {
    double radius_m = 30e-6;
    double spin_count = 7e15;  // polarized electron spins
    double mass_kg = 8.594e-10;
    double moment_per_spin_J_per_T = 9.2740100783e-24;  // one Bohr magneton

    void validate() const {
        if (!(radius_m > 0.0)) throw ParameterError("fg.radius_m must be > 0");
        if (!(spin_count >= 1.0)) throw ParameterError("fg.spin_count must be >= 1");
        if (!(mass_kg > 0.0)) throw ParameterError("fg.mass_kg must be > 0");
        if (!(moment_per_spin_J_per_T > 0.0))
            throw ParameterError("fg.moment_per_spin_J_per_T must be > 0");
    }

    double density_kg_m3() const {
        return mass_kg / (4.0 / 3.0 * std::numbers::pi * radius_m * radius_m * radius_m);
    }
};

// Quantities derived from FGParams. For a fully polarized sphere the
// threshold rate omega_star coincides with the nutation rate omega_I (both
// equal S/I); both names are kept because they play different roles in the
// analysis: omega_star is the boundary between precessing and librating
// response, omega_I sets the nutation line.
struct DerivedFG {
    double inertia_kg_m2 = 0.0;   // 2 m r^2 / 5
    double spin_J_s = 0.0;        // S = N hbar / 2
    double moment_J_per_T = 0.0;  // mu = N * moment_per_spin
    double omega_I_rad_s = 0.0;   // S / I
    double omega_star_rad_s = 0.0;
    double B_star_T = 0.0;        // omega_star / gamma
};

inline DerivedFG derive(const FGParams& p, const PhysicalConstants& c = {}) {
    p.validate();
    DerivedFG d;
    d.inertia_kg_m2 = 0.4 * p.mass_kg * p.radius_m * p.radius_m;
    d.spin_J_s = 0.5 * p.spin_count * c.hbar;
    d.moment_J_per_T = p.spin_count * p.moment_per_spin_J_per_T;
    d.omega_I_rad_s = d.spin_J_s / d.inertia_kg_m2;
    d.omega_star_rad_s = d.omega_I_rad_s;
    d.B_star_T = d.omega_star_rad_s / c.gamma();
    return d;
}

// Rescale the sphere radius at fixed mass density and spin density:
// mass and spin count go with the volume.
inline FGParams scale_params(const FGParams& p, double new_radius_m) {
    p.validate();
    if (!(new_radius_m > 0.0)) throw ParameterError("scale_params: new_radius_m must be > 0");
    const double k = new_radius_m / p.radius_m;
    FGParams q = p;
    q.radius_m = new_radius_m;
    q.spin_count = p.spin_count * k * k * k;
    q.mass_kg = p.mass_kg * k * k * k;
    return q;
}

}  // namespace fgsim
