#pragma once

namespace fgsim {

// CODATA 2018. Kept as a mutable value type so tests and configs can
// override individual entries (gravity in particular) without global state.
struct PhysicalConstants {
    double hbar = 1.054571817e-34;      // J s
    double mu_B = 9.2740100783e-24;     // J/T
    double g_e = 2.00231930436256;      // electron g-factor magnitude
    double mu_0 = 1.25663706212e-6;     // N/A^2
    double k_B = 1.380649e-23;          // J/K
    double c = 2.99792458e8;            // m/s
    double m_e = 9.1093837015e-31;      // kg
    double e_charge = 1.602176634e-19;  // C; also J per eV
    double g_grav = 9.80665;            // m/s^2, standard gravity

    // Electron gyromagnetic ratio, rad/s per tesla.
    double gamma() const { return g_e * mu_B / hbar; }
};

}  // namespace fgsim
