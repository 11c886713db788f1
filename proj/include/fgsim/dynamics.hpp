#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "fgsim/errors.hpp"
#include "fgsim/model.hpp"
#include "fgsim/vec3.hpp"

namespace fgsim {

enum class ModelKind { FreeFG, MagneticBrick, LevitatedFG };

inline const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::FreeFG: return "free_fg";
        case ModelKind::MagneticBrick: return "magnetic_brick";
        case ModelKind::LevitatedFG: return "levitated_fg";
    }
    return "?";
}

// Static description of a scenario. B_ext is spatially uniform, so it exerts
// torque but no net force on the sphere.
struct ModelConfig {
    ModelKind kind = ModelKind::FreeFG;
    Vec3 B_ext_T{0.0, 0.0, 0.0};
    bool image_field = false;  // forced on for LevitatedFG by make_system
    bool gravity = false;
    bool frozen_com = false;   // pin r and p, keep orientation dynamics
};

// Dynamic state. n is the magnetization direction (unit length), j is the
// total angular momentum in units of the spin S, r and p the center of mass.
// The librational part is l = j - n for spin-carrying models.
struct FGState {
    Vec3 n{1.0, 0.0, 0.0};
    Vec3 j{1.0, 0.0, 0.0};
    Vec3 r{0.0, 0.0, 0.0};
    Vec3 p{0.0, 0.0, 0.0};
};

struct FGSystem {
    FGParams params;
    DerivedFG derived;
    PhysicalConstants consts;
    ModelConfig model;
};

inline FGSystem make_system(const FGParams& p, const ModelConfig& m,
                            const PhysicalConstants& c = {}) {
    FGSystem s{p, derive(p, c), c, m};
    if (s.model.kind == ModelKind::LevitatedFG) s.model.image_field = true;
    return s;
}

// Field of a point dipole with moment m_vec at displacement r_vec from it.
inline Vec3 dipole_field(const Vec3& m_vec, const Vec3& r_vec, double mu_0) {
    const double r2 = dot(r_vec, r_vec);
    const double r1 = std::sqrt(r2);
    const double r5 = r2 * r2 * r1;
    return (mu_0 / (4.0 * std::numbers::pi * r5)) * (3.0 * dot(r_vec, m_vec) * r_vec - r2 * m_vec);
}

// Field of the superconducting image at the sphere's position. For a moment
// mu*n at height z above the surface the image is mu*(nx, ny, -nz) at -z:
// the horizontal part is kept and the vertical part flipped, which makes the
// boundary flux-excluding and the interaction repulsive. Evaluated as a
// plain point dipole at separation 2z. For n = x this gives
// -mu_0 mu/(32 pi z^3) x; for n = z it gives -mu_0 mu/(16 pi z^3) z.
inline Vec3 image_field(const Vec3& n, const Vec3& r_pos, double mu_J_per_T, double mu_0) {
    if (!(r_pos.z > 0.0))
        throw GeometryError("image_field: sphere at or below the superconductor surface, z = " +
                            std::to_string(r_pos.z));
    const Vec3 m{mu_J_per_T * n.x, mu_J_per_T * n.y, -mu_J_per_T * n.z};
    return dipole_field(m, Vec3{0.0, 0.0, 2.0 * r_pos.z}, mu_0);
}

// Gradient over position of (image field . n) with n held fixed. Only the z
// component survives because the image tracks the sphere horizontally.
// With B_im.n = -mu_0 mu (nh^2 + 2 nz^2)/(32 pi z^3) the derivative is
// positive: the alignment energy -(mu/2) B_im.n decreases with height,
// i.e. the image pushes the sphere up. Valid for non-unit n as well.
inline Vec3 image_alignment_gradient(const Vec3& n, const Vec3& r_pos, double mu_J_per_T,
                                     double mu_0) {
    if (!(r_pos.z > 0.0))
        throw GeometryError(
            "image_alignment_gradient: sphere at or below the superconductor surface, z = " +
            std::to_string(r_pos.z));
    const double nh2 = n.x * n.x + n.y * n.y;
    const double z = r_pos.z;
    const double dWdz = 3.0 * mu_0 * mu_J_per_T * (nh2 + 2.0 * n.z * n.z) /
                        (32.0 * std::numbers::pi * z * z * z * z);
    return {0.0, 0.0, dWdz};
}

// Orientation equations shared by the free sphere and the brick:
//   dn/dt = omega_I (j x n),  dj/dt = gamma (n x B).
// The brick runs the same flow; what distinguishes it is the initial
// condition j(0) = 0 (no internal spin bias).
inline FGState rhs_free(const FGState& s, const FGSystem& sys) {
    FGState d;
    d.n = sys.derived.omega_I_rad_s * cross(s.j, s.n);
    d.j = sys.consts.gamma() * cross(s.n, sys.model.B_ext_T);
    d.r = {0.0, 0.0, 0.0};
    d.p = {0.0, 0.0, 0.0};
    return d;
}

// Levitated sphere: the image field adds to the torque at full strength, but
// the lifting force carries a factor 1/2 because the image is induced by the
// sphere itself rather than a fixed source. Both enter through the same
// alignment energy -(mu/2) B_im.n, which is quadratic in n, so this pair is
// exactly energy-consistent. A uniform B_ext adds no force.
inline FGState rhs_levitated(const FGState& s, const FGSystem& sys) {
    const double mu = sys.derived.moment_J_per_T;
    FGState d;
    Vec3 B = sys.model.B_ext_T;
    if (sys.model.image_field) B += image_field(s.n, s.r, mu, sys.consts.mu_0);
    d.n = sys.derived.omega_I_rad_s * cross(s.j, s.n);
    d.j = sys.consts.gamma() * cross(s.n, B);
    if (sys.model.frozen_com) {
        d.r = {0.0, 0.0, 0.0};
        d.p = {0.0, 0.0, 0.0};
        return d;
    }
    d.r = s.p / sys.params.mass_kg;
    Vec3 F{0.0, 0.0, 0.0};
    if (sys.model.image_field)
        F += 0.5 * mu * image_alignment_gradient(s.n, s.r, mu, sys.consts.mu_0);
    if (sys.model.gravity) F.z -= sys.params.mass_kg * sys.consts.g_grav;
    d.p = F;
    return d;
}

inline FGState rhs(const FGState& s, const FGSystem& sys) {
    switch (sys.model.kind) {
        case ModelKind::FreeFG:
        case ModelKind::MagneticBrick: return rhs_free(s, sys);
        case ModelKind::LevitatedFG: return rhs_levitated(s, sys);
    }
    throw ParameterError("rhs: unknown model kind");
}

inline void validate_initial_state(const FGState& s, const FGSystem& sys) {
    const double nn = norm(s.n);
    if (std::abs(nn - 1.0) > 1e-6)
        throw ParameterError("initial n must be unit length, |n| = " + std::to_string(nn));
    if (sys.model.kind == ModelKind::MagneticBrick && norm(s.j) > 1e-12)
        throw ParameterError("magnetic_brick requires j(0) = 0");
    if (sys.model.kind == ModelKind::LevitatedFG && !(s.r.z > 0.0))
        throw GeometryError("levitated_fg requires initial height z > 0");
}

// Conserved energy of the implemented flow. The librational part is
// l = j - n for spin-carrying models and l = j for the brick. All kinds
// evolve j at the electron gyromagnetic ratio, so the Zeeman scale the flow
// conserves is gamma * S; it differs from the magnetostatic moment mu by the
// anomalous factor g_e/2 - 1 because the per-spin moment is budgeted as one
// Bohr magneton. With a free center of mass the image force still uses mu,
// so energy exchange between sectors reopens that ~1e-3 gap of the image
// term; every orientation-only configuration is conserved exactly.
inline double energy(const FGState& s, const FGSystem& sys) {
    const Vec3 l = (sys.model.kind == ModelKind::MagneticBrick) ? s.j : s.j - s.n;
    const double mu = sys.derived.moment_J_per_T;
    const double zeeman = sys.derived.spin_J_s * sys.consts.gamma();
    double E = 0.5 * sys.derived.spin_J_s * sys.derived.omega_I_rad_s * dot(l, l) -
               zeeman * dot(s.n, sys.model.B_ext_T);
    if (sys.model.kind == ModelKind::LevitatedFG) {
        if (sys.model.image_field)
            E -= 0.5 * zeeman * dot(s.n, image_field(s.n, s.r, mu, sys.consts.mu_0));
        if (!sys.model.frozen_com) {
            E += dot(s.p, s.p) / (2.0 * sys.params.mass_kg);
            if (sys.model.gravity) E += sys.params.mass_kg * sys.consts.g_grav * s.r.z;
        }
    }
    return E;
}

}  // namespace fgsim
