#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "fgsim/errors.hpp"
#include "fgsim/model.hpp"
#include "fgsim/parallel.hpp"
#include "fgsim/quadrature.hpp"
#include "fgsim/vec3.hpp"

namespace fgsim {

// Spin-polarized source body: a sphere of polarized electron spins facing
// the sensor. standoff_m is the surface-to-surface gap by default; set
// standoff_is_center_distance to interpret it as the center spacing.
struct SpinSource {
    double radius_m = 1e-3;
    double spin_count = 5e19;
    Vec3 polarization{0.0, 0.0, 1.0};  // unit direction of the source spins
    double standoff_m = 1e-3;
    bool standoff_is_center_distance = false;

    void validate() const {
        if (!(radius_m > 0.0)) throw ParameterError("source.radius_m must be > 0");
        if (!(spin_count >= 1.0)) throw ParameterError("source.spin_count must be >= 1");
        if (!(norm(polarization) > 0.0))
            throw ParameterError("source.polarization must be nonzero");
        if (!(standoff_m > 0.0)) throw ParameterError("source.standoff_m must be > 0");
    }

    double center_distance_m(double sensor_radius_m) const {
        return standoff_is_center_distance ? standoff_m
                                           : standoff_m + radius_m + sensor_radius_m;
    }
};

// Pseudoscalar-exchange potential between two spin-1/2 particles separated
// by r_vec (from particle 1 to particle 2), with dimensionless spin
// operators S_i = d_i / 2 (d_i unit vectors). g2 is the dimensionless
// coupling combination (pseudoscalar coupling squared over 4 pi hbar c).
// The contact term is dropped: macroscopic bodies never overlap here.
// A zero boson mass gives the pure 1/r^3 dipole-dipole limit.
inline double v_pp_J(const Vec3& d1, const Vec3& d2, const Vec3& r_vec, double boson_mass_eV,
                     double g2, const PhysicalConstants& c = {}) {
    if (!(boson_mass_eV >= 0.0)) throw ParameterError("v_pp: boson_mass_eV must be >= 0");
    if (!(g2 >= 0.0)) throw ParameterError("v_pp: g2 must be >= 0");
    const double r2 = dot(r_vec, r_vec);
    if (!(r2 > 0.0)) throw ParameterError("v_pp: zero separation");
    const double r = std::sqrt(r2);
    const Vec3 rhat = r_vec / r;
    // Inverse reduced Compton wavelength of the boson.
    const double inv_lam = boson_mass_eV * c.e_charge / (c.c * c.hbar);
    const double inv_r = 1.0 / r;
    const double inv_r2 = inv_r * inv_r;
    const double inv_r3 = inv_r2 * inv_r;
    const double termA = inv_lam * inv_r2 + inv_r3;
    const double termB = inv_lam * inv_lam * inv_r + 3.0 * inv_lam * inv_r2 + 3.0 * inv_r3;
    const double pref = g2 * c.hbar * c.hbar * c.hbar / (4.0 * c.m_e * c.m_e * c.c);
    return pref * 0.25 *
           (dot(d1, d2) * termA - dot(d1, rhat) * dot(d2, rhat) * termB) *
           std::exp(-inv_lam * r);
}

enum class PairQuadrature { Point, Volume };

inline const char* to_string(PairQuadrature q) {
    return q == PairQuadrature::Point ? "point" : "volume";
}

namespace detail {

// The potential is linear in the sensor spin direction d2:
//   v_pp = d2 . kernel(d1, r).
// Summing the kernel over all source-sensor pairs therefore gives the exact
// energy gradient with respect to n in one pass.
inline Vec3 v_pp_kernel(const Vec3& d1, const Vec3& r_vec, double inv_lam, double pref) {
    const double r2 = dot(r_vec, r_vec);
    const double r = std::sqrt(r2);
    const Vec3 rhat = r_vec / r;
    const double inv_r = 1.0 / r;
    const double inv_r2 = inv_r * inv_r;
    const double inv_r3 = inv_r2 * inv_r;
    const double termA = inv_lam * inv_r2 + inv_r3;
    const double termB = inv_lam * inv_lam * inv_r + 3.0 * inv_lam * inv_r2 + 3.0 * inv_r3;
    const double e = std::exp(-inv_lam * r);
    return (pref * 0.25 * e) * (termA * d1 - (termB * dot(d1, rhat)) * rhat);
}

// Product-rule nodes for a solid sphere of radius R centered at `center`:
// Gauss-Legendre in radius (weight r^2) and polar cosine, uniform azimuth.
// Node weights sum to the sphere volume.
struct SphereNodes {
    std::vector<Vec3> x;
    std::vector<double> w;
};

inline SphereNodes sphere_nodes(const Vec3& center, double R, int order) {
    if (order < 1) throw ParameterError("sphere_nodes: order must be >= 1");
    const GaussLegendre qr = gauss_legendre_on(order, 0.0, R);
    const GaussLegendre qc = gauss_legendre(order);  // cos(theta) on [-1, 1]
    const int nphi = 2 * order;
    SphereNodes nodes;
    nodes.x.reserve(static_cast<std::size_t>(order) * order * nphi);
    nodes.w.reserve(nodes.x.capacity());
    for (int i = 0; i < order; ++i) {
        const double r = qr.x[i];
        const double wr = qr.w[i] * r * r;
        for (int k = 0; k < order; ++k) {
            const double ct = qc.x[k];
            const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            const double w = wr * qc.w[k] * (2.0 * std::numbers::pi / nphi);
            for (int a = 0; a < nphi; ++a) {
                const double ph = 2.0 * std::numbers::pi * a / nphi;
                nodes.x.push_back(center +
                                  Vec3{r * st * std::cos(ph), r * st * std::sin(ph), r * ct});
                nodes.w.push_back(w);
            }
        }
    }
    return nodes;
}

}  // namespace detail

// Magnetic-field equivalent of the exotic coupling: the total pair energy is
// exactly linear in the sensor direction n, E(n) = n . G, and matching
// E = -mu n . B_eff gives B_eff = -G / mu. Point mode treats both bodies as
// single points at their centers (separated along z); volume mode integrates
// over both spheres with uniform spin density (order = radial nodes per
// sphere; the angular rules scale with it).
inline Vec3 equivalent_field_T(const FGParams& sensor, const SpinSource& src, double boson_mass_eV,
                               double g2, PairQuadrature quad = PairQuadrature::Volume,
                               int order = 8, const PhysicalConstants& c = {}) {
    sensor.validate();
    src.validate();
    if (!(boson_mass_eV >= 0.0))
        throw ParameterError("equivalent_field: boson_mass_eV must be >= 0");
    const double dcc = src.center_distance_m(sensor.radius_m);
    if (!(dcc > src.radius_m + sensor.radius_m))
        throw GeometryError("equivalent_field: source and sensor overlap");
    const Vec3 pol = normalized(src.polarization);
    const double inv_lam = boson_mass_eV * c.e_charge / (c.c * c.hbar);
    const double pref = g2 * c.hbar * c.hbar * c.hbar / (4.0 * c.m_e * c.m_e * c.c);
    const double mu = sensor.spin_count * sensor.moment_per_spin_J_per_T;

    Vec3 G{0.0, 0.0, 0.0};
    if (quad == PairQuadrature::Point) {
        // Source center at origin, sensor center at +z * dcc.
        G = src.spin_count * sensor.spin_count *
            detail::v_pp_kernel(pol, Vec3{0.0, 0.0, dcc}, inv_lam, pref);
    } else {
        const detail::SphereNodes a = detail::sphere_nodes({0.0, 0.0, 0.0}, src.radius_m, order);
        const detail::SphereNodes b =
            detail::sphere_nodes({0.0, 0.0, dcc}, sensor.radius_m, order);
        const double vol_a =
            4.0 / 3.0 * std::numbers::pi * src.radius_m * src.radius_m * src.radius_m;
        const double vol_b =
            4.0 / 3.0 * std::numbers::pi * sensor.radius_m * sensor.radius_m * sensor.radius_m;
        const double dens = (src.spin_count / vol_a) * (sensor.spin_count / vol_b);
        for (std::size_t ib = 0; ib < b.x.size(); ++ib) {
            Vec3 acc{0.0, 0.0, 0.0};
            for (std::size_t ia = 0; ia < a.x.size(); ++ia)
                acc += a.w[ia] * detail::v_pp_kernel(pol, b.x[ib] - a.x[ia], inv_lam, pref);
            G += (dens * b.w[ib]) * acc;
        }
    }
    return (-1.0 / mu) * G;
}

struct ExclusionPoint {
    double boson_mass_eV = 0.0;
    double min_coupling = 0.0;  // smallest detectable g2
};

struct ExclusionCurve {
    std::vector<ExclusionPoint> points;
    double noise_floor_rad_s = 0.0;
    double suppression_factor = 1.0;
    PairQuadrature quadrature = PairQuadrature::Volume;
    int order = 8;
    double center_distance_m = 0.0;
};

// Smallest detectable coupling versus boson mass: the precession response to
// the equivalent field, suppressed by the levitation feedback factor like
// any coherent field signal, must clear the measured frequency floor:
//   gamma |B_eff(g2)| / suppression >= floor  =>  g2_min by linearity in g2.
inline ExclusionCurve exclusion_curve(const FGParams& sensor, const SpinSource& src,
                                      const std::vector<double>& masses_eV,
                                      double noise_floor_rad_s, double suppression_factor = 1.0,
                                      PairQuadrature quad = PairQuadrature::Volume, int order = 8,
                                      const PhysicalConstants& c = {}, unsigned threads = 1) {
    if (!(noise_floor_rad_s > 0.0))
        throw ParameterError("exclusion_curve: noise_floor_rad_s must be > 0");
    if (!(suppression_factor >= 1.0))
        throw ParameterError("exclusion_curve: suppression_factor must be >= 1");
    ExclusionCurve curve;
    curve.noise_floor_rad_s = noise_floor_rad_s;
    curve.suppression_factor = suppression_factor;
    curve.quadrature = quad;
    curve.order = order;
    curve.center_distance_m = src.center_distance_m(sensor.radius_m);
    curve.points.resize(masses_eV.size());
    const double gamma = c.gamma();
    parallel_for(masses_eV.size(), threads, [&](std::size_t i) {
        const double m = masses_eV[i];
        if (!(m >= 0.0)) throw ParameterError("exclusion_curve: boson mass must be >= 0");
        const double B_per_g2 = norm(equivalent_field_T(sensor, src, m, 1.0, quad, order, c));
        curve.points[i] = {m, noise_floor_rad_s * suppression_factor / (gamma * B_per_g2)};
    });
    return curve;
}

}  // namespace fgsim
