#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "fgsim/exotic.hpp"
#include "fgsim/model.hpp"
#include "oracles.hpp"

using namespace fgsim;

namespace {
constexpr PhysicalConstants kC{};
const FGParams kSensor = scale_params(FGParams{}, 1e-6);

double compton_inv_m(double mass_eV) { return mass_eV * kC.e_charge / (kC.c * kC.hbar); }
}  // namespace

TEST_CASE("pair potential matches the long-double reference") {
    const Vec3 dirs[] = {{0, 0, 1}, {1, 0, 0}, {0.6, 0, 0.8}, {-0.48, 0.6, 0.64}};
    const Vec3 seps[] = {{0, 0, 2e-3}, {1.5e-3, 0, 0}, {1e-3, 1e-3, 1e-3}};
    for (double mass : {0.0, 1e-5, 3e-4, 2e-3}) {
        for (const Vec3& d1 : dirs) {
            for (const Vec3& d2 : dirs) {
                for (const Vec3& r : seps) {
                    const double got = v_pp_J(d1, d2, r, mass, 1.0, kC);
                    const double want = oracles::v_pp_reference(d1, d2, r, mass, 1.0, kC);
                    // Geometries like d1 = d2 with r along (1,1,1) cancel the
                    // two dipole terms exactly; what survives is rounding dust
                    // many decades below the 1e-43 term scale.
                    if (std::abs(want) < 1e-55) {
                        CHECK(std::abs(got) < 1e-55);
                    } else {
                        CHECK(got == Catch::Approx(want).epsilon(2e-13));
                    }
                }
            }
        }
    }
}

TEST_CASE("pair potential is symmetric under particle exchange") {
    const Vec3 d1{0.6, 0.0, 0.8};
    const Vec3 d2{0.0, 0.28, 0.96};
    const Vec3 r{1.1e-3, -0.4e-3, 0.9e-3};
    for (double mass : {0.0, 4e-4}) {
        CHECK(v_pp_J(d1, d2, r, mass, 1.0, kC) ==
              Catch::Approx(v_pp_J(d2, d1, -1.0 * r, mass, 1.0, kC)).epsilon(1e-15));
    }
}

TEST_CASE("massless potential falls as one over distance cubed") {
    const Vec3 z{0, 0, 1};
    const double v1 = v_pp_J(z, z, {0, 0, 1e-3}, 0.0, 1.0, kC);
    const double v2 = v_pp_J(z, z, {0, 0, 2e-3}, 0.0, 1.0, kC);
    CHECK(v2 == Catch::Approx(v1 / 8.0).epsilon(1e-12));
}

TEST_CASE("massive potential decays on the Compton scale") {
    // Perpendicular geometry isolates the termA channel; one extra Compton
    // wavelength must cost nearly e^-1, softened only by the power-law tail.
    const double mass = 1e-3;  // eV
    const double lam = 1.0 / compton_inv_m(mass);
    const Vec3 z{0, 0, 1};
    const double r = 5.0 * lam;
    const double near = v_pp_J(z, z, {r, 0, 0}, mass, 1.0, kC);
    const double far = v_pp_J(z, z, {r + lam, 0, 0}, mass, 1.0, kC);
    const double ratio = far / near;
    CHECK(ratio < std::exp(-1.0));
    CHECK(ratio > std::exp(-1.0) / 8.0);
}

TEST_CASE("pair potential is linear in the coupling") {
    const Vec3 z{0, 0, 1};
    const double v1 = v_pp_J(z, z, {0, 0, 2e-3}, 3e-4, 1.0, kC);
    const double v2 = v_pp_J(z, z, {0, 0, 2e-3}, 3e-4, 2.0, kC);
    CHECK(v2 == Catch::Approx(2.0 * v1).epsilon(1e-15));
}

TEST_CASE("pair potential validation") {
    const Vec3 z{0, 0, 1};
    CHECK_THROWS_AS(v_pp_J(z, z, {0, 0, 1e-3}, -1e-4, 1.0, kC), ParameterError);
    CHECK_THROWS_AS(v_pp_J(z, z, {0, 0, 1e-3}, 1e-4, -1.0, kC), ParameterError);
    CHECK_THROWS_AS(v_pp_J(z, z, {0, 0, 0}, 1e-4, 1.0, kC), ParameterError);
}

TEST_CASE("source geometry bookkeeping") {
    SpinSource src{};
    CHECK(src.center_distance_m(kSensor.radius_m) ==
          Catch::Approx(2.001e-3).epsilon(1e-12));
    src.standoff_is_center_distance = true;
    src.standoff_m = 5e-3;
    CHECK(src.center_distance_m(kSensor.radius_m) == 5e-3);
}

TEST_CASE("equivalent field points along the polarization for the axial layout") {
    const SpinSource src{};
    for (double mass : {0.0, 3e-4}) {
        const Vec3 B = equivalent_field_T(kSensor, src, mass, 1e-20,
                                          PairQuadrature::Point, 8, kC);
        CHECK(B.x == 0.0);
        CHECK(B.y == 0.0);
        CHECK(B.z > 0.0);
        const Vec3 Bv = equivalent_field_T(kSensor, src, mass, 1e-20,
                                           PairQuadrature::Volume, 8, kC);
        CHECK(std::abs(Bv.x) < 1e-9 * std::abs(Bv.z));
        CHECK(std::abs(Bv.y) < 1e-9 * std::abs(Bv.z));
        CHECK(Bv.z > 0.0);
    }
}

TEST_CASE("massless volume integral reproduces the point dipole value") {
    // The massless kernel has the dipole-dipole form, which is harmonic away
    // from the source, so the exact sphere averages collapse to the center
    // values. The quadrature reaches that identity only up to its angular
    // truncation, which shrinks like (R/d)^(2 * order).
    const SpinSource src{};
    const double bp = norm(equivalent_field_T(kSensor, src, 0.0, 1e-20,
                                              PairQuadrature::Point, 8, kC));
    const double dev8 = std::abs(norm(equivalent_field_T(kSensor, src, 0.0, 1e-20,
                                                         PairQuadrature::Volume, 8, kC)) /
                                     bp -
                                 1.0);
    const double dev16 = std::abs(norm(equivalent_field_T(kSensor, src, 0.0, 1e-20,
                                                          PairQuadrature::Volume, 16, kC)) /
                                      bp -
                                  1.0);
    CHECK(dev8 < 1e-4);
    CHECK(dev16 < 1e-8);
    CHECK(dev16 < dev8);
}

TEST_CASE("volume quadrature converges and spreads the Yukawa reach") {
    const SpinSource src{};
    const double mass = 3e-4;  // Compton wavelength 0.66 mm, comparable to the source
    const double b8 = norm(equivalent_field_T(kSensor, src, mass, 1e-20,
                                              PairQuadrature::Volume, 8, kC));
    const double b16 = norm(equivalent_field_T(kSensor, src, mass, 1e-20,
                                               PairQuadrature::Volume, 16, kC));
    CHECK(b8 == Catch::Approx(b16).epsilon(1e-3));

    // With the near side of the source a Compton length closer than the
    // center, the volume average must exceed the point estimate.
    const double bp = norm(equivalent_field_T(kSensor, src, mass, 1e-20,
                                              PairQuadrature::Point, 8, kC));
    CHECK(b16 > bp);
    CHECK(b16 < 20.0 * bp);
}

TEST_CASE("equivalent field is linear in the coupling") {
    const SpinSource src{};
    const Vec3 b1 = equivalent_field_T(kSensor, src, 3e-4, 1e-20, PairQuadrature::Point, 8, kC);
    const Vec3 b2 = equivalent_field_T(kSensor, src, 3e-4, 2e-20, PairQuadrature::Point, 8, kC);
    CHECK(b2.z == Catch::Approx(2.0 * b1.z).epsilon(1e-14));
}

TEST_CASE("overlapping bodies are rejected") {
    SpinSource src{};
    src.standoff_is_center_distance = true;
    src.standoff_m = 1.0005e-3;  // inside radius sum of 1.001 mm
    CHECK_THROWS_AS(equivalent_field_T(kSensor, src, 0.0, 1.0, PairQuadrature::Point, 8, kC),
                    GeometryError);
}

TEST_CASE("exclusion curve scales linearly with floor, suppression, and source size") {
    const SpinSource src{};
    const std::vector<double> masses{1e-6, 1e-4};
    const ExclusionCurve a =
        exclusion_curve(kSensor, src, masses, 1e-8, 1.0, PairQuadrature::Point, 8, kC);
    const ExclusionCurve b =
        exclusion_curve(kSensor, src, masses, 2e-8, 1.0, PairQuadrature::Point, 8, kC);
    const ExclusionCurve s =
        exclusion_curve(kSensor, src, masses, 1e-8, 345.0, PairQuadrature::Point, 8, kC);
    SpinSource big = src;
    big.spin_count *= 2.0;
    const ExclusionCurve n =
        exclusion_curve(kSensor, big, masses, 1e-8, 1.0, PairQuadrature::Point, 8, kC);
    for (std::size_t i = 0; i < masses.size(); ++i) {
        CHECK(b.points[i].min_coupling ==
              Catch::Approx(2.0 * a.points[i].min_coupling).epsilon(1e-12));
        CHECK(s.points[i].min_coupling ==
              Catch::Approx(345.0 * a.points[i].min_coupling).epsilon(1e-12));
        CHECK(n.points[i].min_coupling ==
              Catch::Approx(0.5 * a.points[i].min_coupling).epsilon(1e-12));
    }
    CHECK(a.center_distance_m == Catch::Approx(2.001e-3).epsilon(1e-12));
}

TEST_CASE("exclusion curve is flat below the geometric Compton scale and walls above") {
    const SpinSource src{};
    const std::vector<double> masses{1e-8, 1e-7, 3e-4, 6e-4, 1.2e-3};
    const ExclusionCurve c =
        exclusion_curve(kSensor, src, masses, 1e-8, 1.0, PairQuadrature::Point, 8, kC);
    // Plateau: lab-scale separations cannot tell 1e-8 eV from 1e-7 eV.
    CHECK(c.points[1].min_coupling ==
          Catch::Approx(c.points[0].min_coupling).epsilon(5e-3));
    // Wall: each factor-two mass step above the scale costs a large factor.
    const double wall1 = c.points[3].min_coupling / c.points[2].min_coupling;
    CHECK(wall1 > 3.0);
    CHECK(wall1 < 50.0);
    CHECK(c.points[4].min_coupling > c.points[3].min_coupling);
}

TEST_CASE("exclusion curve is deterministic across thread counts") {
    const SpinSource src{};
    const std::vector<double> masses{1e-7, 1e-5, 1e-3};
    const ExclusionCurve t1 =
        exclusion_curve(kSensor, src, masses, 1e-8, 2.0, PairQuadrature::Volume, 4, kC, 1);
    const ExclusionCurve t3 =
        exclusion_curve(kSensor, src, masses, 1e-8, 2.0, PairQuadrature::Volume, 4, kC, 3);
    for (std::size_t i = 0; i < masses.size(); ++i)
        CHECK(t1.points[i].min_coupling == t3.points[i].min_coupling);
}

TEST_CASE("exclusion curve validation") {
    const SpinSource src{};
    const std::vector<double> masses{1e-6};
    CHECK_THROWS_AS(exclusion_curve(kSensor, src, masses, 0.0, 1.0), ParameterError);
    CHECK_THROWS_AS(exclusion_curve(kSensor, src, masses, 1e-8, 0.5), ParameterError);
    CHECK_THROWS_AS(
        exclusion_curve(kSensor, src, {-1e-6}, 1e-8, 1.0, PairQuadrature::Point, 8, kC),
        ParameterError);
}
