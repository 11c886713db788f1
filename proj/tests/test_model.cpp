#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fgsim/constants.hpp"
#include "fgsim/errors.hpp"
#include "fgsim/model.hpp"

using namespace fgsim;

namespace {
constexpr PhysicalConstants kC{};

// Recompute the derived quantities from scratch in long double so the test
// does not share the library's arithmetic path.
struct RefDerived {
    long double S, I, mu, omega_I, B_star;
};

RefDerived reference_derive(const FGParams& p) {
    RefDerived r{};
    r.S = static_cast<long double>(p.spin_count) * kC.hbar / 2.0L;
    r.I = 0.4L * static_cast<long double>(p.mass_kg) * p.radius_m * p.radius_m;
    r.mu = static_cast<long double>(p.spin_count) * p.moment_per_spin_J_per_T;
    r.omega_I = r.S / r.I;
    const long double gamma = static_cast<long double>(kC.g_e) * kC.mu_B / kC.hbar;
    r.B_star = r.omega_I / gamma;
    return r;
}
}  // namespace

TEST_CASE("derived quantities match an independent recomputation") {
    const FGParams p{};
    const auto d = derive(p, kC);
    const auto ref = reference_derive(p);

    CHECK(d.spin_J_s == Catch::Approx(static_cast<double>(ref.S)).epsilon(1e-14));
    CHECK(d.inertia_kg_m2 == Catch::Approx(static_cast<double>(ref.I)).epsilon(1e-14));
    CHECK(d.moment_J_per_T == Catch::Approx(static_cast<double>(ref.mu)).epsilon(1e-14));
    CHECK(d.omega_I_rad_s == Catch::Approx(static_cast<double>(ref.omega_I)).epsilon(1e-13));
    CHECK(d.B_star_T == Catch::Approx(static_cast<double>(ref.B_star)).epsilon(1e-13));
    CHECK(d.omega_star_rad_s == d.omega_I_rad_s);
}

TEST_CASE("default sphere hits the reference operating point") {
    const auto d = derive(FGParams{}, kC);

    // Frozen values, recomputed by hand from the default parameter set.
    CHECK(d.omega_I_rad_s == Catch::Approx(1.1930162).epsilon(1e-6));
    CHECK(d.B_star_T == Catch::Approx(6.77519e-12).epsilon(1e-5));
    CHECK(d.spin_J_s == Catch::Approx(3.69100136e-19).epsilon(1e-8));
    CHECK(d.inertia_kg_m2 == Catch::Approx(3.09384e-19).epsilon(1e-5));
    CHECK(d.moment_J_per_T == Catch::Approx(6.49181e-8).epsilon(1e-5));

    // Coarse design targets for the 30 um sphere.
    CHECK(std::abs(d.omega_I_rad_s / 1.193 - 1.0) < 1e-3);
    CHECK(std::abs(d.B_star_T / 7e-12 - 1.0) < 0.05);
}

TEST_CASE("gamma is the electron gyromagnetic ratio") {
    // Quotient of the rounded inputs (g_e, mu_B, hbar) agrees with the
    // directly published ratio only to ~9 digits.
    CHECK(kC.gamma() == Catch::Approx(1.76085963023e11).epsilon(1e-8));
}

TEST_CASE("cubic scaling preserves density and scales omega_I as 1/r^2") {
    const FGParams base{};
    const auto small = scale_params(base, 1e-6);

    CHECK(small.radius_m == Catch::Approx(1e-6));
    CHECK(small.spin_count == Catch::Approx(7e15 / 27000.0).epsilon(1e-12));
    CHECK(small.mass_kg == Catch::Approx(8.594e-10 / 27000.0).epsilon(1e-12));
    CHECK(small.density_kg_m3() == Catch::Approx(base.density_kg_m3()).epsilon(1e-12));

    const auto d0 = derive(base, kC);
    const auto d1 = derive(small, kC);
    CHECK(d1.omega_I_rad_s == Catch::Approx(d0.omega_I_rad_s * 900.0).epsilon(1e-12));
    CHECK(d1.omega_I_rad_s == Catch::Approx(1073.71).epsilon(1e-4));
    // B* scales with omega_I.
    CHECK(d1.B_star_T / d0.B_star_T == Catch::Approx(900.0).epsilon(1e-12));
    // Moment scales with volume.
    CHECK(d1.moment_J_per_T / d0.moment_J_per_T == Catch::Approx(1.0 / 27000.0).epsilon(1e-12));
}

TEST_CASE("scaling by 1 is the identity") {
    const FGParams base{};
    const auto same = scale_params(base, base.radius_m);
    CHECK(same.radius_m == base.radius_m);
    CHECK(same.spin_count == Catch::Approx(base.spin_count).epsilon(1e-15));
    CHECK(same.mass_kg == Catch::Approx(base.mass_kg).epsilon(1e-15));
}

TEST_CASE("parameter validation rejects nonphysical inputs") {
    FGParams p{};
    p.radius_m = 0.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);

    p = FGParams{};
    p.mass_kg = -1.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);

    p = FGParams{};
    p.spin_count = 0.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);

    p = FGParams{};
    p.moment_per_spin_J_per_T = 0.0;
    CHECK_THROWS_AS(p.validate(), ParameterError);

    p = FGParams{};
    p.radius_m = std::nan("");
    CHECK_THROWS_AS(p.validate(), ParameterError);

    CHECK_NOTHROW(FGParams{}.validate());
}

TEST_CASE("validation errors name the offending quantity") {
    FGParams p{};
    p.radius_m = -2.0;
    try {
        p.validate();
        FAIL("expected ParameterError");
    } catch (const ParameterError& e) {
        CHECK(std::string(e.what()).find("radius") != std::string::npos);
    }
}
