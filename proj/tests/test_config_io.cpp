#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "fgsim/cli.hpp"
#include "fgsim/config.hpp"
#include "fgsim/io.hpp"

using namespace fgsim;

namespace {

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("format_double round-trips bitwise") {
    const double vals[] = {0.0,
                           1.0,
                           -1.0,
                           0.1,
                           1.0 / 3.0,
                           std::numbers::pi,
                           -2.5e17,
                           6.77519e-12,
                           1e-300,
                           4.9406564584124654e-324,
                           1.7976931348623157e308,
                           1.1930162083248,
                           -3.111747034080897e-4};
    for (const double v : vals) {
        const std::string s = format_double(v);
        const double back = std::strtod(s.c_str(), nullptr);
        CHECK(bits(back) == bits(v));
        // Shortest form is stable under a second round trip.
        CHECK(format_double(back) == s);
    }
}

TEST_CASE("atomic_write_file writes, replaces, and leaves no temp file") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "fgsim_io_test";
    fs::create_directories(dir);
    const fs::path f = dir / "out.csv";

    atomic_write_file(f, "first\n");
    CHECK(slurp(f) == "first\n");
    atomic_write_file(f, "second\n");
    CHECK(slurp(f) == "second\n");
    CHECK(!fs::exists(dir / "out.csv.tmp"));
    fs::remove_all(dir);
}

TEST_CASE("trajectory csv layout") {
    Trajectory tr;
    tr.t = {0.0, 0.5};
    FGState a;
    a.n = {1.0, 0.0, 0.0};
    a.j = {1.0, 0.0, 0.25};
    a.r = {0.0, 0.0, 3e-4};
    FGState b = a;
    b.n = {0.0, 1.0, 0.0};
    tr.y = {a, b};

    const std::string s = trajectory_csv(tr);
    CHECK(s.substr(0, s.find('\n')) == "t,nx,ny,nz,jx,jy,jz,x,y,z,flux");
    // Without a readout signal the flux column is present but empty.
    const std::string line1 = s.substr(s.find('\n') + 1);
    const std::string row = line1.substr(0, line1.find('\n'));
    CHECK(row.back() == ',');
    CHECK(row == "0e+00,1e+00,0e+00,0e+00,1e+00,0e+00,2.5e-01,0e+00,0e+00,3e-04,");

    const std::vector<double> flux{1e-13, -2e-13};
    const std::string sf = trajectory_csv(tr, &flux);
    CHECK(sf.find("3e-04,1e-13\n") != std::string::npos);
    CHECK(sf.find("3e-04,-2e-13\n") != std::string::npos);

    const std::vector<double> bad{1e-13};
    CHECK_THROWS_AS(trajectory_csv(tr, &bad), ParameterError);
}

TEST_CASE("sweep csv leaves missing peaks empty") {
    SweepRow r;
    r.omega_L_rad_s = 2.0;
    r.fg_low = SpectralPeak{1.0, 0.5};
    const std::string s = sweep_csv({r});
    CHECK(s == "omega_L,peak1,amp1,peak2,amp2,brick_peak,brick_amp\n"
               "2e+00,1e+00,5e-01,,,,\n");
}

TEST_CASE("suppression and exclusion csv headers") {
    CHECK(suppression_csv({}).rfind("radius_m,ratio,z_eq_m,B_image_T\n", 0) == 0);
    ExclusionCurve c;
    c.points = {{1e-6, 3e-7}};
    CHECK(exclusion_csv(c) == "boson_mass_eV,min_coupling\n1e-06,3e-07\n");
}

TEST_CASE("simulate config defaults") {
    const SimulateJob job = parse_simulate(json::object());
    CHECK(job.fg.radius_m == 30e-6);
    CHECK(job.model.kind == ModelKind::FreeFG);
    CHECK(job.model.image_field == false);
    CHECK(job.model.gravity == false);
    const DerivedFG d = derive(job.fg, job.consts);
    CHECK(job.duration_s ==
          Catch::Approx(60.0 * 2.0 * std::numbers::pi / d.omega_I_rad_s).epsilon(1e-14));
    CHECK(job.integ.sample_interval_s == Catch::Approx(job.duration_s / 8192.0).epsilon(1e-14));
    CHECK(job.initial.n.x == 1.0);
    CHECK(job.initial.j.x == 1.0);
    CHECK(job.initial.r.z == 0.0);
    CHECK(job.flux_enabled == false);
}

TEST_CASE("simulate config tilt and ell handling") {
    json cfg = json::parse(R"({"initial": {"tilt_deg": 30.0, "ell": [0, 0, 0.1]}})");
    const SimulateJob job = parse_simulate(cfg);
    const double b = 30.0 * std::numbers::pi / 180.0;
    CHECK(job.initial.n.x == std::cos(b));
    CHECK(job.initial.n.y == 0.0);
    CHECK(job.initial.n.z == std::sin(b));
    CHECK(job.initial.j.z == Catch::Approx(std::sin(b) + 0.1).epsilon(1e-15));

    json brick = json::parse(
        R"({"model": {"kind": "magnetic_brick"}, "initial": {"ell": [0, 0, 0.4]}})");
    const SimulateJob bj = parse_simulate(brick);
    CHECK(bj.initial.j.x == 0.0);
    CHECK(bj.initial.j.z == 0.4);

    json both = json::parse(R"({"initial": {"tilt_deg": 5.0, "n": [1, 0, 0]}})");
    CHECK_THROWS_WITH(parse_simulate(both),
                      Catch::Matchers::ContainsSubstring("exclusive"));
}

TEST_CASE("levitated simulate defaults to the equilibrium height") {
    json cfg = json::parse(R"({"model": {"kind": "levitated_fg"}, "duration_s": 1.0})");
    const SimulateJob job = parse_simulate(cfg);
    CHECK(job.model.image_field == true);
    CHECK(job.model.gravity == true);
    const double z = equilibrium_height(job.fg, job.consts).z_eq_m;
    CHECK(job.initial.r.z == z);
    CHECK(job.initial.r.z == Catch::Approx(3.1117e-4).epsilon(1e-3));
}

TEST_CASE("unknown keys name the key and scope") {
    json cfg = json::parse(R"({"fg": {"radius_mm": 1}})");
    CHECK_THROWS_WITH(parse_simulate(cfg),
                      Catch::Matchers::ContainsSubstring("radius_mm") &&
                          Catch::Matchers::ContainsSubstring("'fg'"));
    json top = json::parse(R"({"durationSeconds": 2})");
    CHECK_THROWS_WITH(parse_simulate(top),
                      Catch::Matchers::ContainsSubstring("durationSeconds"));
    json typo = json::parse(R"({"integrator": {"reltol": 1e-9}})");
    CHECK_THROWS_WITH(parse_simulate(typo), Catch::Matchers::ContainsSubstring("reltol"));
}

TEST_CASE("config type and range errors") {
    CHECK_THROWS_AS(parse_simulate(json::parse(R"({"duration_s": -1})")), ParameterError);
    CHECK_THROWS_AS(parse_simulate(json::parse(R"({"duration_s": "x"})")), ParameterError);
    CHECK_THROWS_AS(parse_simulate(json::parse(R"({"initial": {"n": [0, 0, 0]}})")),
                    ParameterError);
    CHECK_THROWS_AS(parse_simulate(json::parse(R"({"initial": {"n": [1, 0]}})")),
                    ParameterError);
    CHECK_THROWS_AS(parse_simulate(json::parse(R"({"model": {"kind": "pendulum"}})")),
                    ParameterError);
    CHECK_THROWS_AS(parse_simulate(json::parse(R"({"flux": {"mode": "magic"}})")),
                    ParameterError);
    CHECK_THROWS_AS(parse_sweep(json::parse(R"({"sweep": {"nyquist_margin": 2.0}})")),
                    ParameterError);
    CHECK_THROWS_AS(parse_sweep(json::parse(R"({"sweep": {"tilt_deg": 90.0}})")),
                    ParameterError);
    CHECK_THROWS_AS(
        parse_sweep(json::parse(R"({"omega_L": {"values_rad_per_s": [1.0], "min_over_omega_I": 0.1}})")),
        ParameterError);
    CHECK_THROWS_AS(parse_sweep(json::parse(R"({"omega_L": {"values_rad_per_s": [0.0]}})")),
                    ParameterError);
    CHECK_THROWS_AS(parse_exclusion(json::parse(R"({"quadrature": "banana"})")),
                    ParameterError);
    CHECK_THROWS_AS(parse_exclusion(json::parse(R"({"quadrature_order": 100})")),
                    ParameterError);
    CHECK_THROWS_AS(parse_exclusion(json::parse(R"({"noise_floor_rad_per_s": 0.0})")),
                    ParameterError);
    CHECK_THROWS_AS(parse_exclusion(json::parse(R"({"masses_eV": {"values_eV": [-1e-6]}})")),
                    ParameterError);
    CHECK_THROWS_AS(parse_sensitivity(json::parse(R"({"time_s": 0})")), ParameterError);
    CHECK_THROWS_AS(parse_sensitivity(json::parse(R"({"suppression": {"factor": 0.5}})")),
                    ParameterError);
    CHECK_THROWS_AS(parse_sensitivity(json::parse(R"({"suppression": {"mode": "loud"}})")),
                    ParameterError);
}

TEST_CASE("log grids hit their endpoints exactly") {
    const LevitateJob lv = parse_levitate(json::object());
    CHECK(lv.radii_m.size() == 25);
    CHECK(lv.radii_m.front() == 1e-8);
    CHECK(lv.radii_m.back() == 1e-4);
    for (std::size_t i = 1; i < lv.radii_m.size(); ++i)
        CHECK(lv.radii_m[i] > lv.radii_m[i - 1]);

    const SweepJob sw = parse_sweep(json::object());
    const DerivedFG d = derive(sw.fg, sw.consts);
    CHECK(sw.omega_L_rad_s.size() == 43);
    CHECK(sw.omega_L_rad_s.front() == 1e-3 * d.omega_I_rad_s);
    CHECK(sw.omega_L_rad_s.back() == 1e3 * d.omega_I_rad_s);

    const ExclusionJob ex = parse_exclusion(json::object());
    CHECK(ex.masses_eV.size() == 61);
    CHECK(ex.masses_eV.front() == 1e-7);
    CHECK(ex.masses_eV.back() == 1e-2);
}

TEST_CASE("sensitivity defaults to the one micron sphere and its feedback factor") {
    const SensitivityJob job = parse_sensitivity(json::object());
    CHECK(job.fg.radius_m == 1e-6);
    CHECK(job.time_s == 1e6);
    CHECK(job.suppression.mode == SuppressionMode::SqrtPower);
    CHECK(job.suppression.factor == Catch::Approx(345.5).epsilon(5e-3));

    const SensitivityJob fixed =
        parse_sensitivity(json::parse(R"({"suppression": {"mode": "off", "factor": 400}})"));
    CHECK(fixed.suppression.mode == SuppressionMode::Off);
    CHECK(fixed.suppression.factor == 400.0);
}

TEST_CASE("echoed configs are fixed points of parse and echo") {
    const json inputs[] = {
        json::parse(R"({"initial": {"tilt_deg": 5.0, "ell": [0, 0, -0.0871557]},
                        "duration_s": 12.5,
                        "flux": {"enabled": true, "mode": "quadrature"},
                        "squid": {"loop_radius_m": 3e-5, "standoff_m": 5e-5}})"),
        json::parse(R"({"model": {"kind": "levitated_fg", "frozen_com": true},
                        "initial": {"tilt_deg": 2.0},
                        "duration_s": 3.0})"),
        json::parse(R"({"model": {"kind": "magnetic_brick", "B_ext_T": [0, 0, 1e-9]},
                        "initial": {"n": [0.6, 0.0, 0.8]},
                        "duration_s": 7.0,
                        "integrator": {"rel_tol": 1e-9, "sample_interval_s": 0.01}})"),
    };
    for (const json& in : inputs) {
        const std::string once = echo_simulate(parse_simulate(in)).dump(2);
        const std::string twice = echo_simulate(parse_simulate(json::parse(once))).dump(2);
        CHECK(once == twice);
    }

    const std::string sw1 = echo_sweep(parse_sweep(json::object())).dump(2);
    const std::string sw2 = echo_sweep(parse_sweep(json::parse(sw1))).dump(2);
    CHECK(sw1 == sw2);

    const std::string lv1 = echo_levitate(parse_levitate(json::object())).dump(2);
    CHECK(echo_levitate(parse_levitate(json::parse(lv1))).dump(2) == lv1);

    const std::string se1 = echo_sensitivity(parse_sensitivity(json::object())).dump(2);
    CHECK(echo_sensitivity(parse_sensitivity(json::parse(se1))).dump(2) == se1);

    const json exin = json::parse(
        R"({"masses_eV": {"values_eV": [1e-6, 1e-4]},
            "quadrature": "point",
            "noise_floor_rad_per_s": 1e-8,
            "suppression": {"mode": "amplitude", "factor": 345.0}})");
    const std::string ex1 = echo_exclusion(parse_exclusion(exin)).dump(2);
    CHECK(echo_exclusion(parse_exclusion(json::parse(ex1))).dump(2) == ex1);
}

TEST_CASE("thread count resolution") {
    unsetenv("FGSIM_THREADS");
    CHECK(resolve_threads(3) == 3u);
    CHECK(resolve_threads(-1) == 1u);
    CHECK(resolve_threads(0) >= 1u);

    setenv("FGSIM_THREADS", "5", 1);
    CHECK(resolve_threads(-1) == 5u);
    CHECK(resolve_threads(2) == 2u);  // explicit flag wins over the environment

    setenv("FGSIM_THREADS", "abc", 1);
    CHECK_THROWS_AS(resolve_threads(-1), ParameterError);
    unsetenv("FGSIM_THREADS");
}
