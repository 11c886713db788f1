// Command line front end. Subcommands: simulate, sweep, levitate,
// sensitivity, exclusion. Every run writes its fully resolved configuration
// next to the output so it can be reproduced from the artifacts alone.
// Exit codes: 0 success, 2 invalid config or parameters, 3 numerical or
// geometric failure.

#include <CLI11.hpp>

#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include "fgsim/fgsim.hpp"

namespace {

struct SubArgs {
    std::string config_path;
    std::string out_path;
    int threads = -1;
    bool verbose = false;
};

void add_common(CLI::App* sub, SubArgs& args, const std::string& default_out) {
    args.out_path = default_out;
    sub->add_option("-c,--config", args.config_path, "JSON config file (defaults when omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--out", args.out_path, "output file path")->capture_default_str();
    sub->add_option("-t,--threads", args.threads,
                    "worker threads (0 = all cores; default: FGSIM_THREADS or 1)");
    sub->add_flag("-v,--verbose", args.verbose, "progress and statistics on stderr");
}

fgsim::json load_config(const std::string& path) {
    if (path.empty()) return fgsim::json::object();
    std::ifstream in(path);
    if (!in) throw fgsim::ParameterError("cannot open config file: " + path);
    try {
        return fgsim::json::parse(in);
    } catch (const fgsim::json::parse_error& e) {
        throw fgsim::ParameterError("config parse error in " + path + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fgsim: deterministic spin-rotor dynamics and readout toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "fgsim 1.0.0");

    SubArgs a_sim, a_sweep, a_lev, a_sens, a_excl;
    CLI::App* c_sim = app.add_subcommand(
        "simulate", "integrate one trajectory and write it as CSV");
    add_common(c_sim, a_sim, "simulate.csv");
    CLI::App* c_sweep = app.add_subcommand(
        "sweep", "field sweep: spectral lines vs Larmor rate, free sphere and no-spin twin");
    add_common(c_sweep, a_sweep, "sweep.csv");
    CLI::App* c_lev = app.add_subcommand(
        "levitate", "levitation equilibria and feedback suppression vs sphere radius");
    add_common(c_lev, a_lev, "levitation.csv");
    CLI::App* c_sens = app.add_subcommand(
        "sensitivity", "noise budget; prints headline numbers as JSON on stdout");
    add_common(c_sens, a_sens, "sensitivity.json");
    CLI::App* c_excl = app.add_subcommand(
        "exclusion", "smallest detectable exotic coupling vs boson mass");
    add_common(c_excl, a_excl, "exclusion.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (c_sim->parsed()) {
            fgsim::run_simulate(load_config(a_sim.config_path), a_sim.out_path,
                                fgsim::resolve_threads(a_sim.threads), a_sim.verbose);
        } else if (c_sweep->parsed()) {
            fgsim::run_sweep(load_config(a_sweep.config_path), a_sweep.out_path,
                             fgsim::resolve_threads(a_sweep.threads), a_sweep.verbose);
        } else if (c_lev->parsed()) {
            fgsim::run_levitate(load_config(a_lev.config_path), a_lev.out_path,
                                fgsim::resolve_threads(a_lev.threads), a_lev.verbose);
        } else if (c_sens->parsed()) {
            fgsim::run_sensitivity(load_config(a_sens.config_path), a_sens.out_path,
                                   fgsim::resolve_threads(a_sens.threads), a_sens.verbose);
        } else if (c_excl->parsed()) {
            fgsim::run_exclusion(load_config(a_excl.config_path), a_excl.out_path,
                                 fgsim::resolve_threads(a_excl.threads), a_excl.verbose);
        }
    } catch (const fgsim::ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const fgsim::StiffnessError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const fgsim::GeometryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
