#pragma once

#include <stdexcept>
#include <string>

namespace fgsim {

// Invalid or out-of-domain input: bad parameter values, malformed config.
// The CLI maps this to exit code 2.
struct ParameterError : std::invalid_argument {
    explicit ParameterError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Physically impossible geometry: sphere at or below the superconductor
// surface, pickup loop inside the sphere, no levitation equilibrium in the
// search bracket. The CLI maps this (and StiffnessError) to exit code 3.
struct GeometryError : std::runtime_error {
    explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

// Integration failure: step-size underflow or step budget exhausted.
// Carries the simulation time that was reached.
struct StiffnessError : std::runtime_error {
    double t_reached;
    StiffnessError(const std::string& msg, double t) : std::runtime_error(msg), t_reached(t) {}
};

}  // namespace fgsim
