#pragma once

// Umbrella header: rigid spin-rotor dynamics, superconducting image
// levitation, spectral readout, noise budgets, and exotic-coupling reach.

#include "fgsim/cli.hpp"
#include "fgsim/config.hpp"
#include "fgsim/constants.hpp"
#include "fgsim/dynamics.hpp"
#include "fgsim/errors.hpp"
#include "fgsim/exotic.hpp"
#include "fgsim/integrator.hpp"
#include "fgsim/io.hpp"
#include "fgsim/levitation.hpp"
#include "fgsim/model.hpp"
#include "fgsim/parallel.hpp"
#include "fgsim/quadrature.hpp"
#include "fgsim/sensitivity.hpp"
#include "fgsim/spectral.hpp"
#include "fgsim/vec3.hpp"
