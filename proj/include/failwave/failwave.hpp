#pragma once

// Umbrella header for the failure-wave library.

#include "error.hpp"
#include "grid.hpp"
#include "material.hpp"
#include "profile.hpp"
#include "scenario.hpp"
#include "constitutive.hpp"
#include "stencil.hpp"
#include "discretization.hpp"
#include "field_state.hpp"
#include "tridiagonal.hpp"
#include "solver.hpp"
#include "analysis.hpp"
#include "variational.hpp"
#include "studies.hpp"
#include "io.hpp"
