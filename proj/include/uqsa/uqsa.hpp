#pragma once

// Umbrella header for the uqsa library: goal-oriented divergence bounds,
// Fisher-information sensitivity bounds, path-space information rates and
// the reference model zoo.

#include "uqsa/cgf.hpp"
#include "uqsa/csv.hpp"
#include "uqsa/divergence.hpp"
#include "uqsa/fisher.hpp"
#include "uqsa/goal_divergence.hpp"
#include "uqsa/linalg.hpp"
#include "uqsa/markov.hpp"
#include "uqsa/math.hpp"
#include "uqsa/model_zoo.hpp"
#include "uqsa/observable.hpp"
#include "uqsa/path_info.hpp"
#include "uqsa/quadrature.hpp"
#include "uqsa/rng.hpp"
#include "uqsa/simulate.hpp"
#include "uqsa/static_sensitivity.hpp"
