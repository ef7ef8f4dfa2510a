#pragma once

// Umbrella header: solvers and experiment harness for finite-horizon
// linear-quadratic dynamic games (feedback vs. open-loop Nash equilibria,
// the auxiliary-game reduction between them, and perturbation bounds on
// their gap).

#include "lqgap/auxiliary.hpp"
#include "lqgap/csv.hpp"
#include "lqgap/errors.hpp"
#include "lqgap/experiments.hpp"
#include "lqgap/feedback.hpp"
#include "lqgap/fixtures.hpp"
#include "lqgap/game.hpp"
#include "lqgap/game_io.hpp"
#include "lqgap/gap_bound.hpp"
#include "lqgap/linalg.hpp"
#include "lqgap/open_loop.hpp"
#include "lqgap/rng.hpp"
#include "lqgap/sampler.hpp"
#include "lqgap/trajectory.hpp"
