#pragma once

// Feature-free geometric correspondence: minimal-problem polynomials scored
// by Sylvester-resultant magnitudes feed a sparse higher-order affinity
// tensor, optimized by tensor power iteration.

#include "resmatch/camera.hpp"
#include "resmatch/errors.hpp"
#include "resmatch/instance.hpp"
#include "resmatch/matching.hpp"
#include "resmatch/minimal_problems.hpp"
#include "resmatch/polynomial.hpp"
#include "resmatch/rng.hpp"
#include "resmatch/simulation.hpp"
#include "resmatch/tensor.hpp"
