#pragma once

// Umbrella header for the scaling-limit laboratory.

#include "scalelab/core.hpp"
#include "scalelab/gauss.hpp"
#include "scalelab/quadrature.hpp"
#include "scalelab/testfn.hpp"
#include "scalelab/onep.hpp"
#include "scalelab/states.hpp"
#include "scalelab/sectors.hpp"
#include "scalelab/models.hpp"
#include "scalelab/theta.hpp"
#include "scalelab/nuclearity.hpp"
#include "scalelab/harness.hpp"
