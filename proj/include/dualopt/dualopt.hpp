#pragma once

#include "dualopt/copula.hpp"
#include "dualopt/cost_profile.hpp"
#include "dualopt/golden.hpp"
#include "dualopt/json_io.hpp"
#include "dualopt/kernel.hpp"
#include "dualopt/measure.hpp"
#include "dualopt/normal.hpp"
#include "dualopt/polynomial.hpp"
#include "dualopt/quadrature.hpp"
#include "dualopt/solver.hpp"
#include "dualopt/stats.hpp"
#include "dualopt/verify.hpp"
