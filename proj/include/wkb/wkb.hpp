#pragma once

#include "wkb/chebyshev.hpp"
#include "wkb/coefficient.hpp"
#include "wkb/experiments.hpp"
#include "wkb/jet.hpp"
#include "wkb/oracle.hpp"
#include "wkb/phase.hpp"
#include "wkb/quadrature.hpp"
#include "wkb/solver.hpp"
