#pragma once

#include "analytic.hpp"
#include "angles.hpp"
#include "bfgs.hpp"
#include "errors.hpp"
#include "fidelity.hpp"
#include "generators.hpp"
#include "graph.hpp"
#include "harness.hpp"
#include "maxcut.hpp"
#include "optimizer.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "statevector.hpp"
