#pragma once

// Fitted difference schemes on a Shishkin mesh for eps^2 y'' = f(x, y),
// y(0) = y(1) = 0.

#include "layerfit/convergence.hpp"
#include "layerfit/io.hpp"
#include "layerfit/mesh.hpp"
#include "layerfit/newton.hpp"
#include "layerfit/problem.hpp"
#include "layerfit/scheme.hpp"
#include "layerfit/tridiag.hpp"
