#pragma once

#include "polyreach/fixtures.hpp"
#include "polyreach/mat_poly_zonotope.hpp"
#include "polyreach/monte_carlo.hpp"
#include "polyreach/network.hpp"
#include "polyreach/poly_zonotope.hpp"
#include "polyreach/relu.hpp"
#include "polyreach/serialization.hpp"
#include "polyreach/variation.hpp"
#include "polyreach/verifier.hpp"
#include "polyreach/zonotope_baseline.hpp"
