#pragma once

// Umbrella header: exact permanent algorithms (naive, Glynn, MacMahon
// coefficient extraction, spin-system routes) and the Monte Carlo
// estimators built on the probabilistic representation of the permanent.

#include "permanent/errors.hpp"
#include "permanent/estimators.hpp"
#include "permanent/exact.hpp"
#include "permanent/matrix.hpp"
#include "permanent/multilinear.hpp"
#include "permanent/rng.hpp"
#include "permanent/spin.hpp"
