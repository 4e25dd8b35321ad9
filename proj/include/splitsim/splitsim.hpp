#pragma once

#include "splitsim/affine.hpp"
#include "splitsim/analysis.hpp"
#include "splitsim/ca.hpp"
#include "splitsim/conformance.hpp"
#include "splitsim/constants.hpp"
#include "splitsim/engine.hpp"
#include "splitsim/fixed_engine.hpp"
#include "splitsim/green.hpp"
#include "splitsim/io.hpp"
#include "splitsim/lattice.hpp"
#include "splitsim/rational.hpp"
#include "splitsim/shape.hpp"
