#pragma once

// Umbrella header for the whole library (the CLI layer stays separate so
// library users do not pull in the argument parser).

#include "dtnsim/core.hpp"
#include "dtnsim/rng.hpp"
#include "dtnsim/mobility.hpp"
#include "dtnsim/medium.hpp"
#include "dtnsim/route.hpp"
#include "dtnsim/utility.hpp"
#include "dtnsim/protocols.hpp"
#include "dtnsim/engine.hpp"
#include "dtnsim/metrics.hpp"
#include "dtnsim/scenario.hpp"
#include "dtnsim/csvio.hpp"
#include "dtnsim/batch.hpp"
