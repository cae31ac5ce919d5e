// Umbrella header.

#pragma once

#include "gtwc/baselines.hpp"
#include "gtwc/cli.hpp"
#include "gtwc/config.hpp"
#include "gtwc/core_model.hpp"
#include "gtwc/csv.hpp"
#include "gtwc/fractional.hpp"
#include "gtwc/linalg.hpp"
#include "gtwc/optimizer.hpp"
#include "gtwc/parallel.hpp"
#include "gtwc/rng.hpp"
#include "gtwc/simulator.hpp"
#include "gtwc/types.hpp"
