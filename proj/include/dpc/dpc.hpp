#pragma once

#include "dpc/analytic.hpp"
#include "dpc/channel.hpp"
#include "dpc/error.hpp"
#include "dpc/experiment.hpp"
#include "dpc/geometry.hpp"
#include "dpc/montecarlo.hpp"
#include "dpc/optimize.hpp"
#include "dpc/rng.hpp"
#include "dpc/schemes.hpp"
#include "dpc/stats.hpp"
