#pragma once

// Everything in one include.

#include "image.hpp"
#include "phantom.hpp"
#include "projector.hpp"
#include "objective.hpp"
#include "random.hpp"
#include "stats.hpp"
#include "baselines.hpp"
#include "optim/box_schedule.hpp"
#include "optim/swarm.hpp"
#include "optim/dfo.hpp"
#include "optim/pso.hpp"
#include "optim/de.hpp"
#include "optim/run.hpp"
#include "optim/tune.hpp"
#include "harness/config.hpp"
#include "harness/suite.hpp"
#include "harness/store.hpp"
#include "harness/tables.hpp"
#include "harness/pgm.hpp"
#include "harness/experiment.hpp"
