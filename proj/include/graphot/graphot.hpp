/// Umbrella header for the whole library.
#pragma once

#include "graphot/datagen.hpp"
#include "graphot/editdist.hpp"
#include "graphot/featurize.hpp"
#include "graphot/graph.hpp"
#include "graphot/io.hpp"
#include "graphot/loss.hpp"
#include "graphot/matcher.hpp"
#include "graphot/model_io.hpp"
#include "graphot/rng.hpp"
#include "graphot/solvers.hpp"
