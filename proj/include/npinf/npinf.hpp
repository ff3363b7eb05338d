#pragma once

#include "npinf/engine_cnp.hpp"
#include "npinf/engine_dnp.hpp"
#include "npinf/graph.hpp"
#include "npinf/inflmax.hpp"
#include "npinf/learner.hpp"
#include "npinf/rng.hpp"
#include "npinf/shard_sampler.hpp"
#include "npinf/synth.hpp"
#include "npinf/trace.hpp"
