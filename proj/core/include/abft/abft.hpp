#pragma once

#include "abft/codec.hpp"
#include "abft/contention.hpp"
#include "abft/core.hpp"
#include "abft/errors.hpp"
#include "abft/markov.hpp"
#include "abft/planner.hpp"
#include "abft/rng.hpp"
#include "abft/serialize.hpp"
#include "abft/sim.hpp"
