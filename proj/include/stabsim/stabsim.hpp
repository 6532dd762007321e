#pragma once

#include "stabsim/algorithm.hpp"
#include "stabsim/daemon.hpp"
#include "stabsim/engine.hpp"
#include "stabsim/error.hpp"
#include "stabsim/explorer.hpp"
#include "stabsim/graph.hpp"
#include "stabsim/random.hpp"
#include "stabsim/scenarios.hpp"
#include "stabsim/verifier.hpp"
