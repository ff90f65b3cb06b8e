// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "growthsim/audit.hpp"
#include "growthsim/beta.hpp"
#include "growthsim/bounds.hpp"
#include "growthsim/circuit.hpp"
#include "growthsim/couplings.hpp"
#include "growthsim/crn.hpp"
#include "growthsim/engine.hpp"
#include "growthsim/errors.hpp"
#include "growthsim/experiments.hpp"
#include "growthsim/harness.hpp"
#include "growthsim/protocols.hpp"
#include "growthsim/reaction_file.hpp"
#include "growthsim/rng.hpp"
#include "growthsim/stats.hpp"
