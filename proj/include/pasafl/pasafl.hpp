#pragma once

#include "pasafl/core_types.hpp"
#include "pasafl/demand.hpp"
#include "pasafl/experiment.hpp"
#include "pasafl/market.hpp"
#include "pasafl/persist.hpp"
#include "pasafl/policy.hpp"
#include "pasafl/policy_baselines.hpp"
#include "pasafl/policy_pas.hpp"
#include "pasafl/queues.hpp"
#include "pasafl/rng.hpp"
#include "pasafl/scenario.hpp"
