#pragma once

#include "lazycg/active_set.hpp"
#include "lazycg/augment_oracle.hpp"
#include "lazycg/bruteforce.hpp"
#include "lazycg/config.hpp"
#include "lazycg/core.hpp"
#include "lazycg/domain.hpp"
#include "lazycg/experiment.hpp"
#include "lazycg/graph.hpp"
#include "lazycg/objective.hpp"
#include "lazycg/solvers.hpp"
#include "lazycg/stream.hpp"
#include "lazycg/trace.hpp"
#include "lazycg/weaksep.hpp"
