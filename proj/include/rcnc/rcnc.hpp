#pragma once

#include "rcnc/channel.hpp"
#include "rcnc/codec.hpp"
#include "rcnc/coefficient_vector.hpp"
#include "rcnc/error.hpp"
#include "rcnc/policy.hpp"
#include "rcnc/protocol.hpp"
#include "rcnc/random.hpp"
#include "rcnc/harness/bench.hpp"
#include "rcnc/harness/config.hpp"
#include "rcnc/harness/csv.hpp"
#include "rcnc/harness/sweep.hpp"
