#pragma once

#include "jscc/channel.hpp"
#include "jscc/conv_code.hpp"
#include "jscc/decode.hpp"
#include "jscc/joint.hpp"
#include "jscc/pep.hpp"
#include "jscc/rng.hpp"
#include "jscc/search.hpp"
#include "jscc/sim.hpp"
