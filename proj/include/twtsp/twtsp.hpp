#pragma once

#include "twtsp/error.hpp"
#include "twtsp/generators.hpp"
#include "twtsp/graph.hpp"
#include "twtsp/harness.hpp"
#include "twtsp/io.hpp"
#include "twtsp/matching.hpp"
#include "twtsp/model.hpp"
#include "twtsp/offline.hpp"
#include "twtsp/online.hpp"
#include "twtsp/oracle.hpp"
#include "twtsp/rational.hpp"
#include "twtsp/rng.hpp"
