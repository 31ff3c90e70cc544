#pragma once

// Umbrella header.

#include "restex/behaviours.hpp"
#include "restex/executor.hpp"
#include "restex/explorer.hpp"
#include "restex/fixture.hpp"
#include "restex/generator.hpp"
#include "restex/openapi.hpp"
#include "restex/relation_graph.hpp"
#include "restex/report.hpp"
#include "restex/runner.hpp"
#include "restex/shrinker.hpp"
#include "restex/store.hpp"
